use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::Args;
use cr_core::engine::{parse_event, Event, VerdictKind};
use serde::{Deserialize, Serialize};

use crate::output::{emit_json, mean};
use crate::{usage, CliError, OutArgs};

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Event logs, or directories whose `*.jsonl` files are read.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Totals over the `halt` events of one or more logs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LogSummary {
    pub sessions: usize,
    /// Sessions whose halt carries a `correct` flag.
    pub labeled: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub solved: usize,
    pub mean_visited_states: f64,
    pub proposer_calls: usize,
    pub verifier_calls: usize,
    pub reporter_calls: usize,
    pub validated: usize,
    pub rejected: usize,
    pub skipped_lines: usize,
    #[serde(skip)]
    visited_states: usize,
}

impl LogSummary {
    pub fn add(&mut self, event: &Event) {
        match event {
            Event::Verdict { verdict, .. } => match verdict {
                VerdictKind::Validated => self.validated += 1,
                VerdictKind::Rejected => self.rejected += 1,
            },
            Event::Halt {
                solved,
                metrics,
                correct,
                ..
            } => {
                self.sessions += 1;
                self.solved += usize::from(*solved);
                if let Some(c) = correct {
                    self.labeled += 1;
                    self.correct += usize::from(*c);
                }
                self.visited_states += metrics.visited_states;
                self.proposer_calls += metrics.proposer_calls;
                self.verifier_calls += metrics.verifier_calls;
                self.reporter_calls += metrics.reporter_calls;
            }
            _ => {}
        }
        self.finish();
    }

    pub fn merge(&mut self, other: &LogSummary) {
        self.sessions += other.sessions;
        self.labeled += other.labeled;
        self.correct += other.correct;
        self.solved += other.solved;
        self.visited_states += other.visited_states;
        self.proposer_calls += other.proposer_calls;
        self.verifier_calls += other.verifier_calls;
        self.reporter_calls += other.reporter_calls;
        self.validated += other.validated;
        self.rejected += other.rejected;
        self.skipped_lines += other.skipped_lines;
        self.finish();
    }

    fn finish(&mut self) {
        self.accuracy = mean(self.correct, self.labeled);
        self.mean_visited_states = mean(self.visited_states, self.sessions);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub path: String,
    #[serde(flatten)]
    pub summary: LogSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub files: Vec<FileSummary>,
    pub total: LogSummary,
}

/// Expands directories to their `*.jsonl` files, sorted by name.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| usage(format!("cannot list {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(usage(format!("no such file or directory: {}", p.display())));
        }
    }
    if out.is_empty() {
        return Err(usage("no event logs found"));
    }
    Ok(out)
}

pub fn summarize_file(path: &Path) -> Result<LogSummary, CliError> {
    let file = fs::File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut s = LogSummary::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_event(&line) {
            Ok(e) => s.add(&e),
            Err(e) => {
                eprintln!("warning: {}:{}: skipped: {e}", path.display(), i + 1);
                s.skipped_lines += 1;
            }
        }
    }
    Ok(s)
}

pub fn build(inputs: &[PathBuf]) -> Result<Report, CliError> {
    let mut total = LogSummary::default();
    let mut files = Vec::new();
    for path in collect_inputs(inputs)? {
        let summary = summarize_file(&path)?;
        total.merge(&summary);
        files.push(FileSummary {
            path: path.display().to_string(),
            summary,
        });
    }
    Ok(Report {
        command: "report".into(),
        files,
        total,
    })
}

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    emit_json(&args.out, &build(&args.inputs)?)
}
