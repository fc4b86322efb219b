use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use cr_core::engine::{Event, HaltReason, SessionConfig};
use cr_core::game24::{run_cr_24, ProposerMode};
use serde::{Deserialize, Serialize};

use crate::output::{default_jobs, emit_json, label_halts, mean, par_map, read_input, write_events, RunReport};
use crate::{internal, usage, CliError, OutArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Depth-first over every legal step.
    Exhaustive,
    /// One uniformly random legal step per call.
    Random,
}

impl From<Mode> for ProposerMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => ProposerMode::Exhaustive,
            Mode::Random => ProposerMode::Random,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Solve24Args {
    /// CSV of puzzles: four integer columns, or one column like "4 5 6 10".
    pub puzzles: PathBuf,
    /// Independent branches per puzzle.
    #[arg(long, short = 'b', default_value_t = 1)]
    pub breadth: usize,
    /// Iteration cap per branch.
    #[arg(long, short = 'L', default_value_t = 50)]
    pub limit: usize,
    /// Maximum accepted steps per branch.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Reject steps whose remaining numbers cannot reach 24.
    #[arg(long)]
    pub prune: bool,
    /// Puzzle `i` runs with seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the engine event log (JSONL) here.
    #[arg(long, value_name = "PATH")]
    pub events: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solve24Config {
    pub breadth: usize,
    pub limit: usize,
    pub n: usize,
    pub mode: Mode,
    pub prune: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuzzleResult {
    pub puzzle: [i64; 4],
    pub solved: bool,
    pub equation: Option<String>,
    pub visited_states: usize,
    pub branch: Option<usize>,
    pub halted_by: HaltReason,
    pub proposer_calls: usize,
    pub verifier_calls: usize,
    pub reporter_calls: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solve24Aggregates {
    pub items: usize,
    pub solved: usize,
    pub accuracy: f64,
    pub mean_visited_states: f64,
    pub mean_proposer_calls: f64,
    pub mean_verifier_calls: f64,
    pub mean_reporter_calls: f64,
}

impl Solve24Aggregates {
    pub fn from_items(items: &[PuzzleResult]) -> Self {
        let sum = |f: fn(&PuzzleResult) -> usize| items.iter().map(f).sum::<usize>();
        let n = items.len();
        Self {
            items: n,
            solved: sum(|r| usize::from(r.solved)),
            accuracy: mean(sum(|r| usize::from(r.solved)), n),
            mean_visited_states: mean(sum(|r| r.visited_states), n),
            mean_proposer_calls: mean(sum(|r| r.proposer_calls), n),
            mean_verifier_calls: mean(sum(|r| r.verifier_calls), n),
            mean_reporter_calls: mean(sum(|r| r.reporter_calls), n),
        }
    }
}

pub type Solve24Report = RunReport<Solve24Config, PuzzleResult, Solve24Aggregates>;

fn four(values: &[&str]) -> Option<[i64; 4]> {
    let parsed: Vec<i64> = values.iter().map(|v| v.trim().parse().ok()).collect::<Option<_>>()?;
    parsed.try_into().ok()
}

/// Reads puzzles from CSV. A row is either four integer fields or has one
/// field holding four whitespace-separated integers; other columns are
/// ignored. A first row matching neither is taken as a header.
pub fn parse_puzzles(text: &str) -> Result<Vec<[i64; 4]>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        let fields: Vec<&str> = rec.iter().collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        let packed = fields
            .iter()
            .find_map(|f| four(&f.split_whitespace().collect::<Vec<_>>()));
        let spread = (fields.len() >= 4).then(|| four(&fields[..4])).flatten();
        match packed.or(spread) {
            Some(p) => out.push(p),
            None if i == 0 => {}
            None => return Err(format!("line {line}: expected four integers, got {:?}", fields.join(","))),
        }
    }
    if out.is_empty() {
        return Err("no puzzles found".into());
    }
    Ok(out)
}

pub fn solve(puzzles: &[[i64; 4]], args: &Solve24Args) -> Result<(Solve24Report, Vec<Vec<Event>>), CliError> {
    let base = SessionConfig {
        n: args.n,
        b: args.breadth,
        limit: args.limit,
        seed: args.seed,
        ..SessionConfig::default()
    };
    base.validate().map_err(usage)?;
    let started = Instant::now();
    let runs = par_map(puzzles, args.jobs.unwrap_or_else(default_jobs), |i, &puzzle| {
        let cfg = base.clone().with_seed(args.seed.wrapping_add(i as u64));
        let mut events: Vec<Event> = Vec::new();
        let res = run_cr_24(puzzle, &cfg, args.mode.into(), args.prune, &mut events)?;
        label_halts(&mut events, &format!("{puzzle:?}"), None);
        let item = PuzzleResult {
            puzzle,
            solved: res.solved,
            equation: res.answer.map(|e| e.0),
            visited_states: res.metrics.visited_states,
            branch: res.branch,
            halted_by: res.halted_by,
            proposer_calls: res.metrics.proposer_calls,
            verifier_calls: res.metrics.verifier_calls,
            reporter_calls: res.metrics.reporter_calls,
        };
        Ok::<_, cr_core::engine::EngineError>((item, events))
    });
    let mut items = Vec::with_capacity(runs.len());
    let mut logs = Vec::with_capacity(runs.len());
    for r in runs {
        let (item, events) = r.map_err(internal)?;
        items.push(item);
        logs.push(events);
    }
    let report = RunReport {
        command: "solve24",
        config: Solve24Config {
            breadth: args.breadth,
            limit: args.limit,
            n: args.n,
            mode: args.mode,
            prune: args.prune,
        },
        aggregates: Solve24Aggregates::from_items(&items),
        items,
        seed: args.seed,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    Ok((report, logs))
}

pub fn run(args: &Solve24Args) -> Result<(), CliError> {
    let text = read_input(&args.puzzles)?;
    let puzzles = parse_puzzles(&text).map_err(|e| usage(format!("{}: {e}", args.puzzles.display())))?;
    let (report, logs) = solve(&puzzles, args)?;
    if let Some(path) = &args.events {
        write_events(path, &logs)?;
    }
    emit_json(&args.out, &report)
}
