use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use cr_core::engine::{ContextPolicy, Event, HaltReason, Metrics, SessionConfig, SessionResult};
use cr_core::logic::{load_problems, run_logic_voted, Label, LogicStep, ProblemText, ProposePolicy};
use cr_llm::{load_folio, run_llm_logic_voted, ChatClient, EndpointConfig, LogicTemplates};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::{default_jobs, emit_json, label_halts, mean, par_map, write_events, RunReport};
use crate::{usage, CliError, OutArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Rule-based proposer and verifier; premises must parse.
    Symbolic,
    /// Chat-completion model behind an OpenAI-compatible endpoint.
    Llm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Systematic,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Context {
    FullHistory,
    RandomPremisePair,
}

#[derive(Debug, Clone, Args)]
pub struct LogicArgs {
    /// Problem file: JSON object or array, or FOLIO-style JSONL.
    pub problems: PathBuf,
    #[arg(long, value_enum, default_value_t = Backend::Symbolic)]
    pub backend: Backend,
    /// Majority-voting runs per problem; a bare `--k` means 16.
    #[arg(long, default_value_t = 1, num_args = 0..=1, default_missing_value = "16")]
    pub k: usize,
    /// Maximum validated propositions per branch.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Iteration cap per branch.
    #[arg(long, default_value_t = 50)]
    pub limit: usize,
    /// Independent branches.
    #[arg(long, short = 'b', default_value_t = 1)]
    pub b: usize,
    /// Problem `i` runs with seed `seed + i`; votes add `0..k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// How the symbolic proposer picks among applicable rules.
    #[arg(long, value_enum, default_value_t = Policy::Systematic)]
    pub policy: Policy,
    /// Which premises each proposer call sees.
    #[arg(long, value_enum, default_value_t = Context::FullHistory)]
    pub context: Context,
    #[arg(long, default_value_t = 0.1)]
    pub temperature_propose: f64,
    #[arg(long, default_value_t = 0.7)]
    pub temperature_vote: f64,
    /// Read the input as FOLIO JSONL (implied by a `.jsonl` extension).
    #[arg(long)]
    pub folio: bool,
    /// File of example ids to drop from FOLIO input, one per line.
    #[arg(long, value_name = "PATH")]
    pub exclude: Option<PathBuf>,
    /// Endpoint settings as JSON; the flags below override single fields.
    #[arg(long, value_name = "PATH")]
    pub endpoint: Option<PathBuf>,
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub api_key_env: Option<String>,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
    /// Directory with replacement prompt templates.
    #[arg(long, value_name = "DIR")]
    pub templates: Option<PathBuf>,
    /// Worker threads; defaults to cores (symbolic) or max_in_flight (llm).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the engine event log (JSONL) here.
    #[arg(long, value_name = "PATH")]
    pub events: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicConfig {
    pub backend: Backend,
    pub session: SessionConfig,
    pub policy: ProposePolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub node: usize,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub parents: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemResult {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub hypothesis: String,
    pub gold: Option<Label>,
    pub predicted: Option<Label>,
    pub correct: Option<bool>,
    pub votes: Vec<Label>,
    pub solved: bool,
    pub halted_by: Option<HaltReason>,
    /// Summed over the voting runs.
    pub metrics: Metrics,
    /// From the first run that agrees with the vote.
    pub derivation: Vec<DerivationStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicAggregates {
    pub items: usize,
    pub labeled: usize,
    pub correct: usize,
    /// Correct over labeled items.
    pub accuracy: f64,
    pub errors: usize,
    pub excluded: usize,
    pub mean_visited_states: f64,
    pub mean_proposer_calls: f64,
    pub mean_verifier_calls: f64,
    pub mean_reporter_calls: f64,
}

impl LogicAggregates {
    pub fn from_items(items: &[ProblemResult], excluded: usize) -> Self {
        let sum = |f: fn(&Metrics) -> usize| items.iter().map(|r| f(&r.metrics)).sum::<usize>();
        let labeled = items.iter().filter(|r| r.correct.is_some()).count();
        let correct = items.iter().filter(|r| r.correct == Some(true)).count();
        let n = items.len();
        Self {
            items: n,
            labeled,
            correct,
            accuracy: mean(correct, labeled),
            errors: items.iter().filter(|r| r.error.is_some()).count(),
            excluded,
            mean_visited_states: mean(sum(|m| m.visited_states), n),
            mean_proposer_calls: mean(sum(|m| m.proposer_calls), n),
            mean_verifier_calls: mean(sum(|m| m.verifier_calls), n),
            mean_reporter_calls: mean(sum(|m| m.reporter_calls), n),
        }
    }
}

pub type LogicReport = RunReport<LogicConfig, ProblemResult, LogicAggregates>;

/// Problems plus how many FOLIO records the exclusion list removed.
pub fn read_problems(args: &LogicArgs) -> Result<(Vec<ProblemText>, usize), CliError> {
    let path = &args.problems;
    if !path.is_file() {
        return Err(usage(format!("cannot read {}", path.display())));
    }
    let jsonl = path.extension().is_some_and(|e| e == "jsonl");
    if args.folio || jsonl || args.exclude.is_some() {
        let set = load_folio(path, args.exclude.as_deref()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if !set.unmatched_exclusions.is_empty() {
            eprintln!("warning: {} excluded ids matched no record", set.unmatched_exclusions.len());
        }
        Ok((set.records.iter().map(|r| r.to_problem()).collect(), set.excluded))
    } else {
        let problems = load_problems(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Ok((problems, 0))
    }
}

fn endpoint(args: &LogicArgs) -> Result<EndpointConfig, CliError> {
    let mut cfg = match &args.endpoint {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => EndpointConfig::default(),
    };
    if let Some(v) = &args.base_url {
        cfg.base_url = v.clone();
    }
    if let Some(v) = &args.model {
        cfg.model = v.clone();
    }
    if let Some(v) = &args.api_key_env {
        cfg.api_key_env = v.clone();
    }
    if let Some(v) = args.max_in_flight {
        cfg.max_in_flight = v;
    }
    cfg.temperature = args.temperature_propose;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn templates(dir: Option<&Path>) -> Result<LogicTemplates, CliError> {
    match dir {
        Some(d) if !d.is_dir() => Err(usage(format!("{} is not a directory", d.display()))),
        Some(d) => LogicTemplates::from_dir(d).map_err(|e| usage(format!("{}: {e}", d.display()))),
        None => Ok(LogicTemplates::builtin()),
    }
}

pub fn session_config(args: &LogicArgs) -> Result<SessionConfig, CliError> {
    let cfg = SessionConfig {
        n: args.n,
        k: args.k,
        b: args.b,
        limit: args.limit,
        temperature_propose: args.temperature_propose,
        temperature_vote: args.temperature_vote,
        seed: args.seed,
        context_policy: match args.context {
            Context::FullHistory => ContextPolicy::FullHistory,
            Context::RandomPremisePair => ContextPolicy::RandomPremisePair,
        },
        report_every_iteration: false,
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn derivation<P>(run: &SessionResult<P, Label>, text: impl Fn(&P) -> (String, Option<String>)) -> Vec<DerivationStep> {
    run.derivation
        .iter()
        .filter_map(|&id| run.dag.get(id))
        .map(|node| {
            let (statement, rule) = text(&node.payload);
            DerivationStep {
                node: node.id.0,
                statement,
                rule,
                parents: node.parents.iter().map(|p| p.0).collect(),
            }
        })
        .collect()
}

fn summarize<P>(
    mut item: ProblemResult,
    label: Label,
    runs: &[SessionResult<P, Label>],
    text: impl Fn(&P) -> (String, Option<String>),
) -> ProblemResult {
    let chosen = runs.iter().find(|r| r.answer == label).or(runs.first());
    item.predicted = Some(label);
    item.correct = item.gold.map(|g| g == label);
    item.votes = runs.iter().map(|r| r.answer).collect();
    item.metrics = Metrics::merge(runs.iter().map(|r| &r.metrics));
    if let Some(r) = chosen {
        item.solved = r.solved;
        item.halted_by = Some(r.halted_by);
        item.derivation = derivation(r, text);
    }
    item
}

fn step_text(step: &LogicStep) -> (String, Option<String>) {
    (step.statement.to_string(), step.rule.map(|r| r.name().to_string()))
}

pub fn solve(args: &LogicArgs) -> Result<(LogicReport, Vec<Vec<Event>>), CliError> {
    let session = session_config(args)?;
    let (problems, excluded) = read_problems(args)?;
    let policy = match args.policy {
        Policy::Systematic => ProposePolicy::Systematic,
        Policy::Sampled => ProposePolicy::Sampled,
    };
    let (client, tpl) = match args.backend {
        Backend::Symbolic => (None, None),
        Backend::Llm => {
            let tpl = templates(args.templates.as_deref())?;
            let client = ChatClient::new(endpoint(args)?).map_err(usage)?;
            (Some(client), Some(tpl))
        }
    };
    let jobs = args.jobs.unwrap_or_else(|| match &client {
        Some(c) => c.config().max_in_flight,
        None => default_jobs(),
    });
    let started = Instant::now();
    let runs = par_map(&problems, jobs, |i, text| {
        let cfg = session.clone().with_seed(args.seed.wrapping_add(i as u64));
        let item = ProblemResult {
            index: i,
            id: text.id.clone(),
            hypothesis: text.hypothesis.clone(),
            gold: text.label,
            ..ProblemResult::default()
        };
        let mut events: Vec<Event> = Vec::new();
        let out = match (&client, &tpl) {
            (Some(client), Some(tpl)) => run_llm_logic_voted(client, tpl, text, &cfg, &mut events)
                .map(|(label, runs)| summarize(item.clone(), label, &runs, |p: &String| (p.clone(), None))),
            _ => match text.parse() {
                Ok(problem) => run_logic_voted(&problem, &cfg, policy, &mut events)
                    .map(|(label, runs)| summarize(item.clone(), label, &runs, step_text)),
                Err(e) => Ok(ProblemResult {
                    error: Some(e.to_string()),
                    ..item.clone()
                }),
            },
        };
        let result = out.unwrap_or_else(|e| ProblemResult {
            error: Some(e.to_string()),
            ..item
        });
        let name = result.id.clone().unwrap_or_else(|| format!("#{i}"));
        let gold = result.gold.map(|g| Value::String(g.as_str().into()));
        label_halts(&mut events, &name, gold.as_ref());
        (result, events)
    });
    let (items, logs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    for r in items.iter().filter(|r| r.error.is_some()) {
        eprintln!("warning: problem {}: {}", r.index, r.error.as_deref().unwrap_or_default());
    }
    let report = RunReport {
        command: "logic",
        config: LogicConfig {
            backend: args.backend,
            session,
            policy,
            endpoint: client.as_ref().and_then(|c| serde_json::to_value(c.config()).ok()),
        },
        aggregates: LogicAggregates::from_items(&items, excluded),
        items,
        seed: args.seed,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    Ok((report, logs))
}

pub fn run(args: &LogicArgs) -> Result<(), CliError> {
    let (report, logs) = solve(args)?;
    if let Some(path) = &args.events {
        write_events(path, &logs)?;
    }
    emit_json(&args.out, &report)
}
