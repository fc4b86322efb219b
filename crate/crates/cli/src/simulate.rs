use clap::{Args, Subcommand};
use cr_core::theory::{
    conceptual_experiment, lemma1_grid, ordering_sweep, p_cot_sc, p_cr, p_tot, simulate_all, CrBoostSchedule,
    StageParams,
};
use serde::Serialize;

use crate::output::{emit_json, emit_text};
use crate::{internal, usage, CliError, OutArgs};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub which: Simulation,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Simulation {
    /// CSV of the CoT-SC vs ToT inequality over the p1, p2, n grid.
    Lemma1Grid {
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random parameterizations checking CoT-SC <= ToT <= CR.
    OrderingSweep {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Stage decomposition of random play on one Game of 24 puzzle.
    Conceptual {
        /// Four comma-separated integers.
        #[arg(long, default_value = "2,7,12,13", value_parser = parse_puzzle)]
        puzzle: Puzzle,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Arrival probabilities for one parameterization, closed form and simulated.
    Arrival {
        #[arg(long, value_parser = probability)]
        p1: f64,
        #[arg(long, value_parser = probability)]
        p2: f64,
        /// Direct-hit probability; defaults to p1 * p2.
        #[arg(long, value_parser = probability)]
        p: Option<f64>,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Boosted first-stage probabilities by attempt, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = probability)]
        stage1: Vec<f64>,
        /// Boosted second-stage probabilities by attempt, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = probability)]
        stage2: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Puzzle(pub [i64; 4]);

fn parse_puzzle(s: &str) -> Result<Puzzle, String> {
    let nums: Vec<i64> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("{t:?} is not an integer")))
        .collect::<Result<_, _>>()?;
    nums.try_into()
        .map(Puzzle)
        .map_err(|v: Vec<i64>| format!("expected four numbers, got {}", v.len()))
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Serialize)]
struct ClosedForms {
    cot_sc: f64,
    tot: f64,
    cr: f64,
}

#[derive(Serialize)]
struct ArrivalReport<'a, E> {
    params: StageParams,
    boosts: &'a CrBoostSchedule,
    closed_form: ClosedForms,
    simulated: E,
}

#[derive(Serialize)]
struct SweepSummary<R> {
    rows: Vec<R>,
    count: usize,
    failures: usize,
    all_ok: bool,
}

pub fn lemma1_csv() -> Result<(String, usize), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p1", "p2", "n", "lhs", "rhs", "holds"]).map_err(internal)?;
    let mut violations = 0;
    for c in lemma1_grid() {
        violations += usize::from(!c.holds);
        w.write_record([
            c.p1.to_string(),
            c.p2.to_string(),
            c.n.to_string(),
            format!("{:.12}", c.lhs),
            format!("{:.12}", c.rhs),
            c.holds.to_string(),
        ])
        .map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(internal)?;
    Ok((String::from_utf8(bytes).map_err(internal)?, violations))
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    match &args.which {
        Simulation::Lemma1Grid { out } => {
            let (text, violations) = lemma1_csv()?;
            eprintln!("{} grid points, {violations} violations", lemma1_grid().len());
            emit_text(out, &text)
        }
        Simulation::OrderingSweep {
            count,
            trials,
            seed,
            out,
        } => {
            let rows = ordering_sweep(*count, *trials, *seed).map_err(usage)?;
            let failures = rows.iter().filter(|r| !r.ok()).count();
            eprintln!("{count} parameterizations, {failures} out of order");
            emit_json(
                out,
                &SweepSummary {
                    count: rows.len(),
                    failures,
                    all_ok: failures == 0,
                    rows,
                },
            )
        }
        Simulation::Conceptual {
            puzzle,
            trials,
            seed,
            out,
        } => {
            let report = conceptual_experiment(puzzle.0, *trials, *seed).map_err(usage)?;
            emit_json(out, &report)
        }
        Simulation::Arrival {
            p1,
            p2,
            p,
            n,
            trials,
            seed,
            stage1,
            stage2,
            out,
        } => {
            let params = StageParams {
                p1: *p1,
                p2: *p2,
                p: p.unwrap_or(p1 * p2),
                n: *n,
            };
            params.validate().map_err(usage)?;
            let flat = CrBoostSchedule::flat(&params);
            let boosts = CrBoostSchedule {
                stage1: if stage1.is_empty() { flat.stage1 } else { stage1.clone() },
                stage2: if stage2.is_empty() { flat.stage2 } else { stage2.clone() },
            };
            let simulated = simulate_all(&params, &boosts, *trials, *seed).map_err(usage)?;
            let report = ArrivalReport {
                params,
                boosts: &boosts,
                closed_form: ClosedForms {
                    cot_sc: p_cot_sc(params.p, *n),
                    tot: p_tot(params.p1, params.p2, *n),
                    cr: p_cr(&boosts.stage1, &boosts.stage2, *n),
                },
                simulated,
            };
            emit_json(out, &report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn puzzle_and_probability_parsers() {
        assert_eq!(parse_puzzle("2,7,12,13"), Ok(Puzzle([2, 7, 12, 13])));
        assert_eq!(parse_puzzle("1 2 3 4"), Ok(Puzzle([1, 2, 3, 4])));
        assert!(parse_puzzle("1,2,3").is_err());
        assert!(parse_puzzle("1,2,x,4").is_err());
        assert_eq!(probability("0.25"), Ok(0.25));
        assert!(probability("1.5").is_err());
        assert!(probability("-0.1").is_err());
        assert!(probability("nan").is_err());
    }

    #[test]
    fn lemma1_csv_has_header_and_every_point() {
        let (text, violations) = lemma1_csv().unwrap();
        assert_eq!(violations, 0);
        assert_eq!(text.lines().next(), Some("p1,p2,n,lhs,rhs,holds"));
        assert_eq!(text.lines().count(), 1 + 21 * 21 * 20);
    }
}
