use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::closed_form::p_tot;
use super::TheoryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "cot_sc")]
    CoTSC,
    #[serde(rename = "tot")]
    ToT,
    #[serde(rename = "cr")]
    CR,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::CoTSC, Method::ToT, Method::CR];

    fn stream(self) -> u64 {
        match self {
            Method::CoTSC => 0,
            Method::ToT => 1,
            Method::CR => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    /// First step correct.
    pub p1: f64,
    /// Second step correct given a correct first step.
    pub p2: f64,
    /// Unverified single-shot success.
    pub p: f64,
    /// Attempts per stage (ToT, CR) or chains (CoT-SC).
    pub n: u32,
}

fn check_prob(name: &str, v: f64) -> Result<(), TheoryError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(TheoryError::Config(format!("{name} = {v} is not a probability")))
    }
}

impl StageParams {
    pub fn validate(&self) -> Result<(), TheoryError> {
        check_prob("p1", self.p1)?;
        check_prob("p2", self.p2)?;
        check_prob("p", self.p)?;
        if self.n == 0 {
            return Err(TheoryError::Config("n must be at least 1".into()));
        }
        if self.p > self.p1 * self.p2 + 1e-12 {
            return Err(TheoryError::Config(format!(
                "p = {} exceeds p1·p2 = {}",
                self.p,
                self.p1 * self.p2
            )));
        }
        Ok(())
    }
}

/// Per-stage success probabilities for CR, indexed by how many earlier
/// attempts at that stage are already in context. Attempts past the end
/// reuse the last entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrBoostSchedule {
    pub stage1: Vec<f64>,
    pub stage2: Vec<f64>,
}

impl CrBoostSchedule {
    /// No boost: every attempt succeeds with the ToT probability.
    pub fn flat(params: &StageParams) -> Self {
        Self {
            stage1: vec![params.p1],
            stage2: vec![params.p2],
        }
    }

    /// Non-empty, within [0, 1], non-decreasing and never below the
    /// corresponding ToT probability.
    pub fn validate(&self, params: &StageParams) -> Result<(), TheoryError> {
        for (name, sched, floor) in [("stage1", &self.stage1, params.p1), ("stage2", &self.stage2, params.p2)] {
            if sched.is_empty() {
                return Err(TheoryError::Config(format!("{name} schedule is empty")));
            }
            for (j, &q) in sched.iter().enumerate() {
                check_prob(&format!("{name}[{j}]"), q)?;
                if q < floor {
                    return Err(TheoryError::Config(format!(
                        "{name}[{j}] = {q} is below the unboosted {floor}"
                    )));
                }
                if j > 0 && q < sched[j - 1] {
                    return Err(TheoryError::Config(format!("{name} schedule decreases at {j}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let stderr = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        Self {
            estimate: p,
            stderr,
            successes,
            trials,
        }
    }

    /// Pools shards; the result does not depend on their order.
    pub fn merge(parts: &[Estimate]) -> Estimate {
        let (s, t) = parts
            .iter()
            .fold((0, 0), |(s, t), e| (s + e.successes, t + e.trials));
        Self::from_counts(s, t)
    }

    /// `a ≤ b` up to `sigmas` combined standard errors.
    pub fn le_within(&self, other: &Estimate, sigmas: f64) -> bool {
        let sd = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        self.estimate <= other.estimate + sigmas * sd
    }
}

fn stage(rng: &mut impl Rng, n: u32, prob: impl Fn(usize) -> f64) -> bool {
    (0..n as usize).any(|j| rng.gen_bool(prob(j)))
}

fn trial(method: Method, params: &StageParams, boosts: &CrBoostSchedule, rng: &mut impl Rng) -> bool {
    let n = params.n;
    match method {
        Method::CoTSC => {
            // an unverified chain: a correct first step completes with p / p1
            let second = if params.p1 > 0.0 { (params.p / params.p1).min(1.0) } else { 0.0 };
            (0..n).any(|_| rng.gen_bool(params.p1) && rng.gen_bool(second))
        }
        Method::ToT => stage(rng, n, |_| params.p1) && stage(rng, n, |_| params.p2),
        Method::CR => {
            let at = |s: &[f64], j: usize| s[j.min(s.len() - 1)];
            stage(rng, n, |j| at(&boosts.stage1, j)) && stage(rng, n, |j| at(&boosts.stage2, j))
        }
    }
}

fn method_rng(seed: u64, method: Method, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(method.stream() << 32 | shard);
    rng
}

/// Monte Carlo arrival probability of one method on the two-stage process.
pub fn simulate(
    method: Method,
    params: &StageParams,
    boosts: &CrBoostSchedule,
    trials: u64,
    seed: u64,
) -> Result<Estimate, TheoryError> {
    simulate_shard(method, params, boosts, trials, seed, 0)
}

/// One shard of a larger run; shards with distinct indices use disjoint
/// random streams and can be pooled with [`Estimate::merge`].
pub fn simulate_shard(
    method: Method,
    params: &StageParams,
    boosts: &CrBoostSchedule,
    trials: u64,
    seed: u64,
    shard: u32,
) -> Result<Estimate, TheoryError> {
    params.validate()?;
    if method == Method::CR {
        boosts.validate(params)?;
    }
    if trials == 0 {
        return Err(TheoryError::Config("trials must be at least 1".into()));
    }
    let mut rng = method_rng(seed, method, u64::from(shard));
    let successes = (0..trials).filter(|_| trial(method, params, boosts, &mut rng)).count();
    Ok(Estimate::from_counts(successes as u64, trials))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrivalEstimates {
    pub cot_sc: Estimate,
    pub tot: Estimate,
    pub cr: Estimate,
    pub trials: u64,
    pub seed: u64,
}

pub fn simulate_all(
    params: &StageParams,
    boosts: &CrBoostSchedule,
    trials: u64,
    seed: u64,
) -> Result<ArrivalEstimates, TheoryError> {
    Ok(ArrivalEstimates {
        cot_sc: simulate(Method::CoTSC, params, boosts, trials, seed)?,
        tot: simulate(Method::ToT, params, boosts, trials, seed)?,
        cr: simulate(Method::CR, params, boosts, trials, seed)?,
        trials,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: StageParams,
    pub boosts: CrBoostSchedule,
    pub estimates: ArrivalEstimates,
    pub p_tot: f64,
    /// CoT-SC ≤ ToT within 3σ.
    pub cot_le_tot: bool,
    /// ToT ≤ CR within 3σ.
    pub tot_le_cr: bool,
    /// ToT estimate within 4σ of the closed form.
    pub tot_matches_closed_form: bool,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.cot_le_tot && self.tot_le_cr && self.tot_matches_closed_form
    }
}

/// Random parameterizations: `p1, p2` uniform in [0.05, 0.95], `p` uniform
/// in [0, p1·p2], `n` in 1..=8, and non-decreasing boost schedules of
/// length `n` starting at the ToT probability.
pub fn random_parameterization(rng: &mut impl Rng) -> (StageParams, CrBoostSchedule) {
    let p1 = rng.gen_range(0.05..0.95);
    let p2 = rng.gen_range(0.05..0.95);
    let p = rng.gen_range(0.0..=p1 * p2);
    let n = rng.gen_range(1..=8u32);
    let mut schedule = |base: f64| {
        let mut cur = base;
        (0..n)
            .map(|j| {
                if j > 0 {
                    cur = (cur + rng.gen_range(0.0..0.1)).min(1.0);
                }
                cur
            })
            .collect::<Vec<f64>>()
    };
    let stage1 = schedule(p1);
    let stage2 = schedule(p2);
    (StageParams { p1, p2, p, n }, CrBoostSchedule { stage1, stage2 })
}

pub fn ordering_sweep(count: usize, trials: u64, seed: u64) -> Result<Vec<SweepRow>, TheoryError> {
    let mut param_rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (params, boosts) = random_parameterization(&mut param_rng);
            let estimates = simulate_all(&params, &boosts, trials, seed.wrapping_add(i as u64 + 1))?;
            let closed = p_tot(params.p1, params.p2, params.n);
            Ok(SweepRow {
                cot_le_tot: estimates.cot_sc.le_within(&estimates.tot, 3.0),
                tot_le_cr: estimates.tot.le_within(&estimates.cr, 3.0),
                tot_matches_closed_form: (estimates.tot.estimate - closed).abs()
                    <= 4.0 * estimates.tot.stderr.max(f64::EPSILON),
                params,
                boosts,
                estimates,
                p_tot: closed,
            })
        })
        .collect()
}
