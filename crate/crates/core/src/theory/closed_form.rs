use num_traits::Float;
use serde::Serialize;

/// Absolute slack for the analytic comparisons.
pub const ANALYTIC_TOLERANCE: f64 = 1e-12;

fn pow<F: Float>(x: F, n: u32) -> F {
    x.powi(i32::try_from(n).unwrap_or(i32::MAX))
}

/// `1 − (1 − p)^n`: at least one of `n` independent single-shot chains
/// succeeds.
pub fn p_cot_sc<F: Float>(p: F, n: u32) -> F {
    F::one() - pow(F::one() - p, n)
}

/// `(1 − (1 − p1)^n)(1 − (1 − p2)^n)`: both stages succeed within `n`
/// verified attempts each.
pub fn p_tot<F: Float>(p1: F, p2: F, n: u32) -> F {
    p_cot_sc(p1, n) * p_cot_sc(p2, n)
}

/// One stage where attempt `j` succeeds with `schedule[min(j, len − 1)]`.
pub fn p_stage_boosted<F: Float>(schedule: &[F], n: u32) -> F {
    let Some(&last) = schedule.last() else {
        return F::zero();
    };
    let miss = (0..n as usize)
        .map(|j| F::one() - schedule.get(j).copied().unwrap_or(last))
        .fold(F::one(), |acc, q| acc * q);
    F::one() - miss
}

/// Two boosted stages in sequence.
pub fn p_cr<F: Float>(stage1: &[F], stage2: &[F], n: u32) -> F {
    p_stage_boosted(stage1, n) * p_stage_boosted(stage2, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma1Check<F> {
    pub p1: F,
    pub p2: F,
    pub n: u32,
    /// `1 − (1 − p1·p2)^n`
    pub lhs: F,
    /// `(1 − (1 − p1)^n)(1 − (1 − p2)^n)`
    pub rhs: F,
    pub holds: bool,
}

pub fn check_lemma1<F: Float>(p1: F, p2: F, n: u32) -> Lemma1Check<F> {
    let lhs = p_cot_sc(p1 * p2, n);
    let rhs = p_tot(p1, p2, n);
    let tol = F::from(ANALYTIC_TOLERANCE).unwrap_or_else(F::epsilon);
    Lemma1Check {
        p1,
        p2,
        n,
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    }
}

/// Every `(p1, p2, n)` with `p1, p2 ∈ {0, 0.05, …, 1}` and `n ∈ 1..=20`.
pub fn lemma1_grid() -> Vec<Lemma1Check<f64>> {
    let probs: Vec<f64> = (0..=20).map(|i| f64::from(i) / 20.0).collect();
    let mut out = Vec::with_capacity(probs.len() * probs.len() * 20);
    for &p1 in &probs {
        for &p2 in &probs {
            for n in 1..=20 {
                out.push(check_lemma1(p1, p2, n));
            }
        }
    }
    out
}
