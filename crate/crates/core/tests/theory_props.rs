use cr_core::theory::{
    check_lemma1, conceptual_experiment, lemma1_grid, ordering_sweep, p_cot_sc, p_cr, p_tot,
    simulate, simulate_shard, CrBoostSchedule, Estimate, Method, StageParams,
};
use num_rational::BigRational;
use num_traits::{One, Pow};
use proptest::prelude::*;

fn exact(i: u32) -> BigRational {
    BigRational::new(i.into(), 20.into())
}

#[test]
fn lemma1_grid_holds_in_floats() {
    let grid = lemma1_grid();
    assert_eq!(grid.len(), 21 * 21 * 20);
    let bad: Vec<_> = grid.iter().filter(|c| !c.holds).collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn lemma1_grid_holds_in_exact_arithmetic() {
    let one = BigRational::one();
    for a in 0..=20u32 {
        for b in 0..=20u32 {
            let (p1, p2) = (exact(a), exact(b));
            for n in 1..=20u32 {
                let lhs = &one - Pow::pow(&one - &p1 * &p2, n);
                let rhs = (&one - Pow::pow(&one - &p1, n)) * (&one - Pow::pow(&one - &p2, n));
                assert!(lhs <= rhs, "p1={a}/20 p2={b}/20 n={n}");
                let f = check_lemma1(f64::from(a) / 20.0, f64::from(b) / 20.0, n);
                let to_f = |x: &BigRational| {
                    use num_traits::ToPrimitive;
                    x.to_f64().unwrap()
                };
                assert!((f.lhs - to_f(&lhs)).abs() < 1e-12);
                assert!((f.rhs - to_f(&rhs)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn equality_cases() {
    for n in 1..=20 {
        let c = check_lemma1(0.7f64, 1.0, n);
        assert!((c.lhs - c.rhs).abs() < 1e-12);
    }
    let c = check_lemma1(0.3f64, 0.6, 1);
    assert!((c.lhs - c.rhs).abs() < 1e-12);
}

proptest! {
    #[test]
    fn lemma1_holds_off_grid(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, n in 1u32..200) {
        prop_assert!(check_lemma1(p1, p2, n).holds);
    }

    #[test]
    fn flat_boost_reduces_to_tot(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, n in 1u32..30) {
        prop_assert!((p_cr(&[p1], &[p2], n) - p_tot(p1, p2, n)).abs() < 1e-12);
    }
}

fn params() -> StageParams {
    StageParams {
        p1: 0.4,
        p2: 0.3,
        p: 0.09,
        n: 3,
    }
}

#[test]
fn simulated_arrivals_match_closed_forms() {
    let p = params();
    let boosts = CrBoostSchedule {
        stage1: vec![0.4, 0.5, 0.6],
        stage2: vec![0.3, 0.45],
    };
    let trials = 200_000;
    let cases = [
        (Method::CoTSC, p_cot_sc(p.p, p.n)),
        (Method::ToT, p_tot(p.p1, p.p2, p.n)),
        (Method::CR, p_cr(&boosts.stage1, &boosts.stage2, p.n)),
    ];
    for (m, closed) in cases {
        let e = simulate(m, &p, &boosts, trials, 11).unwrap();
        assert!((e.estimate - closed).abs() <= 4.0 * e.stderr, "{m:?}: {} vs {closed}", e.estimate);
    }
}

#[test]
fn shards_pool_to_a_consistent_estimate() {
    let p = params();
    let flat = CrBoostSchedule::flat(&p);
    let shards: Vec<Estimate> = (0..8)
        .map(|s| simulate_shard(Method::ToT, &p, &flat, 10_000, 3, s).unwrap())
        .collect();
    let pooled = Estimate::merge(&shards);
    let mut rev = shards.clone();
    rev.reverse();
    assert_eq!(pooled, Estimate::merge(&rev));
    assert_eq!(pooled.trials, 80_000);
    assert!((pooled.estimate - p_tot(p.p1, p.p2, p.n)).abs() <= 4.0 * pooled.stderr);
}

#[test]
fn invalid_parameters_are_rejected() {
    let flat = CrBoostSchedule::flat(&params());
    let too_big = StageParams { p: 0.5, ..params() };
    assert!(simulate(Method::CoTSC, &too_big, &flat, 10, 0).is_err());
    assert!(simulate(Method::ToT, &params(), &flat, 0, 0).is_err());
    let shrinking = CrBoostSchedule {
        stage1: vec![0.4, 0.2],
        stage2: vec![0.3],
    };
    assert!(simulate(Method::CR, &params(), &shrinking, 10, 0).is_err());
}

#[test]
fn small_ordering_sweep_holds() {
    let rows = ordering_sweep(20, 20_000, 5).unwrap();
    let failures = rows.iter().filter(|r| !r.ok()).count();
    assert!(failures <= 1, "{failures} rows out of order");
    assert_eq!(rows, ordering_sweep(20, 20_000, 5).unwrap());
}

#[test]
fn conceptual_stages_multiply() {
    let r = conceptual_experiment([4, 5, 6, 10], 20_000, 1).unwrap();
    assert!(r.consistent, "{r:?}");
    assert!(r.p1.estimate > 0.0 && r.p1.estimate < 1.0);
    assert!(r.p.le_within(&r.p1, 3.0));
}
