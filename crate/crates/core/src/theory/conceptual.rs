use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sim::Estimate;
use super::TheoryError;
use crate::game24::{can_reach_target, oracle_solvable, propose_random, Game24State, TARGET};

/// Stage decomposition of the uniform random strategy on one puzzle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConceptualReport {
    pub puzzle: [i64; 4],
    pub trials: u64,
    pub seed: u64,
    /// Random three-step solution reaches 24.
    pub p: Estimate,
    /// Random first step leaves a solvable state.
    pub p1: Estimate,
    /// Random completion succeeds from a solvable first state.
    pub p2: Estimate,
    pub p1_times_p2: f64,
    /// Delta-method standard error of the product.
    pub p1_times_p2_stderr: f64,
    /// First stage then second stage, counted on one stream.
    pub pipeline: Estimate,
    /// Product and pipeline agree within 3σ.
    pub consistent: bool,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn count(trials: u64, mut f: impl FnMut() -> bool) -> u64 {
    (0..trials).filter(|_| f()).count() as u64
}

fn complete_randomly(mut state: Game24State<i64>, rng: &mut ChaCha8Rng) -> bool {
    while state.numbers().len() > 1 {
        let step = propose_random(&state, rng);
        state = state.apply(&step).expect("enumerated steps apply");
    }
    state.report().is_some()
}

pub fn conceptual_experiment(
    puzzle: [i64; 4],
    trials: u64,
    seed: u64,
) -> Result<ConceptualReport, TheoryError> {
    if trials == 0 {
        return Err(TheoryError::Config("trials must be at least 1".into()));
    }
    if oracle_solvable(&puzzle).is_none() {
        return Err(TheoryError::Config(format!(
            "{puzzle:?} cannot be made into {TARGET}"
        )));
    }
    let root = Game24State::initial(&puzzle);
    let first_ok = |s: &Game24State<i64>| can_reach_target(s.numbers());
    let good_firsts: Vec<Game24State<i64>> = root
        .enumerate_steps()
        .iter()
        .map(|st| root.apply(st).expect("enumerated steps apply"))
        .filter(first_ok)
        .collect();

    let mut rng = stream(seed, 0);
    let p = count(trials, || complete_randomly(root.clone(), &mut rng));

    let mut rng = stream(seed, 1);
    let p1 = count(trials, || {
        let st = propose_random(&root, &mut rng);
        first_ok(&root.apply(&st).expect("enumerated steps apply"))
    });

    // a uniform step conditioned on being correct is uniform over the
    // correct ones
    let mut rng = stream(seed, 2);
    let p2 = count(trials, || {
        let first = good_firsts.choose(&mut rng).expect("solvable puzzle").clone();
        complete_randomly(first, &mut rng)
    });

    let mut rng = stream(seed, 3);
    let pipeline = count(trials, || {
        let st = propose_random(&root, &mut rng);
        let first = root.apply(&st).expect("enumerated steps apply");
        first_ok(&first) && complete_randomly(first, &mut rng)
    });

    let (p, p1, p2, pipeline) = (
        Estimate::from_counts(p, trials),
        Estimate::from_counts(p1, trials),
        Estimate::from_counts(p2, trials),
        Estimate::from_counts(pipeline, trials),
    );
    let product = p1.estimate * p2.estimate;
    let product_se =
        ((p2.estimate * p1.stderr).powi(2) + (p1.estimate * p2.stderr).powi(2)).sqrt();
    let sd = (product_se.powi(2) + pipeline.stderr.powi(2)).sqrt();
    Ok(ConceptualReport {
        puzzle,
        trials,
        seed,
        p,
        p1,
        p2,
        p1_times_p2: product,
        p1_times_p2_stderr: product_se,
        consistent: (product - pipeline.estimate).abs() <= 3.0 * sd,
        pipeline,
    })
}
