use std::collections::BTreeSet;

use cr_core::engine::{
    extract_derivation, majority_vote, Event, HaltReason, NodeId, ReasoningDag, Session,
    SessionConfig,
};
use rand::{Rng, SeedableRng};

#[path = "support/toy.rs"]
mod toy;

use toy::{random_config, Toy};

#[test]
fn randomized_sessions_keep_invariants_and_replay() {
    let mut meta = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for _ in 0..2000 {
        let toy = Toy {
            reject_mod: meta.gen_range(2..6),
        };
        let cfg = random_config(&mut meta);
        let premises: Vec<u64> = (0..meta.gen_range(1..5)).map(|_| meta.gen_range(0..97)).collect();
        let goal = meta.gen_range(0..97);

        let mut log_a: Vec<Event> = Vec::new();
        let a = Session::new(&toy, premises.clone(), goal, cfg.clone())
            .unwrap()
            .run_with(&mut log_a)
            .unwrap();
        a.dag.check_invariants().unwrap();
        assert!(a.metrics.proposer_calls <= cfg.b * cfg.limit);
        assert!(a.metrics.visited_states - 1 <= cfg.n * cfg.b);
        for node in a.dag.nodes() {
            assert!(node.parents.iter().all(|p| a.dag.nodes()[p.0].is_validated()));
        }
        if a.halted_by == HaltReason::Reporter {
            assert_eq!(a.answer, goal);
            let closure: BTreeSet<NodeId> = a.derivation.iter().copied().collect();
            for id in &a.derivation {
                for p in &a.dag.nodes()[id.0].parents {
                    assert!(closure.contains(p));
                }
            }
        }

        let mut log_b: Vec<Event> = Vec::new();
        let b = Session::new(&toy, premises, goal, cfg)
            .unwrap()
            .run_with(&mut log_b)
            .unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(log_a, log_b);
    }
}

#[test]
fn stepping_checks_invariants_after_every_call() {
    let toy = Toy { reject_mod: 3 };
    for seed in 0..200 {
        let cfg = SessionConfig {
            seed,
            ..SessionConfig::default()
        };
        let mut s = Session::new(&toy, vec![1, 2, 3], 1000, cfg).unwrap();
        while s.ended().is_none() {
            let before = s.dag().len();
            s.step().unwrap();
            s.dag().check_invariants().unwrap();
            assert!(s.dag().len() <= before + 1);
        }
    }
}

#[test]
fn derivations_are_closed_and_minimal() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let mut dag: ReasoningDag<usize> = ReasoningDag::new();
        let premises = rng.gen_range(1..4);
        for i in 0..premises {
            dag.add_premise(i, i.to_string());
        }
        let total = rng.gen_range(premises..=20);
        for i in premises..total {
            let valid: Vec<NodeId> = dag.validated().map(|n| n.id).collect();
            let mut parents: Vec<NodeId> = valid
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            if parents.is_empty() {
                parents.push(valid[rng.gen_range(0..valid.len())]);
            }
            if rng.gen_bool(0.2) {
                dag.add_rejected(i, parents, "no".into());
            } else {
                dag.add_validated(i, parents, i.to_string()).unwrap();
            }
        }
        for target in dag.validated().map(|n| n.id).collect::<Vec<_>>() {
            let got = extract_derivation(&dag, target).unwrap();
            // brute force: fixed point of "add parents"
            let mut want: BTreeSet<NodeId> = [target].into();
            loop {
                let next: BTreeSet<NodeId> = want
                    .iter()
                    .flat_map(|id| dag.nodes()[id.0].parents.iter().copied())
                    .chain(want.iter().copied())
                    .collect();
                if next == want {
                    break;
                }
                want = next;
            }
            assert_eq!(got, want.into_iter().collect::<Vec<_>>());
            assert!(got.windows(2).all(|w| w[0] < w[1]));
        }
        let rejected = dag.rejected().next().map(|r| r.id);
        if let Some(id) = rejected {
            assert!(extract_derivation(&dag, id).is_err());
        }
    }
    let dag: ReasoningDag<u8> = ReasoningDag::new();
    assert!(extract_derivation(&dag, NodeId(3)).is_err());
}

#[test]
fn earliest_reporting_branch_wins() {
    let toy = Toy { reject_mod: 50 };
    let mut multi = 0;
    for seed in 0..300 {
        let cfg = SessionConfig {
            b: 5,
            limit: 200,
            n: 200,
            seed,
            ..SessionConfig::default()
        };
        let mut log: Vec<Event> = Vec::new();
        let res = Session::new(&toy, vec![38], 40, cfg).unwrap().run_with(&mut log).unwrap();
        let reports: Vec<(usize, usize)> = log
            .iter()
            .filter_map(|e| match e {
                Event::Report { branch, iteration, .. } => Some((*branch, *iteration)),
                _ => None,
            })
            .collect();
        if res.halted_by != HaltReason::Reporter {
            assert!(reports.is_empty());
            continue;
        }
        // every report comes from the final lockstep round
        assert!(reports.windows(2).all(|w| w[0].1 == w[1].1));
        assert_eq!(res.branch, reports.iter().map(|r| r.0).min());
        if reports.len() > 1 {
            multi += 1;
        }
    }
    assert!(multi > 0, "no seed produced a tie between branches");
}

#[test]
fn vote_examples() {
    #[derive(Clone, Debug, PartialEq)]
    enum L {
        T,
        F,
        U,
    }
    assert_eq!(majority_vote(&[L::T, L::T, L::F]).unwrap(), L::T);
    assert_eq!(majority_vote(&[L::T, L::F]).unwrap(), L::T);
    assert_eq!(majority_vote(&vec![L::U; 16]).unwrap(), L::U);
    assert!(majority_vote::<L>(&[]).is_err());
}

#[test]
fn zero_budget_is_a_config_error() {
    let toy = Toy { reject_mod: 2 };
    let cfg = SessionConfig {
        n: 0,
        ..SessionConfig::default()
    };
    assert!(Session::new(&toy, vec![1], 2, cfg).is_err());
}
