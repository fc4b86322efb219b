use std::collections::HashSet;
use std::marker::PhantomData;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::oracle::can_reach_target;
use super::rational::RationalInt;
use super::state::{ArithStep, Equation, Game24State};
use crate::engine::{
    EngineError, EventSink, NodeId, Proposal, Proposed, ReasoningDag, Report, RoleBundle,
    RoleContext, RoleError, Session, SessionConfig, SessionResult, SessionRng, Verdict,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposerMode {
    /// Depth-first over [`Game24State::enumerate_steps`]; complete.
    #[default]
    Exhaustive,
    /// Uniform state, then uniform step.
    Random,
}

/// Uniform draw over [`Game24State::enumerate_steps`].
///
/// # Panics
/// If fewer than two numbers remain.
pub fn propose_random<I: RationalInt>(state: &Game24State<I>, rng: &mut impl Rng) -> ArithStep<I> {
    assert!(
        state.numbers().len() >= 2,
        "propose_random needs at least two numbers"
    );
    *state
        .enumerate_steps()
        .choose(rng)
        .expect("two numbers always admit a step")
}

/// Verdict for a single step against a state.
pub fn verify_step<I: RationalInt>(state: &Game24State<I>, step: &ArithStep<I>) -> Verdict {
    match state.check_step(step) {
        Ok(_) => Verdict::Validated,
        Err(reason) => Verdict::Rejected(reason.to_string()),
    }
}

/// Symbolic proposer, verifier and reporter for the Game of 24.
#[derive(Clone, Debug)]
pub struct Game24Roles<I = i64> {
    pub mode: ProposerMode,
    /// Reject states from which 24 is unreachable (the symbolic stand-in
    /// for an "impossible" value judgement).
    pub prune: bool,
    _int: PhantomData<I>,
}

impl<I> Game24Roles<I> {
    pub fn new(mode: ProposerMode, prune: bool) -> Self {
        Self {
            mode,
            prune,
            _int: PhantomData,
        }
    }
}

struct Frame<I> {
    node: NodeId,
    steps: Vec<ArithStep<I>>,
    next: usize,
}

/// Depth-first frontier for the exhaustive proposer.
pub struct Game24Cursor<I> {
    stack: Vec<Frame<I>>,
    /// Nodes below this index have been pushed already.
    seen_upto: usize,
    tried: HashSet<String>,
}

impl<I> Default for Game24Cursor<I> {
    fn default() -> Self {
        Self {
            stack: Vec::new(),
            seen_upto: 0,
            tried: HashSet::new(),
        }
    }
}

impl<I: RationalInt> Game24Roles<I> {
    fn propose_exhaustive(
        &self,
        dag: &ReasoningDag<Game24State<I>>,
        cursor: &mut Game24Cursor<I>,
    ) -> Proposed<Game24State<I>> {
        for node in &dag.nodes()[cursor.seen_upto..] {
            if node.is_validated() {
                cursor.tried.insert(node.payload.canonical_key());
                if node.payload.numbers().len() >= 2 {
                    cursor.stack.push(Frame {
                        node: node.id,
                        steps: node.payload.enumerate_steps(),
                        next: 0,
                    });
                }
            }
        }
        cursor.seen_upto = dag.len();

        while let Some(frame) = cursor.stack.last_mut() {
            if frame.next >= frame.steps.len() {
                cursor.stack.pop();
                continue;
            }
            let step = frame.steps[frame.next];
            frame.next += 1;
            let parent = &dag.nodes()[frame.node.index()].payload;
            let Ok(child) = parent.apply(&step) else {
                continue;
            };
            if cursor.tried.insert(child.canonical_key()) {
                return Proposed::Candidate(Proposal {
                    payload: child,
                    parents: vec![frame.node],
                });
            }
        }
        Proposed::Exhausted
    }

    fn propose_sampled(
        &self,
        dag: &ReasoningDag<Game24State<I>>,
        rng: &mut SessionRng,
    ) -> Proposed<Game24State<I>> {
        let open: Vec<NodeId> = dag
            .validated()
            .filter(|n| n.payload.numbers().len() >= 2)
            .map(|n| n.id)
            .collect();
        let Some(&u) = open.choose(rng) else {
            return Proposed::Exhausted;
        };
        let state = &dag.nodes()[u.index()].payload;
        let step = propose_random(state, rng);
        match state.apply(&step) {
            Ok(child) => Proposed::Candidate(Proposal {
                payload: child,
                parents: vec![u],
            }),
            Err(e) => Proposed::Malformed(e.to_string()),
        }
    }
}

impl<I: RationalInt> RoleBundle for Game24Roles<I> {
    type Payload = Game24State<I>;
    type Goal = [I; 4];
    type Answer = Option<Equation>;
    type Cursor = Game24Cursor<I>;

    fn canonical_key(&self, payload: &Game24State<I>) -> String {
        payload.canonical_key()
    }

    fn implicit_premises(&self, goal: &[I; 4]) -> Vec<Game24State<I>> {
        vec![Game24State::initial(goal)]
    }

    fn propose(
        &self,
        ctx: &RoleContext<'_, Game24State<I>>,
        cursor: &mut Game24Cursor<I>,
        rng: &mut SessionRng,
    ) -> Result<Proposed<Game24State<I>>, RoleError> {
        Ok(match self.mode {
            ProposerMode::Exhaustive => self.propose_exhaustive(ctx.dag, cursor),
            ProposerMode::Random => self.propose_sampled(ctx.dag, rng),
        })
    }

    fn verify(
        &self,
        ctx: &RoleContext<'_, Game24State<I>>,
        candidate: &Proposal<Game24State<I>>,
    ) -> Result<Verdict, RoleError> {
        let [parent] = candidate.parents.as_slice() else {
            return Ok(Verdict::Rejected("expected exactly one parent state".into()));
        };
        let Some(parent) = ctx.dag.payload(*parent) else {
            return Ok(Verdict::Rejected("unknown parent".into()));
        };
        let child = &candidate.payload;
        if child.steps().len() != parent.steps().len() + 1
            || child.steps()[..parent.steps().len()] != *parent.steps()
        {
            return Ok(Verdict::Rejected("history does not extend parent".into()));
        }
        let step = child.steps().last().expect("non-empty");
        if let v @ Verdict::Rejected(_) = verify_step(parent, step) {
            return Ok(v);
        }
        match parent.apply(step) {
            Ok(expected) if expected == *child => {}
            _ => return Ok(Verdict::Rejected("remaining numbers mismatch".into())),
        }
        if self.prune && !can_reach_target(child.numbers()) {
            return Ok(Verdict::Rejected("impossible".into()));
        }
        Ok(Verdict::Validated)
    }

    /// Only the newest node can have become a solution since the last call.
    fn report(
        &self,
        dag: &ReasoningDag<Game24State<I>>,
        _goal: &[I; 4],
    ) -> Result<Option<Report<Option<Equation>>>, RoleError> {
        Ok(dag.last_validated().and_then(|n| {
            n.payload.report().map(|eq| Report {
                answer: Some(eq),
                target: Some(n.id),
            })
        }))
    }

    fn fallback_answer(&self, _goal: &[I; 4]) -> Option<Equation> {
        None
    }
}

pub type Game24Result<I = i64> = SessionResult<Game24State<I>, Option<Equation>>;

/// Runs a full cumulative reasoning search on one puzzle.
pub fn run_cr_24<I: RationalInt>(
    puzzle: [I; 4],
    config: &SessionConfig,
    mode: ProposerMode,
    prune: bool,
    sink: &mut dyn EventSink,
) -> Result<Game24Result<I>, EngineError> {
    let roles = Game24Roles::new(mode, prune);
    Session::new(&roles, Vec::new(), puzzle, config.clone())?.run_with(sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{HaltReason, NullSink, StepOutcome};
    use rand::SeedableRng;

    fn cfg(limit: usize) -> SessionConfig {
        SessionConfig {
            n: limit,
            limit,
            ..SessionConfig::default()
        }
    }

    #[test]
    fn scripted_first_step_is_accepted() {
        struct Scripted;
        impl RoleBundle for Scripted {
            type Payload = Game24State<i64>;
            type Goal = [i64; 4];
            type Answer = Option<Equation>;
            type Cursor = ();
            fn canonical_key(&self, p: &Game24State<i64>) -> String {
                p.canonical_key()
            }
            fn implicit_premises(&self, g: &[i64; 4]) -> Vec<Game24State<i64>> {
                vec![Game24State::initial(g)]
            }
            fn propose(
                &self,
                ctx: &RoleContext<'_, Game24State<i64>>,
                _: &mut (),
                _: &mut SessionRng,
            ) -> Result<Proposed<Game24State<i64>>, RoleError> {
                let root = ctx.dag.payload(NodeId(0)).unwrap();
                let child = root.apply(&"10 - 6 = 4".parse().unwrap()).unwrap();
                Ok(Proposed::Candidate(Proposal {
                    payload: child,
                    parents: vec![NodeId(0)],
                }))
            }
            fn verify(
                &self,
                ctx: &RoleContext<'_, Game24State<i64>>,
                c: &Proposal<Game24State<i64>>,
            ) -> Result<Verdict, RoleError> {
                Game24Roles::<i64>::new(ProposerMode::Exhaustive, false).verify(ctx, c)
            }
            fn report(
                &self,
                _: &ReasoningDag<Game24State<i64>>,
                _: &[i64; 4],
            ) -> Result<Option<Report<Option<Equation>>>, RoleError> {
                Ok(None)
            }
            fn fallback_answer(&self, _: &[i64; 4]) -> Option<Equation> {
                None
            }
        }
        let mut s = Session::new(&Scripted, vec![], [4, 5, 6, 10], cfg(50)).unwrap();
        assert_eq!(s.step().unwrap(), StepOutcome::Accepted(NodeId(1)));
        assert_eq!(s.dag().payload(NodeId(1)).unwrap().canonical_key(), "4,4,5");
    }

    #[test]
    fn exhaustive_first_candidate_follows_enumeration_order() {
        let roles = Game24Roles::<i64>::new(ProposerMode::Exhaustive, false);
        let mut s = Session::new(&roles, vec![], [4, 5, 6, 10], cfg(50)).unwrap();
        assert_eq!(s.step().unwrap(), StepOutcome::Accepted(NodeId(1)));
        let first = s.dag().payload(NodeId(1)).unwrap();
        assert_eq!(first.steps()[0].to_string(), "4 + 5 = 9");
    }

    #[test]
    fn worked_puzzle_is_solved() {
        let res = run_cr_24([4i64, 5, 6, 10], &cfg(50), ProposerMode::Exhaustive, true, &mut NullSink)
            .unwrap();
        assert_eq!(res.halted_by, HaltReason::Reporter);
        assert!(res.answer.is_some());
        // initial state plus three steps
        assert_eq!(res.derivation.len(), 4);
    }

    #[test]
    fn all_ones_fails_at_cap() {
        for prune in [false, true] {
            let res = run_cr_24([1i64, 1, 1, 1], &cfg(50), ProposerMode::Exhaustive, prune, &mut NullSink)
                .unwrap();
            assert_eq!(res.halted_by, HaltReason::IterationCap);
            assert_eq!(res.answer, None);
        }
    }

    #[test]
    fn random_mode_replays_under_seed() {
        let c = SessionConfig {
            seed: 77,
            b: 3,
            ..cfg(50)
        };
        let a = run_cr_24([2i64, 7, 12, 13], &c, ProposerMode::Random, false, &mut NullSink).unwrap();
        let b = run_cr_24([2i64, 7, 12, 13], &c, ProposerMode::Random, false, &mut NullSink).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn propose_random_is_seeded() {
        let st = Game24State::<i64>::initial(&[4, 5, 6, 10]);
        let a = propose_random(&st, &mut SessionRng::seed_from_u64(5));
        let b = propose_random(&st, &mut SessionRng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    #[should_panic(expected = "at least two numbers")]
    fn propose_random_on_singleton_panics() {
        let st = Game24State::<i64>::initial(&[7]);
        propose_random(&st, &mut SessionRng::seed_from_u64(5));
    }

    #[test]
    fn propose_random_is_uniform_over_five_steps() {
        // chi-square against uniform over the 5 enumerated steps, 4 dof;
        // 18.47 is the 0.999 quantile.
        let st = Game24State::<i64>::initial(&[10, 14]);
        let steps = st.enumerate_steps();
        assert_eq!(steps.len(), 5);
        let mut rng = SessionRng::seed_from_u64(2024);
        let draws = 10_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            let s = propose_random(&st, &mut rng);
            counts[steps.iter().position(|x| *x == s).unwrap()] += 1;
        }
        let expected = draws as f64 / 5.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 18.47, "chi2 = {chi2}, counts = {counts:?}");
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.2).abs() <= 0.02);
        }
    }
}
