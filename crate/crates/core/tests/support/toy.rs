//! Toy domain for engine property tests: numbers mod 97.

use cr_core::engine::{
    ContextPolicy, NodeId, Proposal, Proposed, ReasoningDag, Report, RoleBundle, RoleContext,
    RoleError, SessionConfig, SessionRng, Verdict,
};
use rand::Rng;

/// Numbers mod 97; candidates combine random (sometimes invalid) parents.
pub struct Toy {
    pub reject_mod: u64,
}

impl RoleBundle for Toy {
    type Payload = u64;
    type Goal = u64;
    type Answer = u64;
    type Cursor = ();

    fn canonical_key(&self, p: &u64) -> String {
        p.to_string()
    }

    fn propose(
        &self,
        ctx: &RoleContext<'_, u64>,
        _: &mut (),
        rng: &mut SessionRng,
    ) -> Result<Proposed<u64>, RoleError> {
        let roll = rng.gen_range(0..20);
        if roll == 0 {
            return Ok(Proposed::Malformed("garbled".into()));
        }
        if roll == 1 && rng.gen_bool(0.2) {
            return Ok(Proposed::Exhausted);
        }
        let k = rng.gen_range(1..=3);
        let span = ctx.dag.len() + 2;
        let parents: Vec<NodeId> = (0..k).map(|_| NodeId(rng.gen_range(0..span))).collect();
        let sum: u64 = parents.iter().filter_map(|&p| ctx.dag.payload(p)).sum();
        Ok(Proposed::Candidate(Proposal {
            payload: (sum + rng.gen_range(0..7)) % 97,
            parents,
        }))
    }

    fn verify(&self, _: &RoleContext<'_, u64>, c: &Proposal<u64>) -> Result<Verdict, RoleError> {
        Ok(if c.payload % self.reject_mod == 0 {
            Verdict::Rejected("divisible".into())
        } else {
            Verdict::Validated
        })
    }

    fn report(&self, dag: &ReasoningDag<u64>, goal: &u64) -> Result<Option<Report<u64>>, RoleError> {
        Ok(dag.find_key(&goal.to_string()).map(|id| Report {
            answer: *goal,
            target: Some(id),
        }))
    }

    fn fallback_answer(&self, _: &u64) -> u64 {
        u64::MAX
    }
}

pub fn random_config(rng: &mut impl Rng) -> SessionConfig {
    SessionConfig {
        n: rng.gen_range(1..=30),
        b: rng.gen_range(1..=4),
        limit: rng.gen_range(1..=40),
        seed: rng.gen(),
        context_policy: if rng.gen_bool(0.5) {
            ContextPolicy::FullHistory
        } else {
            ContextPolicy::RandomPremisePair
        },
        report_every_iteration: rng.gen_bool(0.2),
        ..SessionConfig::default()
    }
}
