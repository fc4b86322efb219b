//! Role contracts a domain (symbolic or model-backed) implements.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::config::{ContextPolicy, SessionConfig};
use super::dag::{NodeId, ReasoningDag};

/// Per-branch random stream. Branch `i` of a run seeded with `s` uses
/// ChaCha8 seeded with `s` on stream `i`.
pub type SessionRng = ChaCha8Rng;

/// A candidate step with its declared parents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proposal<P> {
    pub payload: P,
    pub parents: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Proposed<P> {
    Candidate(Proposal<P>),
    /// The proposer produced something that could not be read as a payload.
    Malformed(String),
    /// Nothing left to propose in this branch.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "note", rename_all = "snake_case")]
pub enum Verdict {
    Validated,
    Rejected(String),
}

impl Verdict {
    pub fn is_validated(&self) -> bool {
        matches!(self, Verdict::Validated)
    }
}

/// A reporter's conclusion. `target` is the node the answer rests on, when
/// there is one; its ancestor closure becomes the derivation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<A> {
    pub answer: A,
    pub target: Option<NodeId>,
}

/// Failure inside a role backend (transport, protocol). Distinct from a
/// rejected candidate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{role} backend failed: {message}")]
pub struct RoleError {
    pub role: &'static str,
    pub message: String,
}

impl RoleError {
    pub fn new(role: &'static str, message: impl fmt::Display) -> Self {
        Self {
            role,
            message: message.to_string(),
        }
    }
}

/// The nodes a proposer is allowed to condition on for one call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSelection {
    pub nodes: Vec<NodeId>,
}

/// What a role sees on each call.
pub struct RoleContext<'a, P> {
    pub dag: &'a ReasoningDag<P>,
    pub selection: &'a ContextSelection,
    pub branch: usize,
    pub iteration: usize,
}

impl<'a, P> RoleContext<'a, P> {
    /// Selected payloads in selection order.
    pub fn payloads(&self) -> impl Iterator<Item = (NodeId, &'a P)> + '_ {
        self.selection
            .nodes
            .iter()
            .filter_map(|&id| self.dag.payload(id).map(|p| (id, p)))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.selection.nodes.contains(&id)
    }

    /// Previously rejected candidates, for proposers that avoid repeats.
    pub fn rejected(&self) -> impl Iterator<Item = &'a P> {
        self.dag.rejected().map(|n| &n.payload)
    }
}

/// The proposer, verifier and reporter for one domain.
///
/// Implementations must be deterministic given their inputs, the cursor,
/// and the rng stream; replaying a run under the same seed must reproduce
/// it exactly.
pub trait RoleBundle {
    type Payload: Clone + fmt::Debug + Serialize;
    type Goal: Clone + fmt::Debug + Serialize;
    type Answer: Clone + fmt::Debug + PartialEq + Serialize;
    /// Per-branch proposer memory.
    type Cursor: Default;

    /// Key under which duplicate payloads are detected.
    fn canonical_key(&self, payload: &Self::Payload) -> String;

    /// Roots to insert when the caller supplies no premises.
    fn implicit_premises(&self, _goal: &Self::Goal) -> Vec<Self::Payload> {
        Vec::new()
    }

    fn propose(
        &self,
        ctx: &RoleContext<'_, Self::Payload>,
        cursor: &mut Self::Cursor,
        rng: &mut SessionRng,
    ) -> Result<Proposed<Self::Payload>, RoleError>;

    fn verify(
        &self,
        ctx: &RoleContext<'_, Self::Payload>,
        candidate: &Proposal<Self::Payload>,
    ) -> Result<Verdict, RoleError>;

    fn report(
        &self,
        dag: &ReasoningDag<Self::Payload>,
        goal: &Self::Goal,
    ) -> Result<Option<Report<Self::Answer>>, RoleError>;

    /// Answer for a branch set that ends without a report.
    fn fallback_answer(&self, goal: &Self::Goal) -> Self::Answer;
}

/// Picks the nodes the proposer may use on this iteration.
pub fn assemble_context<P>(
    dag: &ReasoningDag<P>,
    config: &SessionConfig,
    rng: &mut SessionRng,
) -> ContextSelection {
    let premises = dag.premise_ids();
    let chosen_premises: Vec<NodeId> = match config.context_policy {
        ContextPolicy::FullHistory => premises.to_vec(),
        ContextPolicy::RandomPremisePair => {
            let amount = premises.len().min(2);
            let mut picked: Vec<NodeId> = sample(rng, premises.len(), amount)
                .into_iter()
                .map(|i| premises[i])
                .collect();
            picked.sort();
            picked
        }
    };
    let mut nodes = chosen_premises;
    nodes.extend(
        dag.validated()
            .filter(|n| n.origin == super::dag::Origin::Proposed)
            .map(|n| n.id),
    );
    nodes.sort();
    ContextSelection { nodes }
}
