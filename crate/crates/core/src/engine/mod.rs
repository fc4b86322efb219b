//! Domain-agnostic cumulative reasoning engine.
//!
//! A [`Session`] owns one branch: a [`ReasoningDag`] seeded with premises,
//! a proposer cursor and an rng stream. Each [`Session::step`] asks the
//! proposer for one candidate, asks the verifier about it, and appends it
//! to the DAG only if it is validated and not a duplicate. The reporter is
//! consulted once before the first proposal and after every accepted node.

mod config;
mod dag;
mod events;
mod roles;
mod session;
mod vote;

pub use config::{ContextPolicy, SessionConfig};
pub use dag::{extract_derivation, NodeId, NodeVerdict, Origin, PropositionNode, ReasoningDag};
pub use events::{parse_event, write_event, Event, EventSink, JsonlSink, NullSink, VerdictKind};
pub use roles::{
    assemble_context, ContextSelection, Proposal, Proposed, Report, RoleBundle, RoleContext,
    RoleError, SessionRng, Verdict,
};
pub use session::{BranchEnd, HaltReason, Metrics, Session, SessionResult, StepOutcome};
pub use vote::majority_vote;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not validated")]
    RejectedParent(NodeId),
    #[error("parent {0} listed twice")]
    DuplicateParent(NodeId),
    #[error(transparent)]
    Role(#[from] RoleError),
    #[error("session already halted")]
    Halted,
    #[error("majority vote over no answers")]
    EmptyVote,
    #[error("event log: {0}")]
    Io(#[from] std::io::Error),
}
