//! Restricted first-order logic as a symbolic domain.

mod parse;
mod roles;
mod rules;
mod statement;

pub use parse::{parse_english, parse_formula, parse_statement};
pub use roles::{
    applications, load_problems, run_logic, run_logic_voted, verify_step, Application,
    LogicCursor, LogicProblem, LogicResult, LogicRoles, LogicStep, ProblemText, ProposePolicy,
};
pub use rules::{apply_rule, derive, InferenceRule};
pub use statement::{eval_propositional, Assignment, GroundAtom, Label, Statement, Term};

#[derive(Debug, thiserror::Error)]
pub enum LogicError {
    #[error("cannot parse {input:?}: {message}")]
    Parse { input: String, message: String },
    #[error("malformed statement: {0}")]
    Malformed(String),
    #[error("atom {0} has no truth value")]
    Unassigned(String),
    #[error("cannot evaluate quantified formula {0}")]
    Quantified(String),
    #[error("universal expanded over an empty domain")]
    EmptyDomain,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("a problem needs at least one premise")]
    NoPremises,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
