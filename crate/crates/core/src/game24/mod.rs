//! Game of 24 as a symbolic domain: exact states, step enumeration, a
//! brute-force oracle and the role bundle.

mod oracle;
mod rational;
mod roles;
mod state;

pub use oracle::{can_reach_target, oracle_solvable, reachable_values};
pub use rational::{ParseRationalError, Rational, RationalInt};
pub use roles::{
    propose_random, run_cr_24, verify_step, Game24Cursor, Game24Result, Game24Roles, ProposerMode,
};
pub use state::{ArithStep, Equation, Expr, Game24State, Op, ParseStepError, StepRejection, TARGET};
