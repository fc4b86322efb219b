//! Arrival probabilities of CoT-SC, ToT and CR on a two-stage process:
//! closed forms, Monte Carlo estimates and the Game of 24 stage
//! decomposition.

mod closed_form;
mod conceptual;
mod sim;

pub use closed_form::{
    check_lemma1, lemma1_grid, p_cot_sc, p_cr, p_stage_boosted, p_tot, Lemma1Check,
    ANALYTIC_TOLERANCE,
};
pub use conceptual::{conceptual_experiment, ConceptualReport};
pub use sim::{
    ordering_sweep, random_parameterization, simulate, simulate_all, simulate_shard,
    ArrivalEstimates, CrBoostSchedule, Estimate, Method, StageParams, SweepRow,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("invalid configuration: {0}")]
    Config(String),
}
