//! Cumulative reasoning: a proposer, a verifier and a reporter grow a DAG of
//! validated propositions until the reporter can answer.
//!
//! [`engine`] is domain-agnostic. [`game24`] and [`logic`] are symbolic
//! domains with exact verifiers; [`theory`] checks the arrival-probability
//! comparison between CoT-SC, ToT and CR.
//!
//! Arithmetic is generic over the integer type behind [`game24::Rational`];
//! the closed forms in [`theory`] are generic over `num_traits::Float`. The
//! aliases below fix the usual choices.

pub mod engine;
pub mod game24;
pub mod logic;
pub mod theory;

pub type Rational64 = game24::Rational<i64>;
pub type Rational32 = game24::Rational<i32>;
pub type Game24State64 = game24::Game24State<i64>;
pub type ArithStep64 = game24::ArithStep<i64>;
pub type Game24Roles64 = game24::Game24Roles<i64>;
pub type Lemma1Check64 = theory::Lemma1Check<f64>;
