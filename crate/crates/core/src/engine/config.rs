use serde::{Deserialize, Serialize};

use super::EngineError;

/// Which premises a proposer sees on each call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextPolicy {
    /// Every premise and every validated proposition.
    #[default]
    FullHistory,
    /// Two premises drawn without replacement, plus every validated
    /// proposition.
    RandomPremisePair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Maximum validated propositions per branch.
    pub n: usize,
    /// Majority-voting repetitions.
    pub k: usize,
    /// Independent branches.
    pub b: usize,
    /// Iteration cap per branch.
    pub limit: usize,
    pub temperature_propose: f64,
    pub temperature_vote: f64,
    pub seed: u64,
    pub context_policy: ContextPolicy,
    /// Also consult the reporter after rejected iterations.
    #[serde(default)]
    pub report_every_iteration: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n: 50,
            k: 1,
            b: 1,
            limit: 50,
            temperature_propose: 0.1,
            temperature_vote: 0.7,
            seed: 0,
            context_policy: ContextPolicy::FullHistory,
            report_every_iteration: false,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: &str| Err(EngineError::Config(msg.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.b == 0 {
            return bad("b must be at least 1");
        }
        if self.limit == 0 {
            return bad("limit must be at least 1");
        }
        let temp_ok = |t: f64| t.is_finite() && t >= 0.0;
        if !temp_ok(self.temperature_propose) || !temp_ok(self.temperature_vote) {
            return bad("temperatures must be finite and non-negative");
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
