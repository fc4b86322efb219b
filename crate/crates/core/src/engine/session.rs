//! The propose, verify, accumulate loop.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::SessionConfig;
use super::dag::{extract_derivation, NodeId, ReasoningDag};
use super::events::{Event, EventSink, NullSink, VerdictKind};
use super::roles::{
    assemble_context, Proposal, Proposed, Report, RoleBundle, RoleContext, SessionRng, Verdict,
};
use super::EngineError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    /// Validated non-premise nodes plus one for the initial state.
    pub visited_states: usize,
    pub proposer_calls: usize,
    pub verifier_calls: usize,
    pub reporter_calls: usize,
    pub rejected_candidates: usize,
}

impl Metrics {
    /// Sums per-branch counters. The initial state is shared, so it is
    /// counted once.
    pub fn merge<'a>(parts: impl IntoIterator<Item = &'a Metrics>) -> Metrics {
        let mut out = Metrics {
            visited_states: 1,
            ..Metrics::default()
        };
        for m in parts {
            out.visited_states += m.visited_states.saturating_sub(1);
            out.proposer_calls += m.proposer_calls;
            out.verifier_calls += m.verifier_calls;
            out.reporter_calls += m.reporter_calls;
            out.rejected_candidates += m.rejected_candidates;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Reporter,
    IterationCap,
    ProposalBudget,
}

/// Why a single branch stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchEnd {
    Reporter,
    IterationCap,
    ProposalBudget,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome<A> {
    Accepted(NodeId),
    Rejected(String),
    ReporterHalt(A),
    Exhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionResult<P, A> {
    pub answer: A,
    /// True when a reporter produced the answer.
    pub solved: bool,
    pub derivation: Vec<NodeId>,
    pub metrics: Metrics,
    pub halted_by: HaltReason,
    /// Winning branch, if any branch reported.
    pub branch: Option<usize>,
    /// DAG of the winning branch (branch 0 when nobody reported).
    pub dag: ReasoningDag<P>,
}

impl<P, A> SessionResult<P, A> {
    /// Payloads along the derivation, premises first.
    pub fn derivation_payloads(&self) -> impl Iterator<Item = &P> {
        self.derivation.iter().filter_map(|&id| self.dag.payload(id))
    }
}

/// One branch of a cumulative reasoning run.
pub struct Session<'r, R: RoleBundle> {
    roles: &'r R,
    goal: R::Goal,
    premises: Vec<R::Payload>,
    config: SessionConfig,
    branch: usize,
    dag: ReasoningDag<R::Payload>,
    cursor: R::Cursor,
    rng: SessionRng,
    metrics: Metrics,
    iterations: usize,
    started: bool,
    ended: Option<BranchEnd>,
    report: Option<Report<R::Answer>>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

impl<'r, R: RoleBundle> Session<'r, R> {
    pub fn new(
        roles: &'r R,
        premises: Vec<R::Payload>,
        goal: R::Goal,
        config: SessionConfig,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        let premises = if premises.is_empty() {
            roles.implicit_premises(&goal)
        } else {
            premises
        };
        if premises.is_empty() {
            return Err(EngineError::Config("no premises supplied".into()));
        }
        Ok(Self::branch(roles, premises, goal, config, 0))
    }

    fn branch(
        roles: &'r R,
        premises: Vec<R::Payload>,
        goal: R::Goal,
        config: SessionConfig,
        branch: usize,
    ) -> Self {
        let mut dag = ReasoningDag::new();
        for p in &premises {
            let key = roles.canonical_key(p);
            dag.add_premise(p.clone(), key);
        }
        let mut rng = SessionRng::seed_from_u64(config.seed);
        rng.set_stream(branch as u64);
        Self {
            roles,
            goal,
            premises,
            config,
            branch,
            dag,
            cursor: R::Cursor::default(),
            rng,
            metrics: Metrics {
                visited_states: 1,
                ..Metrics::default()
            },
            iterations: 0,
            started: false,
            ended: None,
            report: None,
        }
    }

    pub fn dag(&self) -> &ReasoningDag<R::Payload> {
        &self.dag
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn goal(&self) -> &R::Goal {
        &self.goal
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn ended(&self) -> Option<BranchEnd> {
        self.ended
    }

    pub fn report(&self) -> Option<&Report<R::Answer>> {
        self.report.as_ref()
    }

    fn consult_reporter(&mut self, sink: &mut dyn EventSink) -> Result<bool, EngineError> {
        let report = self.roles.report(&self.dag, &self.goal)?;
        self.metrics.reporter_calls += 1;
        if let Some(report) = report {
            sink.record(Event::Report {
                branch: self.branch,
                iteration: self.iterations,
                answer: to_value(&report.answer),
                target: report.target,
            })?;
            self.report = Some(report);
            self.ended = Some(BranchEnd::Reporter);
            return Ok(true);
        }
        Ok(false)
    }

    /// Logs the premises and gives the reporter a look before any
    /// proposal; premises alone may settle the goal.
    pub fn start(&mut self, sink: &mut dyn EventSink) -> Result<(), EngineError> {
        if self.started {
            return Ok(());
        }
        self.started = true;
        for node in self.dag.nodes() {
            sink.record(Event::Premise {
                branch: self.branch,
                node: node.id,
                payload: to_value(&node.payload),
            })?;
        }
        self.consult_reporter(sink)?;
        Ok(())
    }

    pub fn step(&mut self) -> Result<StepOutcome<R::Answer>, EngineError> {
        self.step_with(&mut NullSink)
    }

    pub fn step_with(
        &mut self,
        sink: &mut dyn EventSink,
    ) -> Result<StepOutcome<R::Answer>, EngineError> {
        if !self.started {
            self.start(sink)?;
            if let Some(r) = &self.report {
                return Ok(StepOutcome::ReporterHalt(r.answer.clone()));
            }
        }
        if self.ended.is_some() {
            return Err(EngineError::Halted);
        }

        let iteration = self.iterations + 1;
        let selection = assemble_context(&self.dag, &self.config, &mut self.rng);
        let ctx = RoleContext {
            dag: &self.dag,
            selection: &selection,
            branch: self.branch,
            iteration,
        };
        let proposed = self.roles.propose(&ctx, &mut self.cursor, &mut self.rng)?;
        self.iterations = iteration;
        self.metrics.proposer_calls += 1;

        let outcome = match proposed {
            Proposed::Exhausted => {
                self.ended = Some(BranchEnd::Exhausted);
                return Ok(StepOutcome::Exhausted);
            }
            Proposed::Malformed(note) => {
                sink.record(Event::Propose {
                    branch: self.branch,
                    iteration,
                    payload: None,
                    parents: Vec::new(),
                    note: Some(note.clone()),
                })?;
                self.reject(sink, iteration, None, note)?
            }
            Proposed::Candidate(candidate) => {
                sink.record(Event::Propose {
                    branch: self.branch,
                    iteration,
                    payload: Some(to_value(&candidate.payload)),
                    parents: candidate.parents.clone(),
                    note: None,
                })?;
                self.judge(sink, &selection, iteration, candidate)?
            }
        };

        if let StepOutcome::Accepted(_) = outcome {
            if self.consult_reporter(sink)? {
                let answer = self.report.as_ref().map(|r| r.answer.clone());
                return Ok(StepOutcome::ReporterHalt(answer.expect("report set")));
            }
            if self.dag.proposed_count() >= self.config.n {
                self.ended = Some(BranchEnd::ProposalBudget);
            }
        } else if self.config.report_every_iteration && self.consult_reporter(sink)? {
            let answer = self.report.as_ref().map(|r| r.answer.clone());
            return Ok(StepOutcome::ReporterHalt(answer.expect("report set")));
        }
        if self.ended.is_none() && self.iterations >= self.config.limit {
            self.ended = Some(BranchEnd::IterationCap);
        }
        Ok(outcome)
    }

    fn judge(
        &mut self,
        sink: &mut dyn EventSink,
        selection: &super::roles::ContextSelection,
        iteration: usize,
        candidate: Proposal<R::Payload>,
    ) -> Result<StepOutcome<R::Answer>, EngineError> {
        if let Err(e) = self.dag.check_parents(&candidate.parents) {
            return self.reject(sink, iteration, Some(candidate), format!("bad parents: {e}"));
        }
        let ctx = RoleContext {
            dag: &self.dag,
            selection,
            branch: self.branch,
            iteration,
        };
        let verdict = self.roles.verify(&ctx, &candidate)?;
        self.metrics.verifier_calls += 1;
        match verdict {
            Verdict::Rejected(note) => self.reject(sink, iteration, Some(candidate), note),
            Verdict::Validated => {
                let key = self.roles.canonical_key(&candidate.payload);
                if self.dag.contains_key(&key) {
                    return self.reject(sink, iteration, Some(candidate), "duplicate".into());
                }
                let id = self
                    .dag
                    .add_validated(candidate.payload, candidate.parents, key)?;
                self.metrics.visited_states += 1;
                sink.record(Event::Verdict {
                    branch: self.branch,
                    iteration,
                    verdict: VerdictKind::Validated,
                    node: Some(id),
                    note: None,
                })?;
                Ok(StepOutcome::Accepted(id))
            }
        }
    }

    fn reject(
        &mut self,
        sink: &mut dyn EventSink,
        iteration: usize,
        candidate: Option<Proposal<R::Payload>>,
        note: String,
    ) -> Result<StepOutcome<R::Answer>, EngineError> {
        self.metrics.rejected_candidates += 1;
        let node = candidate.map(|c| self.dag.add_rejected(c.payload, c.parents, note.clone()));
        sink.record(Event::Verdict {
            branch: self.branch,
            iteration,
            verdict: VerdictKind::Rejected,
            node,
            note: Some(note.clone()),
        })?;
        Ok(StepOutcome::Rejected(note))
    }

    /// Runs `b` branches in lockstep until one reports or all stop.
    ///
    /// This session is branch 0; branch `i` replays the same premises on
    /// rng stream `i`. The earliest reporting branch wins, ties going to
    /// the lower index.
    pub fn run(self) -> Result<SessionResult<R::Payload, R::Answer>, EngineError> {
        self.run_with(&mut NullSink)
    }

    pub fn run_with(
        self,
        sink: &mut dyn EventSink,
    ) -> Result<SessionResult<R::Payload, R::Answer>, EngineError> {
        if self.started {
            return Err(EngineError::Config("run() needs a fresh session".into()));
        }
        let roles = self.roles;
        let mut branches = Vec::with_capacity(self.config.b);
        for i in 1..self.config.b {
            branches.push(Self::branch(
                roles,
                self.premises.clone(),
                self.goal.clone(),
                self.config.clone(),
                i,
            ));
        }
        branches.insert(0, self);

        for br in branches.iter_mut() {
            br.start(sink)?;
        }
        while !branches.iter().any(|b| b.report.is_some()) {
            let mut progressed = false;
            for br in branches.iter_mut().filter(|b| b.ended.is_none()) {
                br.step_with(sink)?;
                progressed = true;
            }
            if !progressed {
                break;
            }
        }

        let metrics = Metrics::merge(branches.iter().map(|b| &b.metrics));
        let winner = branches.iter().position(|b| b.report.is_some());
        let goal = branches[0].goal.clone();
        let result = match winner {
            Some(w) => {
                let br = branches.swap_remove(w);
                let report = br.report.expect("winner has a report");
                let derivation = match report.target {
                    Some(t) => extract_derivation(&br.dag, t)?,
                    None => Vec::new(),
                };
                SessionResult {
                    answer: report.answer,
                    solved: true,
                    derivation,
                    metrics,
                    halted_by: HaltReason::Reporter,
                    branch: Some(w),
                    dag: br.dag,
                }
            }
            None => {
                let all_budget = branches
                    .iter()
                    .all(|b| b.ended == Some(BranchEnd::ProposalBudget));
                let halted_by = if all_budget {
                    HaltReason::ProposalBudget
                } else {
                    HaltReason::IterationCap
                };
                let br = branches.swap_remove(0);
                SessionResult {
                    answer: roles.fallback_answer(&goal),
                    solved: false,
                    derivation: Vec::new(),
                    metrics,
                    halted_by,
                    branch: None,
                    dag: br.dag,
                }
            }
        };
        sink.record(Event::Halt {
            halted_by: result.halted_by,
            branch: result.branch,
            answer: to_value(&result.answer),
            solved: result.solved,
            derivation: result.derivation.clone(),
            metrics: result.metrics,
            item: None,
            correct: None,
        })?;
        Ok(result)
    }
}
