use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::parse::parse_statement;
use super::rules::{derive, InferenceRule};
use super::statement::{Label, Statement};
use super::LogicError;
use crate::engine::{
    majority_vote, EngineError, EventSink, NodeId, Proposal, Proposed, ReasoningDag, Report,
    RoleBundle, RoleContext, RoleError, Session, SessionConfig, SessionResult, SessionRng, Verdict,
};

/// A statement with the rule that produced it; parents live in the DAG.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicStep {
    pub statement: Statement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<InferenceRule>,
}

impl LogicStep {
    pub fn premise(statement: Statement) -> Self {
        Self {
            statement,
            rule: None,
        }
    }

    pub fn derived(statement: Statement, rule: InferenceRule) -> Self {
        Self {
            statement,
            rule: Some(rule),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposePolicy {
    /// First untried application in rule order, then antecedent order.
    #[default]
    Systematic,
    /// Uniform over untried applications.
    Sampled,
}

/// One rule application the proposer could make.
#[derive(Clone, Debug, PartialEq)]
pub struct Application {
    pub rule: InferenceRule,
    pub antecedents: Vec<NodeId>,
    pub conclusion: Statement,
}

impl Application {
    fn key(&self) -> String {
        let ids: Vec<String> = self.antecedents.iter().map(|i| i.0.to_string()).collect();
        format!("{}|{}|{}", self.rule, ids.join(","), self.conclusion)
    }
}

/// Every application over `context` whose conclusion is not yet in `dag`,
/// in canonical order.
pub fn applications(
    dag: &ReasoningDag<LogicStep>,
    context: &[(NodeId, &LogicStep)],
) -> Vec<Application> {
    let mut out = Vec::new();
    for rule in InferenceRule::ALL {
        let tuples: Vec<Vec<usize>> = match rule.arity() {
            1 => (0..context.len()).map(|i| vec![i]).collect(),
            _ => (0..context.len())
                .flat_map(|i| (0..context.len()).filter(move |&j| j != i).map(move |j| vec![i, j]))
                .collect(),
        };
        for t in tuples {
            let stmts: Vec<Statement> = t.iter().map(|&i| context[i].1.statement.clone()).collect();
            for conclusion in derive(rule, &stmts) {
                if dag.contains_key(&conclusion.to_string()) {
                    continue;
                }
                out.push(Application {
                    rule,
                    antecedents: t.iter().map(|&i| context[i].0).collect(),
                    conclusion,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct LogicRoles {
    pub policy: ProposePolicy,
}

#[derive(Default)]
pub struct LogicCursor {
    tried: HashSet<String>,
}

impl RoleBundle for LogicRoles {
    type Payload = LogicStep;
    type Goal = Statement;
    type Answer = Label;
    type Cursor = LogicCursor;

    fn canonical_key(&self, payload: &LogicStep) -> String {
        payload.statement.canonical_key()
    }

    fn propose(
        &self,
        ctx: &RoleContext<'_, LogicStep>,
        cursor: &mut LogicCursor,
        rng: &mut SessionRng,
    ) -> Result<Proposed<LogicStep>, RoleError> {
        let context: Vec<(NodeId, &LogicStep)> = ctx.payloads().collect();
        let open: Vec<Application> = applications(ctx.dag, &context)
            .into_iter()
            .filter(|a| !cursor.tried.contains(&a.key()))
            .collect();
        let pick = match self.policy {
            ProposePolicy::Systematic => open.into_iter().next(),
            ProposePolicy::Sampled => open.choose(rng).cloned(),
        };
        Ok(match pick {
            Some(app) => {
                cursor.tried.insert(app.key());
                Proposed::Candidate(Proposal {
                    payload: LogicStep::derived(app.conclusion, app.rule),
                    parents: app.antecedents,
                })
            }
            None => Proposed::Exhausted,
        })
    }

    fn verify(
        &self,
        ctx: &RoleContext<'_, LogicStep>,
        candidate: &Proposal<LogicStep>,
    ) -> Result<Verdict, RoleError> {
        Ok(verify_step(ctx.dag, &ctx.selection.nodes, candidate))
    }

    fn report(
        &self,
        dag: &ReasoningDag<LogicStep>,
        hypothesis: &Statement,
    ) -> Result<Option<Report<Label>>, RoleError> {
        let found = |s: &Statement| dag.find_key(&s.canonical_key());
        Ok(if let Some(id) = found(hypothesis) {
            Some(Report {
                answer: Label::True,
                target: Some(id),
            })
        } else {
            found(&hypothesis.negated()).map(|id| Report {
                answer: Label::False,
                target: Some(id),
            })
        })
    }

    fn fallback_answer(&self, _goal: &Statement) -> Label {
        Label::Unknown
    }
}

/// Validated iff every antecedent is in `context` and the declared rule
/// yields the candidate from them.
pub fn verify_step(
    dag: &ReasoningDag<LogicStep>,
    context: &[NodeId],
    candidate: &Proposal<LogicStep>,
) -> Verdict {
    let Some(rule) = candidate.payload.rule else {
        return Verdict::Rejected("no rule given".into());
    };
    if candidate.parents.len() != rule.arity() {
        return Verdict::Rejected(format!("{rule} takes {} antecedents", rule.arity()));
    }
    let mut antecedents = Vec::with_capacity(candidate.parents.len());
    for id in &candidate.parents {
        match dag.get(*id) {
            Some(n) if n.is_validated() && context.contains(id) => {
                antecedents.push(n.payload.statement.clone())
            }
            _ => return Verdict::Rejected(format!("antecedent {id} not in context")),
        }
    }
    let want = candidate.payload.statement.canonical();
    if derive(rule, &antecedents).contains(&want) {
        Verdict::Validated
    } else {
        Verdict::Rejected(format!("{rule} does not yield {want}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicProblem {
    pub premises: Vec<Statement>,
    pub hypothesis: Statement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold_label: Option<Label>,
}

impl LogicProblem {
    pub fn new(
        premises: Vec<Statement>,
        hypothesis: Statement,
        gold_label: Option<Label>,
    ) -> Result<Self, LogicError> {
        if premises.is_empty() {
            return Err(LogicError::NoPremises);
        }
        Ok(Self {
            premises,
            hypothesis,
            gold_label,
        })
    }
}

/// A problem as written in a problem file, before parsing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemText {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub premises: Vec<String>,
    pub hypothesis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl ProblemText {
    pub fn parse(&self) -> Result<LogicProblem, LogicError> {
        let premises = self
            .premises
            .iter()
            .map(|p| parse_statement(p))
            .collect::<Result<Vec<_>, _>>()?;
        LogicProblem::new(premises, parse_statement(&self.hypothesis)?, self.label)
    }
}

/// Reads a JSON problem file: one object or an array of objects.
pub fn load_problems(path: &Path) -> Result<Vec<ProblemText>, LogicError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok(match value {
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        _ => vec![serde_json::from_value(value)?],
    })
}

pub type LogicResult = SessionResult<LogicStep, Label>;

pub fn run_logic(
    problem: &LogicProblem,
    config: &SessionConfig,
    policy: ProposePolicy,
    sink: &mut dyn EventSink,
) -> Result<LogicResult, EngineError> {
    let roles = LogicRoles { policy };
    let premises = problem.premises.iter().cloned().map(LogicStep::premise).collect();
    Session::new(&roles, premises, problem.hypothesis.clone(), config.clone())?.run_with(sink)
}

/// `config.k` independent runs on seeds `seed, seed+1, ...` and their
/// majority label.
pub fn run_logic_voted(
    problem: &LogicProblem,
    config: &SessionConfig,
    policy: ProposePolicy,
    sink: &mut dyn EventSink,
) -> Result<(Label, Vec<LogicResult>), EngineError> {
    config.validate()?;
    let runs = (0..config.k)
        .map(|i| {
            let cfg = config.clone().with_seed(config.seed.wrapping_add(i as u64));
            run_logic(problem, &cfg, policy, sink)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<Label> = runs.iter().map(|r| r.answer).collect();
    Ok((majority_vote(&labels)?, runs))
}
