use std::fs;
use std::path::Path;

use cr_core::engine::{
    majority_vote, EngineError, EventSink, Origin, Proposal, Proposed, ReasoningDag, Report,
    RoleBundle, RoleContext, RoleError, Session, SessionConfig, SessionResult, SessionRng, Verdict,
};
use cr_core::logic::{Label, ProblemText};

use crate::client::ChatClient;
use crate::parse::{parse_label, parse_verdict};
use crate::template::{bindings, builtin, render_prompt, PromptTemplate};
use crate::LlmError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicTemplates {
    pub proposer: PromptTemplate,
    pub verifier: PromptTemplate,
    pub reporter: PromptTemplate,
}

impl LogicTemplates {
    pub fn builtin() -> Self {
        Self {
            proposer: builtin::folio_proposer(),
            verifier: builtin::folio_verifier(),
            reporter: builtin::folio_reporter(),
        }
    }

    /// Reads `folio-proposer.txt`, `folio-verifier.txt` and
    /// `folio-reporter.txt` from `dir`; a missing file falls back to the
    /// bundled template.
    pub fn from_dir(dir: &Path) -> Result<Self, LlmError> {
        let load = |name: &str, fallback: fn() -> PromptTemplate| -> Result<PromptTemplate, LlmError> {
            let path = dir.join(name);
            if path.exists() {
                PromptTemplate::parse(&fs::read_to_string(path)?)
            } else {
                Ok(fallback())
            }
        };
        let t = Self {
            proposer: load("folio-proposer.txt", builtin::folio_proposer)?,
            verifier: load("folio-verifier.txt", builtin::folio_verifier)?,
            reporter: load("folio-reporter.txt", builtin::folio_reporter)?,
        };
        t.check()?;
        Ok(t)
    }

    /// Checks each template declares the slots the adapters bind.
    pub fn check(&self) -> Result<(), LlmError> {
        let need: [(&PromptTemplate, &[&str]); 3] = [
            (&self.proposer, &["premises", "hypothesis"]),
            (&self.verifier, &["premises", "proposition"]),
            (&self.reporter, &["premises", "hypothesis", "propositions"]),
        ];
        for (t, slots) in need {
            if let Some(s) = slots.iter().find(|s| !t.slots.iter().any(|d| d == *s)) {
                return Err(LlmError::Template {
                    template: t.id.clone(),
                    message: format!("missing slot {s}"),
                });
            }
        }
        Ok(())
    }
}

/// Proposer, verifier and reporter backed by one chat endpoint. Payloads
/// are natural-language propositions; one bundle serves one hypothesis.
pub struct LlmLogicRoles<'c> {
    client: &'c ChatClient,
    templates: LogicTemplates,
    hypothesis: String,
    temperature: f64,
}

impl<'c> LlmLogicRoles<'c> {
    pub fn new(
        client: &'c ChatClient,
        templates: LogicTemplates,
        hypothesis: impl Into<String>,
        temperature: f64,
    ) -> Result<Self, LlmError> {
        templates.check()?;
        Ok(Self {
            client,
            templates,
            hypothesis: hypothesis.into(),
            temperature,
        })
    }

    fn ask(&self, role: &'static str, t: &PromptTemplate, pairs: [(&str, String); 2]) -> Result<String, RoleError> {
        self.ask_with(role, t, pairs.into_iter())
    }

    fn ask_with<'a>(
        &self,
        role: &'static str,
        t: &PromptTemplate,
        pairs: impl Iterator<Item = (&'a str, String)>,
    ) -> Result<String, RoleError> {
        let msgs = render_prompt(t, &bindings(pairs)).map_err(|e| RoleError::new(role, e))?;
        self.client
            .complete_at(&msgs, self.temperature)
            .map(|c| c.content)
            .map_err(|e| RoleError::new(role, e))
    }
}

/// Text after the last `"Proposition":` cue, first non-blank line, with
/// surrounding quotes removed.
pub fn extract_proposition(text: &str) -> Option<String> {
    let tail = match text.rfind("\"Proposition\":") {
        Some(i) => &text[i + "\"Proposition\":".len()..],
        None => text,
    };
    let line = tail.lines().map(str::trim).find(|l| !l.is_empty())?;
    let stripped = line.trim_matches(|c: char| c == '"' || c == '\u{201c}' || c == '\u{201d}' || c.is_whitespace());
    (!stripped.is_empty()).then(|| stripped.to_string())
}

/// Lowercase, single spaces, no trailing period.
pub fn normalize_proposition(text: &str) -> String {
    let joined = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    joined.trim_end_matches('.').to_string()
}

fn join<'a>(items: impl Iterator<Item = &'a String>) -> String {
    items.map(String::as_str).collect::<Vec<_>>().join(" ")
}

impl RoleBundle for LlmLogicRoles<'_> {
    type Payload = String;
    type Goal = String;
    type Answer = Label;
    type Cursor = ();

    fn canonical_key(&self, payload: &String) -> String {
        normalize_proposition(payload)
    }

    fn propose(
        &self,
        ctx: &RoleContext<'_, String>,
        _: &mut (),
        _: &mut SessionRng,
    ) -> Result<Proposed<String>, RoleError> {
        let premises = join(ctx.payloads().map(|(_, p)| p));
        let out = self.ask(
            "proposer",
            &self.templates.proposer,
            [("premises", premises), ("hypothesis", self.hypothesis.clone())],
        )?;
        Ok(match extract_proposition(&out) {
            Some(p) => Proposed::Candidate(Proposal {
                payload: p,
                parents: ctx.selection.nodes.clone(),
            }),
            None => Proposed::Malformed(out),
        })
    }

    fn verify(&self, ctx: &RoleContext<'_, String>, candidate: &Proposal<String>) -> Result<Verdict, RoleError> {
        let parents: Option<Vec<&String>> = candidate.parents.iter().map(|&id| ctx.dag.payload(id)).collect();
        let Some(parents) = parents else {
            return Ok(Verdict::Rejected("unknown parent".into()));
        };
        let out = self.ask(
            "verifier",
            &self.templates.verifier,
            [
                ("premises", join(parents.into_iter())),
                ("proposition", candidate.payload.clone()),
            ],
        )?;
        Ok(parse_verdict(&out))
    }

    fn report(&self, dag: &ReasoningDag<String>, goal: &String) -> Result<Option<Report<Label>>, RoleError> {
        let premises = join(dag.premise_ids().iter().filter_map(|&id| dag.payload(id)));
        let derived: Vec<_> = dag.validated().filter(|n| n.origin == Origin::Proposed).collect();
        let out = self.ask_with(
            "reporter",
            &self.templates.reporter,
            [
                ("premises", premises),
                ("hypothesis", goal.clone()),
                ("propositions", join(derived.iter().map(|n| &n.payload))),
            ]
            .into_iter(),
        )?;
        Ok(match parse_label(&out) {
            Label::Unknown => None,
            answer => Some(Report {
                answer,
                target: derived.last().map(|n| n.id),
            }),
        })
    }

    fn fallback_answer(&self, _: &String) -> Label {
        Label::Unknown
    }
}

pub type LlmLogicResult = SessionResult<String, Label>;

/// One session at `temperature`.
pub fn run_llm_logic_at(
    client: &ChatClient,
    templates: &LogicTemplates,
    problem: &ProblemText,
    config: &SessionConfig,
    temperature: f64,
    sink: &mut dyn EventSink,
) -> Result<LlmLogicResult, EngineError> {
    let roles = LlmLogicRoles::new(client, templates.clone(), problem.hypothesis.clone(), temperature)
        .map_err(|e| EngineError::Config(e.to_string()))?;
    Session::new(&roles, problem.premises.clone(), problem.hypothesis.clone(), config.clone())?.run_with(sink)
}

/// One session at the proposing temperature.
pub fn run_llm_logic(
    client: &ChatClient,
    templates: &LogicTemplates,
    problem: &ProblemText,
    config: &SessionConfig,
    sink: &mut dyn EventSink,
) -> Result<LlmLogicResult, EngineError> {
    run_llm_logic_at(client, templates, problem, config, config.temperature_propose, sink)
}

/// `config.k` sessions on seeds `seed, seed+1, ...` and their majority
/// label. With `k > 1` the runs sample at the voting temperature.
pub fn run_llm_logic_voted(
    client: &ChatClient,
    templates: &LogicTemplates,
    problem: &ProblemText,
    config: &SessionConfig,
    sink: &mut dyn EventSink,
) -> Result<(Label, Vec<LlmLogicResult>), EngineError> {
    config.validate()?;
    let temperature = if config.k > 1 {
        config.temperature_vote
    } else {
        config.temperature_propose
    };
    let runs = (0..config.k)
        .map(|i| {
            let cfg = config.clone().with_seed(config.seed.wrapping_add(i as u64));
            run_llm_logic_at(client, templates, problem, &cfg, temperature, sink)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<Label> = runs.iter().map(|r| r.answer).collect();
    Ok((majority_vote(&labels)?, runs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proposition_extraction() {
        assert_eq!(
            extract_proposition("\"Proposition\": \"Rock is a bird.\"").as_deref(),
            Some("Rock is a bird.")
        );
        assert_eq!(extract_proposition("  Rock can fly.\nbecause...").as_deref(), Some("Rock can fly."));
        assert_eq!(extract_proposition("\"Proposition\": \"\""), None);
        assert_eq!(extract_proposition("   "), None);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_proposition("Rock  is a\nBird."), "rock is a bird");
    }

    #[test]
    fn templates_load_from_a_directory() {
        let dir = std::env::temp_dir().join(format!("cr-llm-templates-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let custom = "@id mine\n@slots premises proposition\n@system\nJudge.\n@user\n{{premises}} => {{proposition}}\n@assistant\n<<generate>>\n";
        fs::write(dir.join("folio-verifier.txt"), custom).unwrap();
        let t = LogicTemplates::from_dir(&dir).unwrap();
        assert_eq!(t.verifier.id, "mine");
        assert_eq!(t.proposer, builtin::folio_proposer());
        fs::write(dir.join("folio-reporter.txt"), custom).unwrap();
        assert!(LogicTemplates::from_dir(&dir).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn builtin_templates_fit_the_adapters() {
        LogicTemplates::builtin().check().unwrap();
        let mut bad = LogicTemplates::builtin();
        bad.verifier = builtin::game24_reporter();
        assert!(bad.check().is_err());
    }
}
