//! Few-shot prompt templates stored as text files.
//!
//! ```text
//! @id folio-verifier
//! @slots premises proposition
//! @system
//! ...system text...
//! @user
//! "Premises": "{{premises}}"
//! @assistant
//! "Judgement": "Is this deduction valid? <<generate>>"
//! ```
//!
//! `{{name}}` is a slot. `<<generate>>` marks where the model takes over:
//! rendering cuts the turn holding the first marker at that point and drops
//! every later turn.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::LlmError;

pub const GENERATE: &str = "<<generate>>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::new(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::new(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::new(Role::Assistant, content)
    }
}

pub type Bindings = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptTemplate {
    pub id: String,
    pub system_text: String,
    /// Few-shot turns followed by the schema turns, verbatim.
    pub turns: Vec<ChatMessage>,
    pub slots: Vec<String>,
}

/// Splits `text` into literal pieces and slot names.
enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn pieces(text: &str) -> Result<Vec<Piece<'_>>, String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("{{") {
        out.push(Piece::Text(&rest[..open]));
        let after = &rest[open + 2..];
        let close = after
            .find("}}")
            .ok_or_else(|| format!("unclosed slot near {:?}", &rest[open..]))?;
        let name = after[..close].trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(format!("bad slot name {:?}", &after[..close]));
        }
        out.push(Piece::Slot(name));
        rest = &after[close + 2..];
    }
    out.push(Piece::Text(rest));
    Ok(out)
}

fn substitute(text: &str, bindings: &Bindings) -> String {
    let mut out = String::with_capacity(text.len());
    // templates are validated on construction, so every slot parses
    for piece in pieces(text).unwrap_or_default() {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Slot(name) => out.push_str(bindings.get(name).map_or("", String::as_str)),
        }
    }
    out
}

impl PromptTemplate {
    pub fn new(
        id: impl Into<String>,
        system_text: impl Into<String>,
        turns: Vec<ChatMessage>,
        slots: Vec<String>,
    ) -> Result<Self, LlmError> {
        let t = Self {
            id: id.into(),
            system_text: system_text.into(),
            turns,
            slots,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<(), LlmError> {
        let err = |message: String| LlmError::Template {
            template: self.id.clone(),
            message,
        };
        if self.system_text.trim().is_empty() {
            return Err(err("empty system text".into()));
        }
        let texts = std::iter::once(&self.system_text).chain(self.turns.iter().map(|m| &m.content));
        for text in texts {
            for piece in pieces(text).map_err(err)? {
                if let Piece::Slot(name) = piece {
                    if !self.slots.iter().any(|s| s == name) {
                        return Err(err(format!("slot {name} is used but not declared")));
                    }
                }
            }
        }
        for m in &self.turns {
            if m.role == Role::System {
                return Err(err("system text belongs in @system".into()));
            }
            if m.role == Role::User && m.content.trim().is_empty() {
                return Err(err("empty user turn".into()));
            }
        }
        if !self.turns.iter().any(|m| m.content.contains(GENERATE)) {
            return Err(err(format!("no {GENERATE} marker")));
        }
        Ok(())
    }

    /// Reads the `@`-directive format described in the module docs.
    pub fn parse(text: &str) -> Result<Self, LlmError> {
        let mut id = None;
        let mut slots = Vec::new();
        let mut system = None;
        let mut turns = Vec::new();
        let mut current: Option<(Option<Role>, Vec<&str>)> = None;
        let flush = |cur: Option<(Option<Role>, Vec<&str>)>,
                         system: &mut Option<String>,
                         turns: &mut Vec<ChatMessage>| {
            if let Some((role, lines)) = cur {
                let body = lines.join("\n").trim_matches('\n').to_string();
                match role {
                    None => *system = Some(body),
                    Some(r) => turns.push(ChatMessage::new(r, body)),
                }
            }
        };
        let bad = |message: String| LlmError::Template {
            template: "<unnamed>".into(),
            message,
        };
        for line in text.lines() {
            let Some(directive) = line.strip_prefix('@') else {
                match current.as_mut() {
                    Some((_, lines)) => lines.push(line),
                    None if line.trim().is_empty() => {}
                    None => return Err(bad(format!("text before the first turn: {line:?}"))),
                }
                continue;
            };
            let (name, arg) = directive.split_once(' ').unwrap_or((directive, ""));
            match name.trim() {
                "id" => id = Some(arg.trim().to_string()),
                "slots" => slots = arg.split_whitespace().map(String::from).collect(),
                "system" | "user" | "assistant" => {
                    flush(current.take(), &mut system, &mut turns);
                    let role = match name.trim() {
                        "system" => None,
                        "user" => Some(Role::User),
                        _ => Some(Role::Assistant),
                    };
                    current = Some((role, Vec::new()));
                }
                other => return Err(bad(format!("unknown directive @{other}"))),
            }
        }
        flush(current.take(), &mut system, &mut turns);
        let id = id.ok_or_else(|| bad("missing @id".into()))?;
        let system = system.ok_or_else(|| LlmError::Template {
            template: id.clone(),
            message: "missing @system".into(),
        })?;
        Self::new(id, system, turns, slots)
    }

    fn check_bindings(&self, bindings: &Bindings) -> Result<(), LlmError> {
        match self.slots.iter().find(|s| !bindings.contains_key(*s)) {
            Some(slot) => Err(LlmError::MissingSlot {
                template: self.id.clone(),
                slot: slot.clone(),
            }),
            None => Ok(()),
        }
    }

    /// The assistant schema turn (the one holding the first marker) with
    /// every slot bound and every marker replaced by `generated`. This is
    /// what a model that follows the template would have written.
    pub fn schema_with(&self, bindings: &Bindings, generated: &str) -> Result<String, LlmError> {
        self.check_bindings(bindings)?;
        let turn = self
            .turns
            .iter()
            .find(|m| m.content.contains(GENERATE))
            .expect("validated templates hold a marker");
        Ok(substitute(turn.content.as_str(), bindings).replace(GENERATE, generated))
    }
}

/// System message, then the template turns with slots bound, cut at the
/// first `<<generate>>`. A turn cut down to nothing is dropped.
pub fn render_prompt(template: &PromptTemplate, bindings: &Bindings) -> Result<Vec<ChatMessage>, LlmError> {
    template.check_bindings(bindings)?;
    let mut out = vec![ChatMessage::system(substitute(&template.system_text, bindings))];
    for turn in &template.turns {
        let (head, cut) = match turn.content.find(GENERATE) {
            Some(at) => (&turn.content[..at], true),
            None => (turn.content.as_str(), false),
        };
        let content = substitute(head, bindings);
        if !cut || !content.trim().is_empty() {
            out.push(ChatMessage::new(turn.role, content));
        }
        if cut {
            break;
        }
    }
    Ok(out)
}

pub fn bindings<'a>(pairs: impl IntoIterator<Item = (&'a str, String)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

macro_rules! builtin {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            pub fn $name() -> PromptTemplate {
                PromptTemplate::parse(include_str!(concat!("../templates/", $file)))
                    .expect(concat!("bundled template ", $file, " parses"))
            }
        )*

        /// Every bundled template, in file order.
        pub fn all() -> Vec<PromptTemplate> {
            vec![$($name()),*]
        }
    };
}

/// Templates shipped with the crate.
pub mod builtin {
    use super::PromptTemplate;

    builtin! {
        folio_proposer => "folio-proposer.txt",
        folio_verifier => "folio-verifier.txt",
        folio_reporter => "folio-reporter.txt",
        game24_proposer => "game24-proposer.txt",
        game24_verifier_a => "game24-verifier-a.txt",
        game24_verifier_b => "game24-verifier-b.txt",
        game24_reporter => "game24-reporter.txt",
    }

    /// Meta-prompt for solving math problems with a code interpreter.
    /// Shipped as text only; nothing in this crate executes code.
    pub const MATH_META_PROMPT: &str = include_str!("../templates/math-meta.txt");
}
