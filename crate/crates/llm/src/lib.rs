//! Live mode: cumulative reasoning roles played by a chat-completion model.
//!
//! Prompts come from bundled text templates ([`template::builtin`]),
//! requests go to an OpenAI-compatible endpoint through [`ChatClient`],
//! and completions are read back with [`parse_label`] and
//! [`parse_verdict`]. [`LlmLogicRoles`] plugs all of it into the engine.

pub mod client;
pub mod folio;
pub mod parse;
pub mod roles;
pub mod stub;
pub mod template;

pub use client::{complete, ChatClient, Completion, EndpointConfig, RetryPolicy};
pub use folio::{load_folio, parse_folio, write_folio, FolioRecord, FolioSet};
pub use parse::{parse_label, parse_verdict};
pub use roles::{
    run_llm_logic, run_llm_logic_at, run_llm_logic_voted, LlmLogicResult, LlmLogicRoles,
    LogicTemplates,
};
pub use template::{render_prompt, Bindings, ChatMessage, PromptTemplate, Role};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("request failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("template {template}: no binding for slot {slot}")]
    MissingSlot { template: String, slot: String },
    #[error("template {template}: {message}")]
    Template { template: String, message: String },
    #[error("line {line}: {message}")]
    Load { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
