//! Scripted Rock session shared by the live-mode tests.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use cr_core::engine::{Event, SessionConfig};
use cr_core::logic::{Label, ProblemText};
use cr_llm::stub::{chat_response, request_text, StubServer};
use cr_llm::{ChatClient, EndpointConfig, LlmLogicResult, LogicTemplates, RetryPolicy};
use serde_json::{json, Value};

pub const KEY_VAR: &str = "CR_LLM_STUB_KEY";

pub fn rock_problem() -> ProblemText {
    ProblemText {
        id: Some("rock".into()),
        premises: vec![
            "All monkeys are mammals.".into(),
            "Every animal is either a monkey or a bird.".into(),
            "All birds can fly.".into(),
            "Anything that can fly has wings.".into(),
            "Rock is not a mammal but is an animal.".into(),
        ],
        hypothesis: "Rock has wings.".into(),
        label: Some(Label::True),
    }
}

pub fn client_for(stub: &StubServer) -> ChatClient {
    std::env::set_var(KEY_VAR, "stub-key");
    ChatClient::new(EndpointConfig {
        base_url: stub.url().to_string(),
        model: "stub-model".into(),
        api_key_env: KEY_VAR.into(),
        timeout_ms: 10_000,
        retry: RetryPolicy {
            max_attempts: 3,
            initial_backoff_ms: 1,
            multiplier: 2.0,
            max_backoff_ms: 5,
        },
        ..EndpointConfig::default()
    })
    .expect("key is set")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Caller {
    Proposer,
    Verifier,
    Reporter,
}

pub fn caller(body: &Value) -> Caller {
    let (system, _) = request_text(body);
    if system.contains("deduce a \"Proposition\"") {
        Caller::Proposer
    } else if system.contains("valid or not") {
        Caller::Verifier
    } else {
        Caller::Reporter
    }
}

const PROPOSALS: [&str; 7] = [
    "\"Proposition\": \"Rock is not a monkey.\"",
    "\"Proposition\": \"Rock is a mammal.\"",
    "\"Proposition\": \"Rock is a bird.\"",
    "\"Proposition\": \"Rock is a bird.\"",
    "\"Proposition\": \"\"",
    "\"Proposition\": \"Rock can fly.\"",
    "\"Proposition\": \"Rock has wings.\"",
];

/// Proposes the Rock chain with one wrong step, one duplicate and one empty
/// answer mixed in; the reporter says True once "Rock has wings." is
/// among the propositions.
pub fn rock_stub() -> StubServer {
    let next = AtomicUsize::new(0);
    StubServer::start(move |_, body| {
        let (_, last) = request_text(body);
        match caller(body) {
            Caller::Proposer => {
                let i = next.fetch_add(1, Ordering::SeqCst);
                chat_response(PROPOSALS.get(i).copied().unwrap_or("\"Proposition\": \"\""))
            }
            Caller::Verifier if body.to_string().contains("Rock is a mammal") => {
                chat_response("\"Judgement\": \"Is this deduction valid? False\"")
            }
            Caller::Verifier => chat_response("\"Judgement\": \"Is this deduction valid? True\""),
            Caller::Reporter if derived(&last).contains("Rock has wings.") => {
                chat_response("\"Judgement\": \"Now we know that the Hypothesis is True\"")
            }
            Caller::Reporter => chat_response("\"Judgement\": \"Now we know that the Hypothesis is Unknown\""),
        }
    })
    .expect("stub binds")
}

/// The propositions part of a rendered reporter schema.
fn derived(schema: &str) -> &str {
    schema.split("\"Recall the Hypothesis\"").next().unwrap_or("")
}

pub fn rock_config() -> SessionConfig {
    SessionConfig {
        n: 10,
        limit: 10,
        seed: 7,
        ..SessionConfig::default()
    }
}

/// Requests and engine events, without anything that varies between runs.
pub fn transcript(stub: &StubServer, events: &[Event], result: &LlmLogicResult) -> Value {
    let requests: Vec<Value> = stub
        .requests()
        .into_iter()
        .map(|r| json!({"authorization": r.authorization, "body": r.body}))
        .collect();
    json!({
        "requests": requests,
        "events": events,
        "answer": result.answer,
        "halted_by": result.halted_by,
        "derivation": result.derivation_payloads().collect::<Vec<_>>(),
    })
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../llm/tests/fixtures/rock_transcript.json")
}

pub fn run_rock() -> (Value, LlmLogicResult) {
    let stub = rock_stub();
    let client = client_for(&stub);
    let mut events: Vec<Event> = Vec::new();
    let result = cr_llm::run_llm_logic(
        &client,
        &LogicTemplates::builtin(),
        &rock_problem(),
        &rock_config(),
        &mut events,
    )
    .expect("stub session runs");
    (transcript(&stub, &events, &result), result)
}
