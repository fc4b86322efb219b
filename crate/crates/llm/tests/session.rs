mod common;

use std::fs;

use cr_core::engine::{Event, HaltReason, Origin, SessionConfig};
use cr_core::logic::Label;
use cr_llm::stub::{chat_response, StubServer};
use cr_llm::{run_llm_logic, run_llm_logic_voted, LogicTemplates};
use serde_json::Value;

use common::{caller, client_for, rock_problem, Caller};

#[test]
fn rock_session_matches_golden_transcript() {
    let (got, result) = common::run_rock();
    assert_eq!(result.answer, Label::True);
    assert_eq!(result.halted_by, HaltReason::Reporter);
    let derived: Vec<&String> = result
        .dag
        .validated()
        .filter(|n| n.origin == Origin::Proposed)
        .map(|n| &n.payload)
        .collect();
    assert_eq!(derived, ["Rock is not a monkey.", "Rock is a bird.", "Rock can fly.", "Rock has wings."]);

    let path = common::golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(got, want, "transcript drifted from {}", path.display());
}

#[test]
fn replaying_the_session_is_identical() {
    assert_eq!(common::run_rock().0, common::run_rock().0);
}

#[test]
fn always_invalid_verifier_accumulates_nothing() {
    let stub = StubServer::start(|i, body| match caller(body) {
        Caller::Proposer => chat_response(&format!("\"Proposition\": \"Claim {i}.\"")),
        Caller::Verifier => chat_response("Judgement: Invalid"),
        Caller::Reporter => chat_response("Judgement: Unknown"),
    })
    .unwrap();
    let client = client_for(&stub);
    let cfg = SessionConfig {
        n: 5,
        limit: 5,
        ..SessionConfig::default()
    };
    let mut events: Vec<Event> = Vec::new();
    let res = run_llm_logic(&client, &LogicTemplates::builtin(), &rock_problem(), &cfg, &mut events).unwrap();
    assert_eq!(res.dag.validated().filter(|n| n.origin == Origin::Proposed).count(), 0);
    assert_eq!(res.dag.rejected().count(), 5);
    assert_eq!(res.halted_by, HaltReason::IterationCap);
    assert_eq!(res.answer, Label::Unknown);
}

#[test]
fn immediate_reporter_halts_before_proposing() {
    let stub = StubServer::start(|_, body| match caller(body) {
        Caller::Reporter => chat_response("Now we know that the Hypothesis is True"),
        _ => chat_response("unexpected"),
    })
    .unwrap();
    let client = client_for(&stub);
    let res = run_llm_logic(
        &client,
        &LogicTemplates::builtin(),
        &rock_problem(),
        &SessionConfig::default(),
        &mut Vec::<Event>::new(),
    )
    .unwrap();
    assert_eq!(res.halted_by, HaltReason::Reporter);
    assert_eq!(res.answer, Label::True);
    assert_eq!(res.metrics.proposer_calls, 0);
    assert!(stub.requests().iter().all(|r| caller(&r.body) == Caller::Reporter));
}

#[test]
fn voting_runs_k_sessions_at_the_vote_temperature() {
    let stub = StubServer::start(|i, body| match caller(body) {
        Caller::Reporter => chat_response(if i % 3 == 0 { "Judgement: False" } else { "Judgement: True" }),
        _ => chat_response("unexpected"),
    })
    .unwrap();
    let client = client_for(&stub);
    let cfg = SessionConfig {
        k: 5,
        ..SessionConfig::default()
    };
    let (label, runs) =
        run_llm_logic_voted(&client, &LogicTemplates::builtin(), &rock_problem(), &cfg, &mut Vec::<Event>::new())
            .unwrap();
    assert_eq!(runs.len(), 5);
    assert_eq!(label, Label::True);
    let reqs = stub.requests();
    assert_eq!(reqs.len(), 5);
    assert!(reqs.iter().all(|r| r.body["temperature"] == 0.7));
}

#[test]
fn transport_failure_surfaces_as_an_engine_error() {
    let stub = StubServer::start(|_, _| (500, "down".into())).unwrap();
    let client = client_for(&stub);
    let err = run_llm_logic(
        &client,
        &LogicTemplates::builtin(),
        &rock_problem(),
        &SessionConfig::default(),
        &mut Vec::<Event>::new(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("reporter"), "{err}");
}
