mod common;

use std::thread;
use std::time::Duration;

use cr_llm::stub::{chat_response, StubServer};
use cr_llm::{complete, ChatClient, ChatMessage, EndpointConfig, LlmError, RetryPolicy};

fn msgs() -> Vec<ChatMessage> {
    vec![ChatMessage::system("be brief"), ChatMessage::user("hi")]
}

fn config(url: &str, attempts: u32) -> EndpointConfig {
    std::env::set_var(common::KEY_VAR, "stub-key");
    EndpointConfig {
        base_url: url.into(),
        model: "m".into(),
        api_key_env: common::KEY_VAR.into(),
        timeout_ms: 5_000,
        retry: RetryPolicy {
            max_attempts: attempts,
            initial_backoff_ms: 1,
            multiplier: 2.0,
            max_backoff_ms: 4,
        },
        ..EndpointConfig::default()
    }
}

#[test]
fn canned_response_round_trips() {
    let stub = StubServer::start(|_, _| chat_response("four")).unwrap();
    let client = ChatClient::new(config(stub.url(), 1)).unwrap();
    let got = client.complete_at(&msgs(), 0.7).unwrap();
    assert_eq!(got.content, "four");
    assert_eq!(got.attempts, 1);
    let reqs = stub.requests();
    assert_eq!(reqs.len(), 1);
    assert_eq!(reqs[0].authorization.as_deref(), Some("Bearer stub-key"));
    let body = &reqs[0].body;
    assert_eq!(body["model"], "m");
    assert_eq!(body["temperature"], 0.7);
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["content"], "hi");
}

#[test]
fn transient_failures_are_retried() {
    let stub = StubServer::start(|i, _| if i < 2 { (500, "busy".into()) } else { chat_response("ok") }).unwrap();
    let got = ChatClient::new(config(stub.url(), 5)).unwrap().complete(&msgs()).unwrap();
    assert_eq!(got.content, "ok");
    assert_eq!(got.attempts, 3);
    assert_eq!(stub.requests().len(), 3);
}

#[test]
fn rate_limits_are_transient_too() {
    let stub = StubServer::start(|i, _| if i == 0 { (429, "slow down".into()) } else { chat_response("ok") }).unwrap();
    let got = ChatClient::new(config(stub.url(), 2)).unwrap().complete(&msgs()).unwrap();
    assert_eq!(got.attempts, 2);
}

#[test]
fn exhausted_retries_are_a_transport_error() {
    let stub = StubServer::start(|_, _| (503, "down".into())).unwrap();
    let err = ChatClient::new(config(stub.url(), 3)).unwrap().complete(&msgs()).unwrap_err();
    assert!(matches!(err, LlmError::Transport { attempts: 3, .. }), "{err}");
    assert_eq!(stub.requests().len(), 3);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = format!("http://127.0.0.1:{port}/v1/chat/completions");
    let err = ChatClient::new(config(&url, 2)).unwrap().complete(&msgs()).unwrap_err();
    assert!(matches!(err, LlmError::Transport { attempts: 2, .. }), "{err}");
}

#[test]
fn client_errors_are_not_retried() {
    let stub = StubServer::start(|_, _| (401, "{\"error\":\"bad key\"}".into())).unwrap();
    let err = ChatClient::new(config(stub.url(), 4)).unwrap().complete(&msgs()).unwrap_err();
    assert!(matches!(err, LlmError::Status { status: 401, .. }), "{err}");
    assert_eq!(stub.requests().len(), 1);
}

#[test]
fn unparseable_response_is_a_protocol_error() {
    let stub = StubServer::start(|_, _| (200, "{\"choices\": []}".into())).unwrap();
    let err = ChatClient::new(config(stub.url(), 4)).unwrap().complete(&msgs()).unwrap_err();
    assert!(matches!(err, LlmError::Protocol(_)), "{err}");
}

#[test]
fn missing_key_fails_before_any_request() {
    let stub = StubServer::start(|_, _| chat_response("never")).unwrap();
    let cfg = EndpointConfig {
        api_key_env: "CR_LLM_KEY_THAT_IS_NEVER_SET".into(),
        ..config(stub.url(), 1)
    };
    assert!(matches!(complete(&cfg, &msgs()), Err(LlmError::Config(_))));
    thread::sleep(Duration::from_millis(20));
    assert!(stub.requests().is_empty());
}

#[test]
fn concurrency_stays_within_max_in_flight() {
    let stub = StubServer::start(|_, _| {
        thread::sleep(Duration::from_millis(25));
        chat_response("ok")
    })
    .unwrap();
    let client = ChatClient::new(EndpointConfig {
        max_in_flight: 2,
        ..config(stub.url(), 1)
    })
    .unwrap();
    thread::scope(|s| {
        for _ in 0..10 {
            s.spawn(|| client.complete(&msgs()).unwrap());
        }
    });
    assert_eq!(stub.requests().len(), 10);
    assert!(stub.peak_in_flight() <= 2, "peak {}", stub.peak_in_flight());
    assert_eq!(stub.peak_in_flight(), 2);
}
