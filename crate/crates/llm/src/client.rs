use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::template::ChatMessage;
use crate::LlmError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub multiplier: f64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            initial_backoff_ms: 500,
            multiplier: 2.0,
            max_backoff_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Pause before attempt `attempt + 1`, counting from 1.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.initial_backoff_ms as f64 * self.multiplier.powi(attempt.saturating_sub(1) as i32);
        Duration::from_millis(ms.min(self.max_backoff_ms as f64) as u64)
    }
}

/// An OpenAI-compatible chat-completions endpoint. `base_url` is the full
/// URL requests are POSTed to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub max_in_flight: usize,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_ms: u64,
    pub retry: RetryPolicy,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4".into(),
            temperature: 0.1,
            max_in_flight: 4,
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_ms: 120_000,
            retry: RetryPolicy::default(),
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: &str| Err(LlmError::Config(m.into()));
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad("temperature must be finite and non-negative");
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1");
        }
        if self.retry.max_attempts == 0 {
            return bad("retry.max_attempts must be at least 1");
        }
        if !(self.retry.multiplier.is_finite() && self.retry.multiplier >= 1.0) {
            return bad("retry.multiplier must be at least 1");
        }
        if self.base_url.trim().is_empty() || self.model.trim().is_empty() {
            return bad("base_url and model are required");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub content: String,
    /// Requests sent, including the successful one.
    pub attempts: u32,
}

/// Counting semaphore bounding concurrent requests.
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    cap: usize,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.cap {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

enum Attempt {
    Done(String),
    Transient(String),
    Fatal(LlmError),
}

/// Blocking chat client; share it by reference across threads.
pub struct ChatClient {
    config: EndpointConfig,
    api_key: String,
    agent: ureq::Agent,
    gate: Gate,
}

impl ChatClient {
    /// Fails with a configuration error if the key variable is unset or
    /// empty; no request is made.
    pub fn new(config: EndpointConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let api_key = match std::env::var(&config.api_key_env) {
            Ok(k) if !k.trim().is_empty() => k,
            _ => {
                return Err(LlmError::Config(format!(
                    "environment variable {} is not set",
                    config.api_key_env
                )))
            }
        };
        Ok(Self::with_key(config, api_key))
    }

    fn with_key(config: EndpointConfig, api_key: String) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            cap: config.max_in_flight,
        };
        Self {
            config,
            api_key,
            agent,
            gate,
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, LlmError> {
        self.complete_at(messages, self.config.temperature)
    }

    pub fn complete_at(&self, messages: &[ChatMessage], temperature: f64) -> Result<Completion, LlmError> {
        let body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": temperature,
        })
        .to_string();
        let policy = &self.config.retry;
        let mut last = String::new();
        for attempt in 1..=policy.max_attempts {
            match self.attempt(&body) {
                Attempt::Done(content) => return Ok(Completion { content, attempts: attempt }),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Transient(msg) => last = msg,
            }
            if attempt < policy.max_attempts {
                thread::sleep(policy.backoff(attempt));
            }
        }
        Err(LlmError::Transport {
            attempts: policy.max_attempts,
            message: last,
        })
    }

    fn attempt(&self, body: &str) -> Attempt {
        let _permit = self.gate.acquire();
        let sent = self
            .agent
            .post(&self.config.base_url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .header("Content-Type", "application/json")
            .send(body);
        let mut resp = match sent {
            Ok(r) => r,
            Err(e) => return Attempt::Transient(e.to_string()),
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(e) => return Attempt::Transient(e.to_string()),
        };
        if status == 429 || status >= 500 {
            return Attempt::Transient(format!("HTTP {status}: {text}"));
        }
        if !(200..300).contains(&status) {
            return Attempt::Fatal(LlmError::Status { status, body: text });
        }
        match first_choice(&text) {
            Some(content) => Attempt::Done(content),
            None => Attempt::Fatal(LlmError::Protocol(format!(
                "no choices[0].message.content in {text}"
            ))),
        }
    }
}

fn first_choice(text: &str) -> Option<String> {
    let v: Value = serde_json::from_str(text).ok()?;
    v.get("choices")?
        .get(0)?
        .get("message")?
        .get("content")?
        .as_str()
        .map(String::from)
}

/// One-shot helper: builds a client and sends a single request.
pub fn complete(config: &EndpointConfig, messages: &[ChatMessage]) -> Result<String, LlmError> {
    Ok(ChatClient::new(config.clone())?.complete(messages)?.content)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy {
            max_attempts: 6,
            initial_backoff_ms: 100,
            multiplier: 2.0,
            max_backoff_ms: 500,
        };
        let got: Vec<u64> = (1..=5).map(|a| p.backoff(a).as_millis() as u64).collect();
        assert_eq!(got, vec![100, 200, 400, 500, 500]);
    }

    #[test]
    fn config_validation() {
        assert!(EndpointConfig::default().validate().is_ok());
        let zero = EndpointConfig {
            max_in_flight: 0,
            ..EndpointConfig::default()
        };
        assert!(zero.validate().is_err());
        let cold = EndpointConfig {
            temperature: -0.1,
            ..EndpointConfig::default()
        };
        assert!(cold.validate().is_err());
    }

    #[test]
    fn choice_extraction() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"hi"}}]}"#;
        assert_eq!(first_choice(ok).as_deref(), Some("hi"));
        assert_eq!(first_choice(r#"{"choices":[]}"#), None);
        assert_eq!(first_choice("<html>"), None);
    }

    #[test]
    fn gate_caps_concurrency() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let gate = Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            cap: 3,
        };
        let live = AtomicUsize::new(0);
        let peak = AtomicUsize::new(0);
        thread::scope(|s| {
            for _ in 0..12 {
                s.spawn(|| {
                    let _p = gate.acquire();
                    let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    thread::sleep(Duration::from_millis(5));
                    live.fetch_sub(1, Ordering::SeqCst);
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 3);
    }
}
