//! A scripted chat-completions server on localhost for offline runs.
//!
//! Each request body is parsed as JSON and handed to the script together
//! with its arrival index; the script returns a status code and a response
//! body. Every request is recorded, and the peak number of requests being
//! handled at once is tracked.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct StubRequest {
    pub index: usize,
    pub authorization: Option<String>,
    pub body: Value,
}

type Script = dyn Fn(usize, &Value) -> (u16, String) + Send + Sync;

struct Shared {
    script: Box<Script>,
    requests: Mutex<Vec<StubRequest>>,
    counter: AtomicUsize,
    live: AtomicUsize,
    peak: AtomicUsize,
}

pub struct StubServer {
    url: String,
    shared: Arc<Shared>,
}

/// A 200 response carrying `content` as the first choice.
pub fn chat_response(content: &str) -> (u16, String) {
    let body = json!({
        "id": "stub",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}],
    });
    (200, body.to_string())
}

impl StubServer {
    pub fn start(script: impl Fn(usize, &Value) -> (u16, String) + Send + Sync + 'static) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let url = format!("http://{}/v1/chat/completions", listener.local_addr()?);
        let shared = Arc::new(Shared {
            script: Box::new(script),
            requests: Mutex::new(Vec::new()),
            counter: AtomicUsize::new(0),
            live: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let accept = Arc::clone(&shared);
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let shared = Arc::clone(&accept);
                thread::spawn(move || {
                    // a broken connection only affects its own request
                    let _ = serve(stream, &shared);
                });
            }
        });
        Ok(Self { url, shared })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Requests received so far, in arrival order.
    pub fn requests(&self) -> Vec<StubRequest> {
        let mut r = self.shared.requests.lock().unwrap_or_else(|e| e.into_inner()).clone();
        r.sort_by_key(|q| q.index);
        r
    }

    pub fn peak_in_flight(&self) -> usize {
        self.shared.peak.load(Ordering::SeqCst)
    }
}

fn serve(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let mut length = 0usize;
    let mut authorization = None;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 || line.trim().is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            match k.trim().to_ascii_lowercase().as_str() {
                "content-length" => length = v.trim().parse().unwrap_or(0),
                "authorization" => authorization = Some(v.trim().to_string()),
                _ => {}
            }
        }
    }
    let mut raw = vec![0; length];
    reader.read_exact(&mut raw)?;
    let body: Value = serde_json::from_slice(&raw).unwrap_or(Value::Null);

    let now = shared.live.fetch_add(1, Ordering::SeqCst) + 1;
    shared.peak.fetch_max(now, Ordering::SeqCst);
    let index = shared.counter.fetch_add(1, Ordering::SeqCst);
    shared
        .requests
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .push(StubRequest {
            index,
            authorization,
            body: body.clone(),
        });
    let (status, text) = (shared.script)(index, &body);
    shared.live.fetch_sub(1, Ordering::SeqCst);

    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    )?;
    out.flush()
}

/// System and final message contents of a recorded request body.
pub fn request_text(body: &Value) -> (String, String) {
    let msgs = body["messages"].as_array().cloned().unwrap_or_default();
    let text = |m: Option<&Value>| m.and_then(|m| m["content"].as_str()).unwrap_or("").to_string();
    (text(msgs.first()), text(msgs.last()))
}
