//! Line-delimited JSON trace of a run.
//!
//! One JSON object per line, discriminated by `"event"`:
//!
//! | event     | fields                                                                |
//! |-----------|-----------------------------------------------------------------------|
//! | `premise` | `branch`, `node`, `payload`                                           |
//! | `propose` | `branch`, `iteration`, `payload` (null if malformed), `parents`, `note` |
//! | `verdict` | `branch`, `iteration`, `verdict` (`validated`/`rejected`), `node`, `note` |
//! | `report`  | `branch`, `iteration`, `answer`, `target`                             |
//! | `halt`    | `halted_by`, `branch`, `answer`, `solved`, `derivation`, `metrics`, `item`, `correct` |
//!
//! `item` and `correct` on `halt` are filled in by drivers that know the
//! item name and the gold answer; the engine leaves them null.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::dag::NodeId;
use super::session::{HaltReason, Metrics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Premise {
        branch: usize,
        node: NodeId,
        payload: Value,
    },
    Propose {
        branch: usize,
        iteration: usize,
        payload: Option<Value>,
        parents: Vec<NodeId>,
        #[serde(default)]
        note: Option<String>,
    },
    Verdict {
        branch: usize,
        iteration: usize,
        verdict: VerdictKind,
        node: Option<NodeId>,
        #[serde(default)]
        note: Option<String>,
    },
    Report {
        branch: usize,
        iteration: usize,
        answer: Value,
        target: Option<NodeId>,
    },
    Halt {
        halted_by: HaltReason,
        branch: Option<usize>,
        answer: Value,
        solved: bool,
        derivation: Vec<NodeId>,
        metrics: Metrics,
        #[serde(default)]
        item: Option<String>,
        #[serde(default)]
        correct: Option<bool>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Validated,
    Rejected,
}

pub trait EventSink {
    fn record(&mut self, event: Event) -> io::Result<()>;
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl EventSink for NullSink {
    fn record(&mut self, _event: Event) -> io::Result<()> {
        Ok(())
    }
}

impl EventSink for Vec<Event> {
    fn record(&mut self, event: Event) -> io::Result<()> {
        self.push(event);
        Ok(())
    }
}

/// Writes one JSON object per line.
pub struct JsonlSink<W: Write> {
    out: W,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> EventSink for JsonlSink<W> {
    fn record(&mut self, event: Event) -> io::Result<()> {
        write_event(&mut self.out, &event)
    }
}

pub fn write_event<W: Write>(out: &mut W, event: &Event) -> io::Result<()> {
    serde_json::to_writer(&mut *out, event)?;
    out.write_all(b"\n")
}

/// Parses one log line.
pub fn parse_event(line: &str) -> Result<Event, serde_json::Error> {
    serde_json::from_str(line)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names_are_stable() {
        let ev = Event::Verdict {
            branch: 0,
            iteration: 3,
            verdict: VerdictKind::Rejected,
            node: None,
            note: Some("duplicate".into()),
        };
        let line = serde_json::to_string(&ev).unwrap();
        assert_eq!(
            line,
            r#"{"event":"verdict","branch":0,"iteration":3,"verdict":"rejected","node":null,"note":"duplicate"}"#
        );
        assert_eq!(parse_event(&line).unwrap(), ev);
    }
}
