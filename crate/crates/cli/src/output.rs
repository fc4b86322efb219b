use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use cr_core::engine::{write_event, Event};
use serde::Serialize;
use serde_json::Value;

use crate::{internal, usage, CliError, OutArgs};

/// Report envelope shared by `solve24` and `logic`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport<C, I, A> {
    pub command: &'static str,
    pub config: C,
    pub items: Vec<I>,
    pub aggregates: A,
    pub seed: u64,
    /// Excluded from reproducibility comparisons.
    pub wall_time_ms: u64,
}

pub fn mean(total: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}

fn open_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| internal(format!("cannot write {}: {e}", path.display())))
}

/// Pretty JSON to `--out` or stdout.
pub fn emit_json(out: &OutArgs, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(internal)?;
    emit_text(out, &(text + "\n"))
}

pub fn emit_text(out: &OutArgs, text: &str) -> Result<(), CliError> {
    let res = match &out.out {
        Some(path) => {
            let mut w = open_out(path)?;
            w.write_all(text.as_bytes()).and_then(|_| w.flush())
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| internal(format!("write failed: {e}")))
}

/// Writes per-item event logs in item order.
pub fn write_events(path: &PathBuf, logs: &[Vec<Event>]) -> Result<(), CliError> {
    let mut w = open_out(path)?;
    for e in logs.iter().flatten() {
        write_event(&mut w, e).map_err(|e| internal(format!("event log: {e}")))?;
    }
    w.flush().map_err(|e| internal(format!("event log: {e}")))
}

/// Fills `item` and `correct` on halt events.
pub fn label_halts(events: &mut [Event], name: &str, gold: Option<&Value>) {
    for e in events {
        if let Event::Halt {
            item,
            correct,
            answer,
            solved,
            ..
        } = e
        {
            *item = Some(name.to_string());
            *correct = Some(match gold {
                Some(g) => answer == g,
                None => *solved,
            });
        }
    }
}

/// Maps `f` over `items` on up to `jobs` threads; results keep input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(t) = items.get(i) else { break };
                let r = f(i, t);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .unwrap_or_else(|e| e.into_inner())
                .expect("every slot filled")
        })
        .collect()
}

pub fn default_jobs() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<u64> = (0..100).collect();
        let got = par_map(&items, 8, |i, x| {
            thread::sleep(std::time::Duration::from_micros(100 - x));
            (i as u64) * 10 + x
        });
        assert_eq!(got, (0..100).map(|x| x * 11).collect::<Vec<_>>());
        assert!(par_map(&Vec::<u8>::new(), 4, |_, x| *x).is_empty());
    }

    #[test]
    fn means() {
        assert_eq!(mean(3, 2), 1.5);
        assert_eq!(mean(3, 0), 0.0);
    }
}
