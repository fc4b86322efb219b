//! Line-delimited FOLIO-style records.
//!
//! Each non-blank line is one JSON object with `example_id` (string or
//! number), `premises` (array of strings, or one string with a premise per
//! line), `hypothesis` (or `conclusion`) and `label`. Labels are
//! `True`/`False`/`Unknown`, case-insensitive; `Uncertain` reads as
//! `Unknown`.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use cr_core::logic::{Label, ProblemText};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::LlmError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolioRecord {
    pub example_id: String,
    pub premises: Vec<String>,
    pub hypothesis: String,
    pub label: Label,
}

impl FolioRecord {
    pub fn to_problem(&self) -> ProblemText {
        ProblemText {
            id: Some(self.example_id.clone()),
            premises: self.premises.clone(),
            hypothesis: self.hypothesis.clone(),
            label: Some(self.label),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPremises {
    List(Vec<String>),
    Text(String),
}

#[derive(Deserialize)]
struct RawRecord {
    example_id: Value,
    premises: RawPremises,
    #[serde(alias = "conclusion")]
    hypothesis: String,
    label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FolioSet {
    pub records: Vec<FolioRecord>,
    /// Records read before exclusion.
    pub read: usize,
    /// Records dropped by the exclusion list.
    pub excluded: usize,
    /// Excluded ids that matched nothing in the file.
    pub unmatched_exclusions: Vec<String>,
}

pub fn parse_folio_label(s: &str) -> Option<Label> {
    if s.trim().eq_ignore_ascii_case("uncertain") {
        return Some(Label::Unknown);
    }
    s.parse().ok()
}

fn parse_record(line: &str) -> Result<FolioRecord, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let example_id = match raw.example_id {
        Value::String(s) => s,
        Value::Number(n) => n.to_string(),
        other => return Err(format!("example_id must be a string or number, got {other}")),
    };
    let premises = match raw.premises {
        RawPremises::List(v) => v,
        RawPremises::Text(t) => t
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
    };
    let label = parse_folio_label(&raw.label).ok_or_else(|| format!("unknown label {:?}", raw.label))?;
    Ok(FolioRecord {
        example_id,
        premises,
        hypothesis: raw.hypothesis,
        label,
    })
}

pub fn parse_folio(text: &str) -> Result<Vec<FolioRecord>, LlmError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_record(line).map_err(|message| LlmError::Load { line: i + 1, message })?;
        if !seen.insert(rec.example_id.clone()) {
            return Err(LlmError::Load {
                line: i + 1,
                message: format!("duplicate example_id {}", rec.example_id),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

/// One id per line; blank lines and lines starting with `#` are ignored.
pub fn parse_exclusions(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

pub fn load_folio(path: &Path, exclusion_path: Option<&Path>) -> Result<FolioSet, LlmError> {
    let records = parse_folio(&fs::read_to_string(path)?)?;
    let exclusions = match exclusion_path {
        Some(p) => parse_exclusions(&fs::read_to_string(p)?),
        None => BTreeSet::new(),
    };
    let read = records.len();
    let present: HashSet<&str> = records.iter().map(|r| r.example_id.as_str()).collect();
    let unmatched_exclusions = exclusions
        .iter()
        .filter(|id| !present.contains(id.as_str()))
        .cloned()
        .collect();
    let records: Vec<FolioRecord> = records
        .into_iter()
        .filter(|r| !exclusions.contains(&r.example_id))
        .collect();
    Ok(FolioSet {
        excluded: read - records.len(),
        read,
        records,
        unmatched_exclusions,
    })
}

pub fn write_folio(records: &[FolioRecord], mut out: impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_folio_shapes() {
        let text = concat!(
            r#"{"example_id": 7, "premises": "A.\nB.\n", "conclusion": "C.", "label": "Uncertain"}"#,
            "\n\n",
            r#"{"example_id": "x", "premises": ["A."], "hypothesis": "D.", "label": "true"}"#,
        );
        let recs = parse_folio(text).unwrap();
        assert_eq!(recs[0].example_id, "7");
        assert_eq!(recs[0].premises, vec!["A.", "B."]);
        assert_eq!(recs[0].label, Label::Unknown);
        assert_eq!(recs[1].label, Label::True);
    }

    #[test]
    fn bad_label_names_the_line() {
        let text = concat!(
            r#"{"example_id": 1, "premises": ["A."], "hypothesis": "B.", "label": "True"}"#,
            "\n",
            r#"{"example_id": 2, "premises": ["A."], "hypothesis": "B.", "label": "Maybe"}"#,
        );
        match parse_folio(text).unwrap_err() {
            LlmError::Load { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("Maybe"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn malformed_and_duplicate_lines_fail() {
        assert!(matches!(parse_folio("{oops"), Err(LlmError::Load { line: 1, .. })));
        let dup = r#"{"example_id": 1, "premises": [], "hypothesis": "B", "label": "True"}"#;
        let text = format!("{dup}\n{dup}\n");
        assert!(matches!(parse_folio(&text), Err(LlmError::Load { line: 2, .. })));
    }

    #[test]
    fn exclusion_list_format() {
        let ids = parse_exclusions("# bad labels\n 3 \n\n4\n3\n");
        assert_eq!(ids.into_iter().collect::<Vec<_>>(), vec!["3", "4"]);
    }
}
