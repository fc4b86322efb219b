use std::fs;
use std::io::Write;

use cr_core::logic::Label;
use cr_llm::{load_folio, write_folio, LlmError};
use serde_json::json;

fn fixture(records: usize) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    let labels = ["True", "False", "Uncertain"];
    for i in 0..records {
        let id = if i % 2 == 0 { json!(i) } else { json!(format!("{i}")) };
        let line = json!({
            "example_id": id,
            "premises": [format!("Premise {i}a."), format!("Premise {i}b.")],
            "conclusion": format!("Conclusion {i}."),
            "label": labels[i % 3],
        });
        writeln!(f, "{line}").unwrap();
    }
    f
}

fn exclusions(ids: impl Iterator<Item = usize>) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# problematic labels").unwrap();
    for id in ids {
        writeln!(f, "{id}").unwrap();
    }
    f
}

#[test]
fn curated_subset_has_460_records() {
    let data = fixture(534);
    let excl = exclusions((0..534).step_by(7).take(74));
    let set = load_folio(data.path(), Some(excl.path())).unwrap();
    assert_eq!(set.read, 534);
    assert_eq!(set.excluded, 74);
    assert_eq!(set.records.len(), 460);
    assert!(set.unmatched_exclusions.is_empty());
    assert!(set.records.iter().all(|r| r.example_id.parse::<usize>().unwrap() % 7 != 0 || r.example_id.parse::<usize>().unwrap() > 7 * 73));
}

#[test]
fn empty_exclusion_list_is_identity() {
    let data = fixture(30);
    let excl = tempfile::NamedTempFile::new().unwrap();
    let with = load_folio(data.path(), Some(excl.path())).unwrap();
    let without = load_folio(data.path(), None).unwrap();
    assert_eq!(with.records, without.records);
    assert_eq!(with.records.len(), 30);
    assert_eq!(with.records[2].label, Label::Unknown);
}

#[test]
fn unmatched_exclusions_are_reported() {
    let data = fixture(5);
    let excl = exclusions([1, 99].into_iter());
    let set = load_folio(data.path(), Some(excl.path())).unwrap();
    assert_eq!(set.records.len(), 4);
    assert_eq!(set.unmatched_exclusions, vec!["99"]);
}

#[test]
fn write_then_load_is_lossless() {
    let data = fixture(534);
    let first = load_folio(data.path(), None).unwrap();
    let out = tempfile::NamedTempFile::new().unwrap();
    write_folio(&first.records, fs::File::create(out.path()).unwrap()).unwrap();
    let second = load_folio(out.path(), None).unwrap();
    assert_eq!(first.records, second.records);
}

#[test]
fn unknown_label_is_a_load_error() {
    let mut f = fixture(3);
    writeln!(f, r#"{{"example_id": 3, "premises": ["A."], "hypothesis": "B.", "label": "Maybe"}}"#).unwrap();
    match load_folio(f.path(), None).unwrap_err() {
        LlmError::Load { line, .. } => assert_eq!(line, 4),
        other => panic!("{other}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load_folio(std::path::Path::new("/nonexistent/folio.jsonl"), None),
        Err(LlmError::Io(_))
    ));
}

#[test]
fn records_become_problems() {
    let data = fixture(2);
    let set = load_folio(data.path(), None).unwrap();
    let p = set.records[1].to_problem();
    assert_eq!(p.id.as_deref(), Some("1"));
    assert_eq!(p.hypothesis, "Conclusion 1.");
    assert_eq!(p.label, Some(Label::False));
}
