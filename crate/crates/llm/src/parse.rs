//! Reading labels and verdicts out of free-form completions.
//!
//! Both parsers look only at the judgement region: the text after the last
//! case-insensitive `judgement` (or `judgment`), or the whole text when
//! there is none. Inside it, the last recognized word wins, so
//! `Is this deduction valid? False` is a rejection.

use cr_core::engine::Verdict;
use cr_core::logic::Label;

fn judgement_region(text: &str) -> &str {
    let lower = text.to_ascii_lowercase();
    let at = ["judgement", "judgment"]
        .iter()
        .filter_map(|cue| lower.rfind(cue).map(|i| i + cue.len()))
        .max();
    match at {
        Some(i) => &text[i..],
        None => text,
    }
}

fn words(text: &str) -> impl DoubleEndedIterator<Item = String> + '_ {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
}

/// Last `true`, `false` or `unknown` in the judgement region; `Unknown`
/// when there is none. `uncertain` counts as `unknown`.
pub fn parse_label(text: &str) -> Label {
    words(judgement_region(text))
        .rev()
        .find_map(|w| match w.as_str() {
            "true" => Some(Label::True),
            "false" => Some(Label::False),
            "unknown" | "uncertain" => Some(Label::Unknown),
            _ => None,
        })
        .unwrap_or(Label::Unknown)
}

/// Last `valid`/`true` (validated) or `invalid`/`false` (rejected) in the
/// judgement region. Anything else is rejected as unparseable.
pub fn parse_verdict(text: &str) -> Verdict {
    let found = words(judgement_region(text)).rev().find_map(|w| match w.as_str() {
        "valid" | "true" => Some(true),
        "invalid" | "false" => Some(false),
        _ => None,
    });
    match found {
        Some(true) => Verdict::Validated,
        Some(false) => Verdict::Rejected("judged invalid".into()),
        None => Verdict::Rejected("unparseable verdict".into()),
    }
}
