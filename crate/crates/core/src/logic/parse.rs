//! Two input syntaxes for statements.
//!
//! Symbolic (ASCII or Unicode connectives):
//!
//! ```text
//! formula     := implication
//! implication := disjunction [ ("->" | "=>" | "→" | "⇒") implication ]
//! disjunction := conjunction { ("|" | "∨") conjunction }
//! conjunction := unary { ("&" | "∧") unary }
//! unary       := ("~" | "!" | "¬") unary
//!              | ("forall" | "∀") IDENT ["."] "(" formula ")"
//!              | IDENT "(" IDENT ")"
//!              | "(" formula ")"
//! ```
//!
//! An argument is a variable when a surrounding quantifier binds it, a
//! constant otherwise.
//!
//! Restricted English (case-insensitive keywords, one sentence):
//!
//! ```text
//! sentence   := quantified | fact
//! quantified := ("all" | "every" | "each") NOUN predicate
//!             | ("anything" | "everything") ("that" | "which") predicate predicate
//!             | "no" NOUN predicate
//! fact       := NAME predicate
//! predicate  := simple { ("and" | "but") simple }
//! simple     := BE ["not"] "either" ["a" | "an"] WORDS "or" ["a" | "an"] WORDS
//!             | BE ["not"] ["a" | "an"] WORDS
//!             | ("can" | "cannot" | "can not" | "can't") WORD
//!             | ("has" | "have") WORDS
//!             | ("does" | "do") "not" "have" WORDS
//! BE         := "is" | "are" | "isn't" | "aren't"
//! ```
//!
//! `All monkeys are mammals` becomes `forall x (Monkey(x) -> Mammal(x))`;
//! `Rock is not a mammal but is an animal` becomes
//! `~Mammal(Rock) & Animal(Rock)`. Plural nouns after `all` or `are` are
//! singularized; multi-word objects are joined in camel case.

use super::statement::{Statement, Term};
use super::LogicError;

fn err(input: &str, message: impl Into<String>) -> LogicError {
    LogicError::Parse {
        input: input.to_string(),
        message: message.into(),
    }
}

/// Parses either syntax and validates the result.
pub fn parse_statement(text: &str) -> Result<Statement, LogicError> {
    let s = if text.contains('(') {
        parse_formula(text)?
    } else {
        parse_english(text)?
    };
    s.validate().map_err(|e| err(text, e.to_string()))?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Forall,
    Dot,
}

fn tokenize(input: &str) -> Result<Vec<Tok>, LogicError> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => {}
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '~' | '!' | '¬' => out.push(Tok::Not),
            '&' | '∧' => out.push(Tok::And),
            '|' | '∨' => out.push(Tok::Or),
            '→' | '⇒' => out.push(Tok::Implies),
            '∀' => out.push(Tok::Forall),
            '.' => out.push(Tok::Dot),
            '-' | '=' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Implies);
                i += 1;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                let word: String = chars[start..=i].iter().collect();
                out.push(if word == "forall" { Tok::Forall } else { Tok::Ident(word) });
            }
            other => return Err(err(input, format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), LogicError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(err(self.input, format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn implication(&mut self) -> Result<Statement, LogicError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Statement::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Statement, LogicError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            acc = Statement::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Statement, LogicError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            acc = Statement::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Statement, LogicError> {
        match self.next() {
            Some(Tok::Not) => Ok(Statement::not(self.unary()?)),
            Some(Tok::Forall) => {
                let Some(Tok::Ident(var)) = self.next() else {
                    return Err(err(self.input, "expected a variable after forall"));
                };
                if self.peek() == Some(&Tok::Dot) {
                    self.pos += 1;
                }
                self.expect(Tok::LParen)?;
                self.bound.push(var.clone());
                let body = self.implication()?;
                self.bound.pop();
                self.expect(Tok::RParen)?;
                Ok(Statement::Forall(var, Box::new(body)))
            }
            Some(Tok::LParen) => {
                let inner = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(pred)) => {
                self.expect(Tok::LParen)?;
                let Some(Tok::Ident(arg)) = self.next() else {
                    return Err(err(self.input, format!("expected an argument for {pred}")));
                };
                self.expect(Tok::RParen)?;
                let term = if self.bound.contains(&arg) {
                    Term::Var(arg)
                } else {
                    Term::Const(arg)
                };
                Ok(Statement::Atom(pred, term))
            }
            other => Err(err(self.input, format!("unexpected token {other:?}"))),
        }
    }
}

/// Symbolic syntax only, without shape validation.
pub fn parse_formula(input: &str) -> Result<Statement, LogicError> {
    let mut p = Parser {
        input,
        toks: tokenize(input)?,
        pos: 0,
        bound: Vec::new(),
    };
    let s = p.implication()?;
    if p.pos != p.toks.len() {
        return Err(err(input, "trailing input"));
    }
    Ok(s)
}

fn camel(words: &[&str], singular: bool) -> Option<String> {
    if words.is_empty() {
        return None;
    }
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        let w = if singular && i + 1 == words.len() {
            singularize(w)
        } else {
            w.to_string()
        };
        let mut cs = w.chars();
        let first = cs.next()?;
        if !first.is_alphabetic() {
            return None;
        }
        out.extend(first.to_uppercase());
        out.push_str(&cs.as_str().to_lowercase());
    }
    Some(out)
}

fn singularize(word: &str) -> String {
    let w = word.to_lowercase();
    if let Some(stem) = w.strip_suffix("ies") {
        format!("{stem}y")
    } else if w.ends_with("sses") || w.ends_with("shes") || w.ends_with("ches") || w.ends_with("xes") {
        w[..w.len() - 2].to_string()
    } else if w.ends_with('s') && !w.ends_with("ss") {
        w[..w.len() - 1].to_string()
    } else {
        w
    }
}

const ARTICLES: [&str; 2] = ["a", "an"];

fn strip_article<'a>(words: &'a [&'a str]) -> &'a [&'a str] {
    match words.first() {
        Some(w) if ARTICLES.contains(&w.to_lowercase().as_str()) => &words[1..],
        _ => words,
    }
}

fn lower(w: &str) -> String {
    w.to_lowercase()
}

/// One predicate phrase applied to `term`.
fn simple_predicate(input: &str, words: &[&str], term: &Term) -> Result<Statement, LogicError> {
    let bad = || err(input, format!("unrecognized predicate phrase {:?}", words.join(" ")));
    let atom = |name: String| Statement::Atom(name, term.clone());
    let first = words.first().map(|w| lower(w)).ok_or_else(bad)?;
    let rest = &words[1..];
    match first.as_str() {
        "is" | "are" | "isn't" | "aren't" => {
            let plural = first.starts_with("are");
            let (negated, rest) = match rest.first().map(|w| lower(w)) {
                _ if first.ends_with("n't") => (true, rest),
                Some(w) if w == "not" => (true, &rest[1..]),
                _ => (false, rest),
            };
            let body = if rest.first().map(|w| lower(w)).as_deref() == Some("either") {
                let rest = &rest[1..];
                let split = rest
                    .iter()
                    .position(|w| lower(w) == "or")
                    .ok_or_else(bad)?;
                let a = camel(strip_article(&rest[..split]), plural).ok_or_else(bad)?;
                let b = camel(strip_article(&rest[split + 1..]), plural).ok_or_else(bad)?;
                Statement::or(atom(a), atom(b))
            } else {
                atom(camel(strip_article(rest), plural).ok_or_else(bad)?)
            };
            Ok(if negated { Statement::not(body) } else { body })
        }
        "can" if rest.first().map(|w| lower(w)).as_deref() == Some("not") => {
            Ok(Statement::not(atom(camel(&rest[1..], false).ok_or_else(bad)?)))
        }
        "can" => Ok(atom(camel(rest, false).ok_or_else(bad)?)),
        "cannot" | "can't" => Ok(Statement::not(atom(camel(rest, false).ok_or_else(bad)?))),
        "has" | "have" => Ok(atom(camel(strip_article(rest), false).ok_or_else(bad)?)),
        "does" | "do" | "doesn't" | "don't" => {
            let rest = if first.ends_with("n't") { rest } else { rest.get(1..).ok_or_else(bad)? };
            match rest.first().map(|w| lower(w)).as_deref() {
                Some("have") if first.ends_with("n't") || lower(words[1]) == "not" => Ok(Statement::not(
                    atom(camel(strip_article(&rest[1..]), false).ok_or_else(bad)?),
                )),
                _ => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}

/// Splits on `and`/`but` where the next word starts a new predicate.
fn predicate(input: &str, words: &[&str], term: &Term) -> Result<Statement, LogicError> {
    const STARTERS: [&str; 12] = [
        "is", "are", "isn't", "aren't", "can", "cannot", "can't", "has", "have", "does", "do",
        "doesn't",
    ];
    let mut parts: Vec<&[&str]> = Vec::new();
    let mut start = 0;
    for i in 0..words.len() {
        let w = lower(words[i]);
        let next_starts = words
            .get(i + 1)
            .is_some_and(|n| STARTERS.contains(&lower(n).as_str()));
        if (w == "and" || w == "but") && next_starts && i > start {
            parts.push(&words[start..i]);
            start = i + 1;
        }
    }
    parts.push(&words[start..]);
    let mut stmts = parts
        .into_iter()
        .map(|p| simple_predicate(input, p, term))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter();
    let first = stmts.next().ok_or_else(|| err(input, "empty predicate"))?;
    Ok(stmts.fold(first, Statement::and))
}

/// Restricted English only.
pub fn parse_english(input: &str) -> Result<Statement, LogicError> {
    let cleaned: String = input
        .trim()
        .trim_end_matches(['.', '!'])
        .chars()
        .map(|c| if c == ',' { ' ' } else { c })
        .collect();
    let words: Vec<&str> = cleaned.split_whitespace().collect();
    if words.len() < 2 {
        return Err(err(input, "sentence too short"));
    }
    let var = Term::Var("x".into());
    let head = lower(words[0]);
    match head.as_str() {
        "all" | "every" | "each" | "no" => {
            let noun = words[1];
            let class = camel(&[noun], head == "all" || head == "no" && noun.ends_with('s'))
                .ok_or_else(|| err(input, "expected a noun"))?;
            let body = predicate(input, &words[2..], &var)?;
            let body = if head == "no" { Statement::not(body) } else { body };
            Ok(Statement::Forall(
                "x".into(),
                Box::new(Statement::implies(Statement::Atom(class, var), body)),
            ))
        }
        "anything" | "everything" => {
            if !matches!(words.get(1).map(|w| lower(w)).as_deref(), Some("that" | "which")) {
                return Err(err(input, "expected 'that' or 'which'"));
            }
            let rest = &words[2..];
            // the second predicate starts at the last predicate keyword
            let split = (1..rest.len())
                .rev()
                .find(|&i| {
                    matches!(lower(rest[i]).as_str(), "is" | "are" | "has" | "have" | "can" | "cannot")
                        && !matches!(lower(rest[i - 1]).as_str(), "and" | "but" | "not" | "does" | "do")
                })
                .ok_or_else(|| err(input, "expected two predicate phrases"))?;
            let ante = predicate(input, &rest[..split], &var)?;
            let cons = predicate(input, &rest[split..], &var)?;
            Ok(Statement::Forall("x".into(), Box::new(Statement::implies(ante, cons))))
        }
        _ => {
            let name = words[0];
            if !name.chars().next().is_some_and(char::is_uppercase) {
                return Err(err(input, format!("expected a capitalized name, found {name:?}")));
            }
            predicate(input, &words[1..], &Term::Const(name.to_string()))
        }
    }
}
