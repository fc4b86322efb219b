use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LogicError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

/// Restricted first-order formula: unary predicates, constants, the usual
/// connectives and universally quantified implications.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    Atom(String, Term),
    Not(Box<Statement>),
    And(Box<Statement>, Box<Statement>),
    Or(Box<Statement>, Box<Statement>),
    Implies(Box<Statement>, Box<Statement>),
    /// Body is always an implication.
    Forall(String, Box<Statement>),
}

/// A predicate applied to a constant; the unit of a truth assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub constant: String,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, constant: impl Into<String>) -> Self {
        Self {
            pred: pred.into(),
            constant: constant.into(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.constant)
    }
}

pub type Assignment = BTreeMap<GroundAtom, bool>;

impl Statement {
    pub fn atom(pred: impl Into<String>, constant: impl Into<String>) -> Self {
        Statement::Atom(pred.into(), Term::Const(constant.into()))
    }

    pub fn open_atom(pred: impl Into<String>, var: impl Into<String>) -> Self {
        Statement::Atom(pred.into(), Term::Var(var.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Statement) -> Self {
        Statement::Not(Box::new(s))
    }

    pub fn and(a: Statement, b: Statement) -> Self {
        Statement::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Statement, b: Statement) -> Self {
        Statement::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Statement, b: Statement) -> Self {
        Statement::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, antecedent: Statement, consequent: Statement) -> Self {
        Statement::Forall(var.into(), Box::new(Statement::implies(antecedent, consequent)))
    }

    /// Double negations removed, `And`/`Or` operands sorted.
    pub fn canonical(&self) -> Statement {
        match self {
            Statement::Atom(..) => self.clone(),
            Statement::Not(inner) => match inner.canonical() {
                Statement::Not(x) => *x,
                other => Statement::not(other),
            },
            Statement::And(a, b) => {
                let (a, b) = sorted(a.canonical(), b.canonical());
                Statement::and(a, b)
            }
            Statement::Or(a, b) => {
                let (a, b) = sorted(a.canonical(), b.canonical());
                Statement::or(a, b)
            }
            Statement::Implies(a, b) => Statement::implies(a.canonical(), b.canonical()),
            Statement::Forall(v, body) => Statement::Forall(v.clone(), Box::new(body.canonical())),
        }
    }

    /// Canonical negation: `¬¬x` collapses to `x`.
    pub fn negated(&self) -> Statement {
        Statement::not(self.clone()).canonical()
    }

    /// String form of [`Statement::canonical`], used for duplicate detection.
    pub fn canonical_key(&self) -> String {
        self.canonical().to_string()
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Statement::Atom(..) => true,
            Statement::Not(inner) => matches!(**inner, Statement::Atom(..)),
            _ => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty() && !self.has_quantifier()
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Statement::Atom(..) => false,
            Statement::Not(x) => x.has_quantifier(),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.has_quantifier() || b.has_quantifier()
            }
            Statement::Forall(..) => true,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Statement::Atom(_, Term::Var(v)) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Statement::Atom(_, Term::Const(_)) => {}
            Statement::Not(x) => x.collect_free(bound, out),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Statement::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |p, _| {
            out.insert(p.to_string());
        });
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&str, &Term)) {
        match self {
            Statement::Atom(p, t) => f(p, t),
            Statement::Not(x) => x.visit_atoms(f),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Statement::Forall(_, body) => body.visit_atoms(f),
        }
    }

    /// Replaces free occurrences of `var` with the constant `c`.
    pub fn substitute(&self, var: &str, c: &str) -> Statement {
        match self {
            Statement::Atom(p, Term::Var(v)) if v == var => Statement::atom(p.clone(), c),
            Statement::Atom(..) => self.clone(),
            Statement::Not(x) => Statement::not(x.substitute(var, c)),
            Statement::And(a, b) => Statement::and(a.substitute(var, c), b.substitute(var, c)),
            Statement::Or(a, b) => Statement::or(a.substitute(var, c), b.substitute(var, c)),
            Statement::Implies(a, b) => {
                Statement::implies(a.substitute(var, c), b.substitute(var, c))
            }
            Statement::Forall(v, _) if v == var => self.clone(),
            Statement::Forall(v, body) => {
                Statement::Forall(v.clone(), Box::new(body.substitute(var, c)))
            }
        }
    }

    /// Checks the shape restrictions: closed, universals only over an
    /// implication, no nested quantifiers.
    pub fn validate(&self) -> Result<(), LogicError> {
        if let Some(v) = self.free_vars().into_iter().next() {
            return Err(LogicError::Malformed(format!("free variable {v} in {self}")));
        }
        self.check_shape(false)
    }

    fn check_shape(&self, under_quantifier: bool) -> Result<(), LogicError> {
        match self {
            Statement::Atom(..) => Ok(()),
            Statement::Not(x) => x.check_shape(under_quantifier),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.check_shape(under_quantifier)?;
                b.check_shape(under_quantifier)
            }
            Statement::Forall(v, body) => {
                if under_quantifier {
                    return Err(LogicError::Malformed(format!("nested quantifier over {v}")));
                }
                if !matches!(**body, Statement::Implies(..)) {
                    return Err(LogicError::Malformed(format!(
                        "universal over {v} must quantify an implication"
                    )));
                }
                body.check_shape(true)
            }
        }
    }

    /// Replaces each universal by the conjunction of its instances over
    /// `constants`.
    pub fn expand_universals(&self, constants: &[String]) -> Result<Statement, LogicError> {
        Ok(match self {
            Statement::Atom(..) => self.clone(),
            Statement::Not(x) => Statement::not(x.expand_universals(constants)?),
            Statement::And(a, b) => {
                Statement::and(a.expand_universals(constants)?, b.expand_universals(constants)?)
            }
            Statement::Or(a, b) => {
                Statement::or(a.expand_universals(constants)?, b.expand_universals(constants)?)
            }
            Statement::Implies(a, b) => Statement::implies(
                a.expand_universals(constants)?,
                b.expand_universals(constants)?,
            ),
            Statement::Forall(v, body) => {
                let mut instances = constants.iter().map(|c| body.substitute(v, c));
                let first = instances.next().ok_or(LogicError::EmptyDomain)?;
                instances
                    .try_fold(first, |acc, s| Ok::<_, LogicError>(Statement::and(acc, s)))?
                    .expand_universals(constants)?
            }
        })
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::And(..) | Statement::Or(..) | Statement::Implies(..) => {
                write!(f, "({self})")
            }
            _ => write!(f, "{self}"),
        }
    }
}

fn sorted(a: Statement, b: Statement) -> (Statement, Statement) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

/// Truth-table evaluation of a quantifier-free, closed formula.
pub fn eval_propositional(formula: &Statement, assignment: &Assignment) -> Result<bool, LogicError> {
    Ok(match formula {
        Statement::Atom(p, Term::Const(c)) => {
            let atom = GroundAtom::new(p.clone(), c.clone());
            *assignment
                .get(&atom)
                .ok_or_else(|| LogicError::Unassigned(atom.to_string()))?
        }
        Statement::Atom(p, Term::Var(v)) => {
            return Err(LogicError::Malformed(format!("open atom {p}({v})")))
        }
        Statement::Not(x) => !eval_propositional(x, assignment)?,
        Statement::And(a, b) => eval_propositional(a, assignment)? && eval_propositional(b, assignment)?,
        Statement::Or(a, b) => eval_propositional(a, assignment)? || eval_propositional(b, assignment)?,
        Statement::Implies(a, b) => {
            !eval_propositional(a, assignment)? || eval_propositional(b, assignment)?
        }
        Statement::Forall(..) => return Err(LogicError::Quantified(formula.to_string())),
    })
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Atom(p, t) => write!(f, "{p}({})", t.name()),
            Statement::Not(x) => {
                f.write_str("~")?;
                x.fmt_nested(f)
            }
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                let sym = match self {
                    Statement::And(..) => "&",
                    Statement::Or(..) => "|",
                    _ => "->",
                };
                a.fmt_nested(f)?;
                write!(f, " {sym} ")?;
                b.fmt_nested(f)
            }
            Statement::Forall(v, body) => write!(f, "forall {v} ({body})"),
        }
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Statement {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_statement(s)
    }
}

impl Serialize for Statement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Statement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::parse::parse_formula(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
    Unknown,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::True, Label::False, Label::Unknown];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::True => "True",
            Label::False => "False",
            Label::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LogicError::UnknownLabel(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Statement {
        Statement::atom("X", "a")
    }

    fn y() -> Statement {
        Statement::atom("Y", "a")
    }

    fn assignments(atoms: &[Statement]) -> Vec<Assignment> {
        (0..1u32 << atoms.len())
            .map(|bits| {
                atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| match a {
                        Statement::Atom(p, t) => (GroundAtom::new(p, t.name()), bits >> i & 1 == 1),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn contradiction_is_false() {
        let f = Statement::and(x(), Statement::not(x()));
        for a in assignments(&[x()]) {
            assert!(!eval_propositional(&f, &a).unwrap());
        }
    }

    #[test]
    fn absorption_holds() {
        let f = Statement::or(x(), Statement::and(y(), x()));
        let all = assignments(&[x(), y()]);
        assert_eq!(all.len(), 4);
        for a in all {
            assert_eq!(eval_propositional(&f, &a).unwrap(), eval_propositional(&x(), &a).unwrap());
        }
    }

    #[test]
    fn double_negation_holds() {
        let f = Statement::not(Statement::not(x()));
        for a in assignments(&[x()]) {
            assert_eq!(eval_propositional(&f, &a).unwrap(), a[&GroundAtom::new("X", "a")]);
        }
        assert_eq!(f.canonical(), x());
    }

    #[test]
    fn unassigned_atom_is_an_error() {
        let err = eval_propositional(&y(), &Assignment::new()).unwrap_err();
        assert!(matches!(err, LogicError::Unassigned(ref a) if a == "Y(a)"));
    }

    #[test]
    fn canonical_sorts_commutative_operands() {
        assert_eq!(
            Statement::and(y(), x()).canonical_key(),
            Statement::and(x(), y()).canonical_key()
        );
        assert_ne!(
            Statement::implies(y(), x()).canonical_key(),
            Statement::implies(x(), y()).canonical_key()
        );
    }

    #[test]
    fn display_round_trips() {
        let s = Statement::forall(
            "x",
            Statement::open_atom("Animal", "x"),
            Statement::or(Statement::open_atom("Monkey", "x"), Statement::open_atom("Bird", "x")),
        );
        assert_eq!(s.to_string(), "forall x (Animal(x) -> (Monkey(x) | Bird(x)))");
        assert_eq!(s.to_string().parse::<Statement>().unwrap(), s);
        let n = Statement::not(Statement::and(x(), y()));
        assert_eq!(n.to_string(), "~(X(a) & Y(a))");
        assert_eq!(n.to_string().parse::<Statement>().unwrap(), n);
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        assert!(Statement::open_atom("P", "x").validate().is_err());
        let bare = Statement::Forall("x".into(), Box::new(Statement::open_atom("P", "x")));
        assert!(bare.validate().is_err());
    }

    #[test]
    fn universals_expand_over_constants() {
        let s = Statement::forall("x", Statement::open_atom("P", "x"), Statement::open_atom("Q", "x"));
        let e = s.expand_universals(&["a".into(), "b".into()]).unwrap();
        assert_eq!(e.to_string(), "(P(a) -> Q(a)) & (P(b) -> Q(b))");
        assert!(matches!(s.expand_universals(&[]), Err(LogicError::EmptyDomain)));
    }

    #[test]
    fn labels_parse_case_insensitively() {
        assert_eq!("true".parse::<Label>().unwrap(), Label::True);
        assert_eq!(" Unknown ".parse::<Label>().unwrap(), Label::Unknown);
        assert!("Maybe".parse::<Label>().is_err());
        assert_eq!(serde_json::to_string(&Label::False).unwrap(), "\"False\"");
    }
}
