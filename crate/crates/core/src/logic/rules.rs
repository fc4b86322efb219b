use std::fmt;

use serde::{Deserialize, Serialize};

use super::statement::Statement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InferenceRule {
    UniversalInstantiation,
    ModusPonens,
    Contrapositive,
    DisjunctiveSyllogism,
    ConjunctionElimination,
    ConjunctionIntroduction,
}

impl InferenceRule {
    /// Order in which the systematic proposer tries rules: cheap
    /// decompositions first, instantiation and conjunction building last.
    pub const ALL: [InferenceRule; 6] = [
        InferenceRule::ConjunctionElimination,
        InferenceRule::Contrapositive,
        InferenceRule::ModusPonens,
        InferenceRule::DisjunctiveSyllogism,
        InferenceRule::UniversalInstantiation,
        InferenceRule::ConjunctionIntroduction,
    ];

    pub fn arity(self) -> usize {
        match self {
            InferenceRule::Contrapositive | InferenceRule::ConjunctionElimination => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InferenceRule::UniversalInstantiation => "universal_instantiation",
            InferenceRule::ModusPonens => "modus_ponens",
            InferenceRule::Contrapositive => "contrapositive",
            InferenceRule::DisjunctiveSyllogism => "disjunctive_syllogism",
            InferenceRule::ConjunctionElimination => "conjunction_elimination",
            InferenceRule::ConjunctionIntroduction => "conjunction_introduction",
        }
    }
}

impl fmt::Display for InferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every conclusion `rule` licenses from `antecedents`, canonicalized, in a
/// fixed order. Empty on an arity or shape mismatch.
///
/// Antecedent order matters for the binary rules: the implication,
/// disjunction or universal comes first, the fact second.
pub fn derive(rule: InferenceRule, antecedents: &[Statement]) -> Vec<Statement> {
    if antecedents.len() != rule.arity() {
        return Vec::new();
    }
    let ante: Vec<Statement> = antecedents.iter().map(Statement::canonical).collect();
    let mut out = match rule {
        InferenceRule::ConjunctionElimination => match &ante[0] {
            Statement::And(a, b) => vec![(**a).clone(), (**b).clone()],
            _ => Vec::new(),
        },
        InferenceRule::Contrapositive => match &ante[0] {
            Statement::Implies(a, b) => vec![Statement::implies(b.negated(), a.negated())],
            Statement::Forall(v, body) => match &**body {
                Statement::Implies(a, b) => {
                    vec![Statement::forall(v.clone(), b.negated(), a.negated())]
                }
                _ => Vec::new(),
            },
            _ => Vec::new(),
        },
        InferenceRule::ModusPonens => {
            let fact = &ante[1];
            match &ante[0] {
                Statement::Implies(a, b) if **a == *fact => vec![(**b).clone()],
                Statement::Forall(v, body) => match &**body {
                    Statement::Implies(a, b) => fact
                        .constants()
                        .into_iter()
                        .filter(|c| a.substitute(v, c).canonical() == *fact)
                        .map(|c| b.substitute(v, &c))
                        .collect(),
                    _ => Vec::new(),
                },
                _ => Vec::new(),
            }
        }
        InferenceRule::DisjunctiveSyllogism => match &ante[0] {
            Statement::Or(a, b) => {
                let mut v = Vec::new();
                if ante[1] == a.negated() {
                    v.push((**b).clone());
                }
                if ante[1] == b.negated() {
                    v.push((**a).clone());
                }
                v
            }
            _ => Vec::new(),
        },
        InferenceRule::UniversalInstantiation => match &ante[0] {
            Statement::Forall(v, body) => ante[1]
                .constants()
                .into_iter()
                .map(|c| body.substitute(v, &c))
                .collect(),
            _ => Vec::new(),
        },
        InferenceRule::ConjunctionIntroduction => {
            let (a, b) = (&ante[0], &ante[1]);
            if a != b && a.is_literal() && b.is_literal() && a.is_ground() && b.is_ground() {
                vec![Statement::and(a.clone(), b.clone())]
            } else {
                Vec::new()
            }
        }
    };
    out = out
        .into_iter()
        .map(|s| s.canonical())
        .filter(|s| s.free_vars().is_empty())
        .collect();
    let mut seen = std::collections::HashSet::new();
    out.retain(|s| seen.insert(s.clone()));
    out
}

/// First conclusion of [`derive`], if any.
pub fn apply_rule(rule: InferenceRule, antecedents: &[Statement]) -> Option<Statement> {
    derive(rule, antecedents).into_iter().next()
}
