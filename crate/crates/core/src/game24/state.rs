use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::rational::{Rational, RationalInt};

/// The number every puzzle aims for.
pub const TARGET: i64 = 24;

pub(crate) fn target<I: RationalInt>() -> Rational<I> {
    Rational::from_int(I::from(TARGET).expect("target fits the integer type"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn from_symbol(c: char) -> Option<Op> {
        match c {
            '+' => Some(Op::Add),
            '-' | '−' => Some(Op::Sub),
            '*' | '×' | 'x' => Some(Op::Mul),
            '/' | '÷' => Some(Op::Div),
            _ => None,
        }
    }

    /// `None` on division by zero or overflow.
    pub fn apply<I: RationalInt>(self, a: Rational<I>, b: Rational<I>) -> Option<Rational<I>> {
        match self {
            Op::Add => a.checked_add(b),
            Op::Sub => a.checked_sub(b),
            Op::Mul => a.checked_mul(b),
            Op::Div => a.checked_div(b),
        }
    }
}

/// One arithmetic move `lhs op rhs = result`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArithStep<I> {
    pub lhs: Rational<I>,
    pub rhs: Rational<I>,
    pub op: Op,
    pub result: Rational<I>,
}

impl<I: RationalInt> ArithStep<I> {
    /// Computes the result; `None` for a zero divisor.
    pub fn new(lhs: Rational<I>, op: Op, rhs: Rational<I>) -> Option<Self> {
        let result = op.apply(lhs, rhs)?;
        Some(Self {
            lhs,
            rhs,
            op,
            result,
        })
    }
}

impl<I: RationalInt> fmt::Display for ArithStep<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} = {}",
            self.lhs,
            self.op.symbol(),
            self.rhs,
            self.result
        )
    }
}

impl<I: RationalInt> fmt::Debug for ArithStep<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<I: RationalInt> Serialize for ArithStep<I> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse arithmetic step {0:?}")]
pub struct ParseStepError(pub String);

impl<I: RationalInt> FromStr for ArithStep<I> {
    type Err = ParseStepError;

    /// Parses `a op b = r`. Operands are split on the first operator
    /// surrounded by spaces, so `10 / 14 = 5/7` reads as expected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseStepError(s.to_string());
        let (lhs_expr, result) = s.split_once('=').ok_or_else(err)?;
        let tokens: Vec<&str> = lhs_expr.split_whitespace().collect();
        let [a, op, b] = tokens.as_slice() else {
            return Err(err());
        };
        let mut chars = op.chars();
        let op = match (chars.next(), chars.next()) {
            (Some(c), None) => Op::from_symbol(c).ok_or_else(err)?,
            _ => return Err(err()),
        };
        Ok(Self {
            lhs: a.parse().map_err(|_| err())?,
            rhs: b.parse().map_err(|_| err())?,
            op,
            result: result.trim().parse().map_err(|_| err())?,
        })
    }
}

/// Expression tree recording how a number was produced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr<I> {
    Leaf(Rational<I>),
    Node {
        op: Op,
        lhs: Box<Expr<I>>,
        rhs: Box<Expr<I>>,
    },
}

impl<I: RationalInt> Expr<I> {
    pub fn node(op: Op, lhs: Expr<I>, rhs: Expr<I>) -> Self {
        Expr::Node {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn eval(&self) -> Option<Rational<I>> {
        match self {
            Expr::Leaf(v) => Some(*v),
            Expr::Node { op, lhs, rhs } => op.apply(lhs.eval()?, rhs.eval()?),
        }
    }

    pub fn leaves(&self) -> Vec<Rational<I>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Rational<I>>) {
        match self {
            Expr::Leaf(v) => out.push(*v),
            Expr::Node { lhs, rhs, .. } => {
                lhs.collect_leaves(out);
                rhs.collect_leaves(out);
            }
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Leaf(_) => write!(f, "{self}"),
            Expr::Node { .. } => write!(f, "({self})"),
        }
    }
}

/// Every compound operand is parenthesized; the outermost node is not.
impl<I: RationalInt> fmt::Display for Expr<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Leaf(v) if v.is_integer() => write!(f, "{v}"),
            Expr::Leaf(v) => write!(f, "({v})"),
            Expr::Node { op, lhs, rhs } => {
                lhs.fmt_operand(f)?;
                write!(f, " {} ", op.symbol())?;
                rhs.fmt_operand(f)
            }
        }
    }
}

impl<I: RationalInt> fmt::Debug for Expr<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<I: RationalInt> Serialize for Expr<I> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A solved puzzle written as `expression = 24`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Equation(pub String);

impl Equation {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Why a step was refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepRejection {
    #[error("operand_unavailable")]
    OperandUnavailable,
    #[error("division_by_zero")]
    DivisionByZero,
    #[error("arithmetic")]
    Arithmetic,
    #[error("overflow")]
    Overflow,
}

/// Remaining numbers, the steps taken so far, and one expression per
/// remaining number.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "I: RationalInt"))]
pub struct Game24State<I = i64> {
    numbers: Vec<Rational<I>>,
    steps: Vec<ArithStep<I>>,
    exprs: Vec<Expr<I>>,
    #[serde(skip)]
    inputs: Vec<Rational<I>>,
}

impl<I: RationalInt> fmt::Debug for Game24State<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.numbers.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

impl<I: RationalInt> Game24State<I> {
    pub fn initial(puzzle: &[I]) -> Self {
        let numbers: Vec<Rational<I>> = puzzle.iter().map(|&n| Rational::from_int(n)).collect();
        Self {
            exprs: numbers.iter().map(|&n| Expr::Leaf(n)).collect(),
            inputs: numbers.clone(),
            numbers,
            steps: Vec::new(),
        }
    }

    pub fn numbers(&self) -> &[Rational<I>] {
        &self.numbers
    }

    pub fn steps(&self) -> &[ArithStep<I>] {
        &self.steps
    }

    pub fn exprs(&self) -> &[Expr<I>] {
        &self.exprs
    }

    pub fn inputs(&self) -> &[Rational<I>] {
        &self.inputs
    }

    pub fn sorted_numbers(&self) -> Vec<Rational<I>> {
        let mut v = self.numbers.clone();
        v.sort();
        v
    }

    /// Sorted multiset, e.g. `4,5,6,10`. States with the same key have the
    /// same future.
    pub fn canonical_key(&self) -> String {
        self.sorted_numbers()
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Checks that both operands can be drawn from the multiset and the
    /// stated result is exact. Repeated values resolve to the most recent
    /// occurrence, so a freshly computed number is preferred.
    pub fn check_step(&self, step: &ArithStep<I>) -> Result<(usize, usize), StepRejection> {
        let i = self
            .numbers
            .iter()
            .rposition(|n| *n == step.lhs)
            .ok_or(StepRejection::OperandUnavailable)?;
        let j = (0..self.numbers.len())
            .rev()
            .find(|&k| k != i && self.numbers[k] == step.rhs)
            .ok_or(StepRejection::OperandUnavailable)?;
        if step.op == Op::Div && step.rhs.is_zero() {
            return Err(StepRejection::DivisionByZero);
        }
        let exact = step.op.apply(step.lhs, step.rhs).ok_or(StepRejection::Overflow)?;
        if exact != step.result {
            return Err(StepRejection::Arithmetic);
        }
        Ok((i, j))
    }

    /// The state after `step`: both operands removed, the result appended.
    pub fn apply(&self, step: &ArithStep<I>) -> Result<Self, StepRejection> {
        let (i, j) = self.check_step(step)?;
        let mut numbers = Vec::with_capacity(self.numbers.len() - 1);
        let mut exprs = Vec::with_capacity(self.numbers.len() - 1);
        for k in 0..self.numbers.len() {
            if k != i && k != j {
                numbers.push(self.numbers[k]);
                exprs.push(self.exprs[k].clone());
            }
        }
        numbers.push(step.result);
        exprs.push(Expr::node(
            step.op,
            self.exprs[i].clone(),
            self.exprs[j].clone(),
        ));
        let mut steps = self.steps.clone();
        steps.push(*step);
        Ok(Self {
            numbers,
            steps,
            exprs,
            inputs: self.inputs.clone(),
        })
    }

    /// Every distinct step over unordered pairs, in a fixed order.
    ///
    /// Pairs `(a, b)` with `a <= b` are visited in ascending order of the
    /// sorted multiset, each value pair once. Per pair: `a + b`, `b - a`,
    /// `a * b`, `a / b`, `b / a`. Subtraction always takes the smaller
    /// operand from the larger (any target reachable through a negative
    /// intermediate is also reachable without one); `b / a` is skipped when
    /// `a == b`, and zero divisors are skipped.
    pub fn enumerate_steps(&self) -> Vec<ArithStep<I>> {
        let sorted = self.sorted_numbers();
        let mut out = Vec::new();
        let mut seen_pairs: Vec<(Rational<I>, Rational<I>)> = Vec::new();
        for x in 0..sorted.len() {
            for y in (x + 1)..sorted.len() {
                let (a, b) = (sorted[x], sorted[y]);
                if seen_pairs.contains(&(a, b)) {
                    continue;
                }
                seen_pairs.push((a, b));
                let mut push = |l, op, r| {
                    if let Some(s) = ArithStep::new(l, op, r) {
                        out.push(s);
                    }
                };
                push(a, Op::Add, b);
                push(b, Op::Sub, a);
                push(a, Op::Mul, b);
                if !b.is_zero() {
                    push(a, Op::Div, b);
                }
                if a != b && !a.is_zero() {
                    push(b, Op::Div, a);
                }
            }
        }
        out
    }

    /// The finished equation, if exactly one number remains and it is 24.
    pub fn report(&self) -> Option<Equation> {
        match (self.numbers.as_slice(), self.exprs.as_slice()) {
            ([n], [e]) if *n == target::<I>() => Some(Equation(format!("{e} = {TARGET}"))),
            _ => None,
        }
    }

    /// Structural invariants: one expression per number, each evaluating to
    /// its number, and the leaves together forming the original inputs.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.numbers.len() + self.steps.len() != self.inputs.len() {
            return Err("size does not match step count".into());
        }
        if self.numbers.len() != self.exprs.len() {
            return Err("expression count mismatch".into());
        }
        let mut leaves = Vec::new();
        for (n, e) in self.numbers.iter().zip(&self.exprs) {
            if e.eval() != Some(*n) {
                return Err(format!("{e} does not evaluate to {n}"));
            }
            leaves.extend(e.leaves());
        }
        leaves.sort();
        let mut inputs = self.inputs.clone();
        inputs.sort();
        if leaves != inputs {
            return Err("leaves are not the original inputs".into());
        }
        Ok(())
    }
}
