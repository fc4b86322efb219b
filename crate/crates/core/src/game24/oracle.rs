//! Brute-force solvability checks, independent of the search engine.

use std::collections::BTreeSet;

use super::rational::{Rational, RationalInt};
use super::state::{target, Equation, Expr, Op, TARGET};

/// The five binary-tree shapes over four ordered leaves.
#[derive(Clone, Copy, Debug)]
enum Shape {
    LeftDeep,  // ((a b) c) d
    LeftMid,   // (a (b c)) d
    Balanced,  // (a b) (c d)
    RightMid,  // a ((b c) d)
    RightDeep, // a (b (c d))
}

const SHAPES: [Shape; 5] = [
    Shape::LeftDeep,
    Shape::LeftMid,
    Shape::Balanced,
    Shape::RightMid,
    Shape::RightDeep,
];

fn build<I: RationalInt>(shape: Shape, v: [Rational<I>; 4], o: [Op; 3]) -> Expr<I> {
    let l = |i: usize| Expr::Leaf(v[i]);
    match shape {
        Shape::LeftDeep => Expr::node(o[2], Expr::node(o[1], Expr::node(o[0], l(0), l(1)), l(2)), l(3)),
        Shape::LeftMid => Expr::node(o[2], Expr::node(o[0], l(0), Expr::node(o[1], l(1), l(2))), l(3)),
        Shape::Balanced => Expr::node(o[1], Expr::node(o[0], l(0), l(1)), Expr::node(o[2], l(2), l(3))),
        Shape::RightMid => Expr::node(o[0], l(0), Expr::node(o[2], Expr::node(o[1], l(1), l(2)), l(3))),
        Shape::RightDeep => Expr::node(o[0], l(0), Expr::node(o[1], l(1), Expr::node(o[2], l(2), l(3)))),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Searches every leaf ordering, operator triple and tree shape with exact
/// arithmetic (negative intermediates included). Returns the first witness
/// in a fixed enumeration order.
pub fn oracle_solvable<I: RationalInt>(puzzle: &[I; 4]) -> Option<Equation> {
    let goal = target::<I>();
    for perm in permutations(4) {
        let v = [0, 1, 2, 3].map(|i| Rational::from_int(puzzle[perm[i]]));
        for a in Op::ALL {
            for b in Op::ALL {
                for c in Op::ALL {
                    for shape in SHAPES {
                        let e = build(shape, v, [a, b, c]);
                        if e.eval() == Some(goal) {
                            return Some(Equation(format!("{e} = {TARGET}")));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Every value obtainable by repeatedly combining two numbers of the
/// multiset until one remains.
pub fn reachable_values<I: RationalInt>(numbers: &[Rational<I>]) -> BTreeSet<Rational<I>> {
    let mut out = BTreeSet::new();
    if numbers.len() == 1 {
        out.insert(numbers[0]);
        return out;
    }
    for i in 0..numbers.len() {
        for j in 0..numbers.len() {
            if i == j {
                continue;
            }
            let rest: Vec<Rational<I>> = numbers
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, v)| *v)
                .collect();
            for op in Op::ALL {
                if let Some(v) = op.apply(numbers[i], numbers[j]) {
                    let mut next = rest.clone();
                    next.push(v);
                    out.extend(reachable_values(&next));
                }
            }
        }
    }
    out
}

/// Whether the multiset can still be combined into 24.
pub fn can_reach_target<I: RationalInt>(numbers: &[Rational<I>]) -> bool {
    let goal = target::<I>();
    if numbers.len() == 1 {
        return numbers[0] == goal;
    }
    for i in 0..numbers.len() {
        for j in 0..numbers.len() {
            if i == j {
                continue;
            }
            for op in Op::ALL {
                if let Some(v) = op.apply(numbers[i], numbers[j]) {
                    let mut next: Vec<Rational<I>> = numbers
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i && *k != j)
                        .map(|(_, v)| *v)
                        .collect();
                    next.push(v);
                    if can_reach_target(&next) {
                        return true;
                    }
                }
            }
        }
    }
    false
}
