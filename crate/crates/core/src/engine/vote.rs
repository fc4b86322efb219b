use super::EngineError;

/// Modal answer over repeated runs. Ties go to the label that occurs
/// first in `answers`.
pub fn majority_vote<L: PartialEq + Clone>(answers: &[L]) -> Result<L, EngineError> {
    let mut tally: Vec<(&L, usize)> = Vec::new();
    for a in answers {
        match tally.iter_mut().find(|(l, _)| *l == a) {
            Some((_, c)) => *c += 1,
            None => tally.push((a, 1)),
        }
    }
    // `max_by_key` keeps the last maximum; scan manually to keep the first.
    let mut best: Option<(&L, usize)> = None;
    for (l, c) in tally {
        if best.map_or(true, |(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l.clone()).ok_or(EngineError::EmptyVote)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_majority() {
        assert_eq!(majority_vote(&["T", "T", "F"]).unwrap(), "T");
    }

    #[test]
    fn tie_goes_to_first_seen() {
        assert_eq!(majority_vote(&["T", "F"]).unwrap(), "T");
        assert_eq!(majority_vote(&["F", "T", "T", "F"]).unwrap(), "F");
    }

    #[test]
    fn unanimous() {
        assert_eq!(majority_vote(&["U"; 16]).unwrap(), "U");
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(
            majority_vote::<u8>(&[]),
            Err(EngineError::EmptyVote)
        ));
    }

    proptest! {
        #[test]
        fn strict_majority_is_permutation_invariant(
            mut v in proptest::collection::vec(0u8..3, 1..30),
            seed in any::<u64>(),
        ) {
            let first = majority_vote(&v).unwrap();
            let count = v.iter().filter(|x| **x == first).count();
            let strict = v.iter().all(|x| *x == first || v.iter().filter(|y| *y == x).count() < count);
            // deterministic shuffle
            let mut s = seed;
            for i in (1..v.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            if strict {
                prop_assert_eq!(majority_vote(&v).unwrap(), first);
            }
        }
    }
}
