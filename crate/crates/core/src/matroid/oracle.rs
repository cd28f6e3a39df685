//! Brute-force reference algorithms over all subsets of the ground set.
//!
//! Everything here enumerates `2^n` (or `4^n`) subsets directly and shares no
//! code with the decomposition dynamic programs it is used to check.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use super::{ElementSet, MatroidInstance};
use crate::tutte::WhitneyTable;

/// Largest ground set for `2^n` enumerations.
pub const MAX_BRUTE: usize = 20;
/// Largest ground set for the `4^n` pair enumeration in [`brute_axiom_check`].
pub const MAX_PAIR_BRUTE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("brute force over {n} elements exceeds the limit of {max}")]
pub struct TooLarge {
    pub n: usize,
    pub max: usize,
}

fn guard(n: usize, max: usize) -> Result<(), TooLarge> {
    if n > max {
        Err(TooLarge { n, max })
    } else {
        Ok(())
    }
}

/// Ranks of all subsets, indexed by bitmask.
pub fn rank_table(m: &MatroidInstance) -> Result<Vec<u32>, TooLarge> {
    let n = m.len();
    guard(n, MAX_BRUTE)?;
    Ok((0..1u64 << n)
        .map(|mask| m.rank(&ElementSet::from_mask(n, mask)) as u32)
        .collect())
}

/// Counts subsets by `(size, rank)`.
pub fn brute_whitney(m: &MatroidInstance) -> Result<WhitneyTable, TooLarge> {
    let table = rank_table(m)?;
    let n = m.len();
    let mut w = WhitneyTable::zero(n, table[(1usize << n) - 1] as usize);
    let mut counts = vec![vec![0u64; n + 1]; n + 1];
    for (mask, &r) in table.iter().enumerate() {
        counts[mask.count_ones() as usize][r as usize] += 1;
    }
    for (size, row) in counts.iter().enumerate() {
        for (r, &c) in row.iter().enumerate() {
            if c > 0 {
                w.add(size, r, &BigUint::from(c));
            }
        }
    }
    Ok(w)
}

/// Number of bases, independent sets and spanning sets, by enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisCounts {
    pub bases: u64,
    pub independent: u64,
    pub spanning: u64,
}

pub fn count_bases(m: &MatroidInstance) -> Result<BasisCounts, TooLarge> {
    let table = rank_table(m)?;
    let full = *table.last().expect("nonempty table");
    let mut c = BasisCounts {
        bases: 0,
        independent: 0,
        spanning: 0,
    };
    for (mask, &r) in table.iter().enumerate() {
        let indep = mask.count_ones() == r;
        let spans = r == full;
        c.independent += indep as u64;
        c.spanning += spans as u64;
        c.bases += (indep && spans) as u64;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `r(∅) ≠ 0`
    Normalization,
    /// `r({e}) ∉ {0, 1}`
    SingletonBound,
    /// `A ⊆ B` but `r(A) > r(B)`
    Monotonicity,
    /// `r(A ∪ B) + r(A ∩ B) > r(A) + r(B)`
    Submodularity,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Normalization => "normalization",
            ViolationKind::SingletonBound => "singleton bound",
            ViolationKind::Monotonicity => "monotonicity",
            ViolationKind::Submodularity => "submodularity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomVerdict {
    Valid,
    Violation {
        kind: ViolationKind,
        a: ElementSet,
        b: ElementSet,
    },
}

impl AxiomVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, AxiomVerdict::Valid)
    }
}

/// Checks a full rank table (indexed by bitmask) against the rank axioms by
/// direct enumeration, including every pair `(A, B)` for submodularity.
/// Returns the first violation found.
pub fn brute_axiom_check(n: usize, table: &[i64]) -> Result<AxiomVerdict, TooLarge> {
    guard(n, MAX_PAIR_BRUTE)?;
    assert_eq!(table.len(), 1 << n, "rank table length");
    let set = |mask: usize| ElementSet::from_mask(n, mask as u64);
    let violation = |kind, a: usize, b: usize| {
        Ok(AxiomVerdict::Violation {
            kind,
            a: set(a),
            b: set(b),
        })
    };
    if table[0] != 0 {
        return violation(ViolationKind::Normalization, 0, 0);
    }
    for e in 0..n {
        if !(0..=1).contains(&table[1 << e]) {
            return violation(ViolationKind::SingletonBound, 1 << e, 1 << e);
        }
    }
    let full = (1usize << n) - 1;
    for b in 0..=full {
        // all subsets a of b, in increasing order
        let mut a = 0usize;
        loop {
            if table[a] > table[b] {
                return violation(ViolationKind::Monotonicity, a, b);
            }
            if a == b {
                break;
            }
            a = (a.wrapping_sub(b)) & b;
        }
    }
    for a in 0..=full {
        for b in (a + 1)..=full {
            if table[a | b] + table[a & b] > table[a] + table[b] {
                return violation(ViolationKind::Submodularity, a, b);
            }
        }
    }
    Ok(AxiomVerdict::Valid)
}

/// Validates a rank table through the local axioms: `r(∅) = 0`,
/// `r(X) ≤ r(X+e) ≤ r(X)+1` and `r(X+e) + r(X+f) ≥ r(X+e+f) + r(X)`.
/// Together these are equivalent to the global rank axioms.
pub fn check_local_axioms(n: usize, table: &[u32]) -> Result<(), String> {
    if table[0] != 0 {
        return Err("rank of the empty set is not 0".into());
    }
    for x in 0..table.len() {
        let rx = table[x];
        for e in (0..n).filter(|e| x >> e & 1 == 0) {
            let xe = x | 1 << e;
            if table[xe] < rx || table[xe] > rx + 1 {
                return Err(format!("unit increase fails adding {e} to mask {x:#b}"));
            }
            for f in (e + 1..n).filter(|f| x >> f & 1 == 0) {
                let xf = x | 1 << f;
                if table[xe] + table[xf] < table[xe | xf] + rx {
                    return Err(format!(
                        "submodularity fails at mask {x:#b} with elements {e}, {f}"
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    fn u23() -> MatroidInstance {
        MatroidInstance::from_matrix(FieldSpec::gf2(), &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap()
    }

    fn entries(w: &WhitneyTable) -> Vec<(usize, usize, u64)> {
        w.nonzero()
            .map(|(s, r, c)| (s, r, u64::try_from(c).unwrap()))
            .collect()
    }

    #[test]
    fn whitney_examples() {
        let u12 = MatroidInstance::uniform(1, 2).unwrap();
        assert_eq!(
            entries(&brute_whitney(&u12).unwrap()),
            vec![(0, 0, 1), (1, 1, 2), (2, 1, 1)]
        );
        let lp = MatroidInstance::from_matrix(FieldSpec::gf2(), &[vec![0]]).unwrap();
        assert_eq!(entries(&brute_whitney(&lp).unwrap()), vec![(0, 0, 1), (1, 0, 1)]);
        assert_eq!(
            entries(&brute_whitney(&u23()).unwrap()),
            vec![(0, 0, 1), (1, 1, 3), (2, 2, 3), (3, 2, 1)]
        );
    }

    #[test]
    fn axiom_check_examples() {
        let t: Vec<i64> = rank_table(&u23()).unwrap().into_iter().map(i64::from).collect();
        assert_eq!(brute_axiom_check(3, &t).unwrap(), AxiomVerdict::Valid);

        let bad = [0, 1, 1, 0];
        assert_eq!(
            brute_axiom_check(2, &bad).unwrap(),
            AxiomVerdict::Violation {
                kind: ViolationKind::Monotonicity,
                a: ElementSet::from_mask(2, 0b01),
                b: ElementSet::from_mask(2, 0b11),
            }
        );
        assert!(brute_axiom_check(3, &[0; 8]).unwrap().is_valid());
        assert!(brute_axiom_check(13, &[]).is_err());
    }

    #[test]
    fn axiom_check_kinds() {
        let kind = |t: &[i64], n| match brute_axiom_check(n, t).unwrap() {
            AxiomVerdict::Violation { kind, .. } => Some(kind),
            AxiomVerdict::Valid => None,
        };
        assert_eq!(kind(&[1, 1], 1), Some(ViolationKind::Normalization));
        assert_eq!(kind(&[0, 2], 1), Some(ViolationKind::SingletonBound));
        // monotone with unit singletons, but r(E) = 3 jumps over every pair
        let t = [0, 1, 1, 1, 1, 1, 1, 3];
        assert_eq!(kind(&t, 3), Some(ViolationKind::Submodularity));
    }

    #[test]
    fn local_axioms_agree_with_pair_check() {
        // every monotone 0/1/2-valued table on 3 elements with r(∅)=0
        for code in 0..3u32.pow(7) {
            let mut t = vec![0u32; 8];
            let mut c = code;
            for slot in t.iter_mut().skip(1) {
                *slot = c % 3;
                c /= 3;
            }
            let signed: Vec<i64> = t.iter().map(|&x| x as i64).collect();
            assert_eq!(
                check_local_axioms(3, &t).is_ok(),
                brute_axiom_check(3, &signed).unwrap().is_valid(),
                "{t:?}"
            );
        }
    }

    #[test]
    fn basis_counts() {
        let c = count_bases(&u23()).unwrap();
        assert_eq!(c, BasisCounts { bases: 3, independent: 7, spanning: 4 });
    }
}
