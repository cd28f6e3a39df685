//! Vectors and canonical subspaces of GF(q)^d.
//!
//! A [`Subspace`] always stores its basis in reduced row echelon form with no
//! zero rows, so structural equality is subspace equality. Over GF(2) rows are
//! bit-packed into `u64` words.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::field::{Elem, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("entry {0} is not an element of the field")]
    BadEntry(Elem),
    #[error("subspace enumeration guard: dimension {dim} over GF({q}) ({reason})")]
    EnumerationGuard { dim: usize, q: u32, reason: &'static str },
}

/// Largest dimension accepted by [`enumerate_subspaces`].
pub const MAX_ENUM_DIM: usize = 6;
/// Largest number of subspaces [`enumerate_subspaces`] will materialize.
pub const MAX_ENUM_COUNT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVector {
    entries: Vec<Elem>,
}

impl FVector {
    pub fn new(entries: Vec<Elem>) -> Self {
        FVector { entries }
    }

    pub fn zero(d: usize) -> Self {
        FVector { entries: vec![0; d] }
    }

    /// Standard basis vector `e_i` of GF(q)^d.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = FVector::zero(d);
        v.entries[i] = 1;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn check(&self, field: &FieldSpec) -> Result<(), LinalgError> {
        match self.entries.iter().find(|&&e| e >= field.order()) {
            Some(&e) => Err(LinalgError::BadEntry(e)),
            None => Ok(()),
        }
    }
}

impl From<Vec<Elem>> for FVector {
    fn from(entries: Vec<Elem>) -> Self {
        FVector::new(entries)
    }
}

/// Row operations needed by the incremental echelon builder.
trait EchelonRow: Clone {
    fn leading(&self) -> Option<usize>;
    fn get(&self, col: usize) -> Elem;
    /// `self -= c * other`
    fn sub_scaled(&mut self, c: Elem, other: &Self, f: &FieldSpec);
    fn scale(&mut self, c: Elem, f: &FieldSpec);
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn from_elems(entries: &[Elem]) -> Self {
        let mut words = vec![0u64; entries.len().div_ceil(64)];
        for (i, &e) in entries.iter().enumerate() {
            if e & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitRow(words)
    }

    fn to_elems(&self, d: usize) -> Vec<Elem> {
        (0..d).map(|i| self.get(i)).collect()
    }
}

impl EchelonRow for BitRow {
    fn leading(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    #[inline]
    fn get(&self, col: usize) -> Elem {
        ((self.0[col / 64] >> (col % 64)) & 1) as Elem
    }

    #[inline]
    fn sub_scaled(&mut self, c: Elem, other: &Self, _f: &FieldSpec) {
        if c != 0 {
            for (a, b) in self.0.iter_mut().zip(&other.0) {
                *a ^= b;
            }
        }
    }

    fn scale(&mut self, _c: Elem, _f: &FieldSpec) {}
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DenseRow(Vec<Elem>);

impl EchelonRow for DenseRow {
    fn leading(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    #[inline]
    fn get(&self, col: usize) -> Elem {
        self.0[col]
    }

    fn sub_scaled(&mut self, c: Elem, other: &Self, f: &FieldSpec) {
        if c == 0 {
            return;
        }
        let nc = f.neg(c);
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            if b != 0 {
                *a = f.add(*a, f.mul(nc, b));
            }
        }
    }

    fn scale(&mut self, c: Elem, f: &FieldSpec) {
        for a in &mut self.0 {
            *a = f.mul(*a, c);
        }
    }
}

/// Reduced row echelon basis built one vector at a time.
#[derive(Clone)]
struct Echelon<R> {
    rows: Vec<R>,
    pivots: Vec<usize>,
}

impl<R: EchelonRow> Echelon<R> {
    fn new() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Reduces `v` against the basis in place; returns its leading column if
    /// it stays nonzero.
    fn reduce(&self, v: &mut R, f: &FieldSpec) -> Option<usize> {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v.get(pc);
            v.sub_scaled(c, row, f);
        }
        v.leading()
    }

    fn insert(&mut self, mut v: R, f: &FieldSpec) -> bool {
        let Some(lead) = self.reduce(&mut v, f) else {
            return false;
        };
        let inv = f.inv(v.get(lead)).expect("nonzero pivot");
        v.scale(inv, f);
        for row in &mut self.rows {
            let c = row.get(lead);
            row.sub_scaled(c, &v, f);
        }
        let pos = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(pos, lead);
        self.rows.insert(pos, v);
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Basis {
    Bits(Vec<BitRow>),
    Dense(Vec<DenseRow>),
}

/// Canonical subspace of GF(q)^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Basis,
}

impl Subspace {
    /// The zero subspace of GF(q)^d.
    pub fn trivial(field: &FieldSpec, d: usize) -> Self {
        let basis = if field.is_binary() {
            Basis::Bits(Vec::new())
        } else {
            Basis::Dense(Vec::new())
        };
        Subspace { ambient: d, basis }
    }

    pub fn full(field: &FieldSpec, d: usize) -> Self {
        let rows: Vec<_> = (0..d).map(|i| FVector::unit(d, i)).collect();
        rref(&rows, d, field).expect("unit vectors")
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Bits(r) => r.len(),
            Basis::Dense(r) => r.len(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    /// Basis rows in reduced row echelon form.
    pub fn basis(&self) -> Vec<FVector> {
        match &self.basis {
            Basis::Bits(rows) => rows
                .iter()
                .map(|r| FVector::new(r.to_elems(self.ambient)))
                .collect(),
            Basis::Dense(rows) => rows.iter().map(|r| FVector::new(r.0.clone())).collect(),
        }
    }

    pub fn contains(&self, v: &FVector, field: &FieldSpec) -> Result<bool, LinalgError> {
        self.same_ambient(v.dim())?;
        Ok(match &self.basis {
            Basis::Bits(rows) => {
                let ech = echelon_from(rows.clone());
                ech.reduce(&mut BitRow::from_elems(v.entries()), field).is_none()
            }
            Basis::Dense(rows) => {
                let ech = echelon_from(rows.clone());
                ech.reduce(&mut DenseRow(v.entries().to_vec()), field).is_none()
            }
        })
    }

    /// `self ⊆ other`
    pub fn is_subspace_of(&self, other: &Subspace, field: &FieldSpec) -> Result<bool, LinalgError> {
        other.same_ambient(self.ambient)?;
        Ok(hull(self, other, field)?.dim() == other.dim())
    }

    fn same_ambient(&self, d: usize) -> Result<(), LinalgError> {
        if self.ambient == d {
            Ok(())
        } else {
            Err(LinalgError::AmbientMismatch(self.ambient, d))
        }
    }

    /// Lexicographic comparison of the canonical bases, shorter bases first.
    fn cmp_canonical(&self, other: &Subspace) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.basis().cmp(&other.basis()))
    }
}

fn echelon_from<R: EchelonRow>(rows: Vec<R>) -> Echelon<R> {
    let pivots = rows.iter().map(|r| r.leading().expect("nonzero row")).collect();
    Echelon { rows, pivots }
}

/// Canonical span of `rows`, all of ambient dimension `d`.
pub fn rref(rows: &[FVector], d: usize, field: &FieldSpec) -> Result<Subspace, LinalgError> {
    for r in rows {
        if r.dim() != d {
            return Err(LinalgError::AmbientMismatch(d, r.dim()));
        }
        r.check(field)?;
    }
    let basis = if field.is_binary() {
        let mut ech = Echelon::new();
        for r in rows {
            ech.insert(BitRow::from_elems(r.entries()), field);
        }
        Basis::Bits(ech.rows)
    } else {
        let mut ech = Echelon::new();
        for r in rows {
            ech.insert(DenseRow(r.entries().to_vec()), field);
        }
        Basis::Dense(ech.rows)
    };
    Ok(Subspace { ambient: d, basis })
}

/// Rank of a family of vectors of ambient dimension `d`, without building a
/// canonical basis.
pub fn rank_of<'a>(
    rows: impl IntoIterator<Item = &'a FVector>,
    d: usize,
    field: &FieldSpec,
) -> usize {
    if field.is_binary() {
        let mut ech = Echelon::new();
        for r in rows {
            debug_assert_eq!(r.dim(), d);
            ech.insert(BitRow::from_elems(r.entries()), field);
        }
        ech.rows.len()
    } else {
        let mut ech = Echelon::new();
        for r in rows {
            debug_assert_eq!(r.dim(), d);
            ech.insert(DenseRow(r.entries().to_vec()), field);
        }
        ech.rows.len()
    }
}

/// Linear hull of `a ∪ b`.
pub fn hull(a: &Subspace, b: &Subspace, field: &FieldSpec) -> Result<Subspace, LinalgError> {
    a.same_ambient(b.ambient)?;
    if b.dim() > a.dim() {
        return hull(b, a, field);
    }
    let basis = match (&a.basis, &b.basis) {
        (Basis::Bits(ra), Basis::Bits(rb)) => {
            let mut ech = echelon_from(ra.clone());
            for r in rb {
                ech.insert(r.clone(), field);
            }
            Basis::Bits(ech.rows)
        }
        (Basis::Dense(ra), Basis::Dense(rb)) => {
            let mut ech = echelon_from(ra.clone());
            for r in rb {
                ech.insert(r.clone(), field);
            }
            Basis::Dense(ech.rows)
        }
        _ => unreachable!("subspaces over different fields"),
    };
    Ok(Subspace {
        ambient: a.ambient,
        basis,
    })
}

/// Intersection `a ∩ b` (Zassenhaus: echelonize `[a|a]` over `[b|0]`).
pub fn intersect(a: &Subspace, b: &Subspace, field: &FieldSpec) -> Result<Subspace, LinalgError> {
    a.same_ambient(b.ambient)?;
    let d = a.ambient;
    if a.is_trivial() || b.is_trivial() {
        return Ok(Subspace::trivial(field, d));
    }
    let (ua, ub) = (a.basis(), b.basis());
    let doubled = |u: &FVector, copy: bool| {
        let mut e = u.entries().to_vec();
        if copy {
            e.extend_from_slice(u.entries());
        } else {
            e.extend(std::iter::repeat_n(0, d));
        }
        FVector::new(e)
    };
    let rows: Vec<FVector> = ua
        .iter()
        .map(|u| doubled(u, true))
        .chain(ub.iter().map(|u| doubled(u, false)))
        .collect();
    let wide = rref(&rows, 2 * d, field)?;
    let tails: Vec<FVector> = wide
        .basis()
        .into_iter()
        .filter(|r| r.entries()[..d].iter().all(|&e| e == 0))
        .map(|r| FVector::new(r.entries()[d..].to_vec()))
        .collect();
    rref(&tails, d, field)
}

/// Gaussian binomial coefficient `[k choose i]_q`.
pub fn gaussian_binomial(k: usize, i: usize, q: u64) -> BigUint {
    if i > k {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..i {
        num *= q.pow((k - j) as u32) - 1u32;
        den *= q.pow((j + 1) as u32) - 1u32;
    }
    num / den
}

/// Total number of subspaces of a `k`-dimensional space over GF(q).
pub fn galois_number(k: usize, q: u64) -> BigUint {
    (0..=k).map(|i| gaussian_binomial(k, i, q)).sum()
}

/// All subspaces of `space`, canonical and deduplicated, ordered by dimension
/// and then lexicographically by canonical basis.
pub fn enumerate_subspaces(space: &Subspace, field: &FieldSpec) -> Result<Vec<Subspace>, LinalgError> {
    let k = space.dim();
    let q = field.order();
    if k > MAX_ENUM_DIM {
        return Err(LinalgError::EnumerationGuard {
            dim: k,
            q,
            reason: "dimension too large",
        });
    }
    let count = galois_number(k, q as u64);
    if count.to_u64().is_none_or(|c| c > MAX_ENUM_COUNT) {
        return Err(LinalgError::EnumerationGuard {
            dim: k,
            q,
            reason: "too many subspaces",
        });
    }
    let generators = space.basis();
    let d = space.ambient;
    let mut out = Vec::new();
    for pivots in (0..=k).flat_map(|i| combinations(k, i)) {
        // free coordinates: row r may be nonzero at non-pivot columns right of its pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| ((p + 1)..k).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = (q as u64).pow(free.len() as u32);
        for idx in 0..total {
            let mut coeffs = vec![vec![0 as Elem; k]; pivots.len()];
            for (r, &p) in pivots.iter().enumerate() {
                coeffs[r][p] = 1;
            }
            let mut rest = idx;
            for &(r, c) in &free {
                coeffs[r][c] = (rest % q as u64) as Elem;
                rest /= q as u64;
            }
            let rows: Vec<FVector> = coeffs
                .iter()
                .map(|cs| combine(cs, &generators, d, field))
                .collect();
            out.push(rref(&rows, d, field)?);
        }
    }
    out.sort_by(|a, b| a.cmp_canonical(b));
    out.dedup();
    Ok(out)
}

fn combine(coeffs: &[Elem], gens: &[FVector], d: usize, field: &FieldSpec) -> FVector {
    let mut acc = vec![0; d];
    for (&c, g) in coeffs.iter().zip(gens) {
        if c == 0 {
            continue;
        }
        for (a, &e) in acc.iter_mut().zip(g.entries()) {
            *a = field.add(*a, field.mul(c, e));
        }
    }
    FVector::new(acc)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[Elem]) -> FVector {
        FVector::new(e.to_vec())
    }

    fn span(rows: &[&[Elem]], d: usize, f: &FieldSpec) -> Subspace {
        let rows: Vec<_> = rows.iter().map(|r| v(r)).collect();
        rref(&rows, d, f).unwrap()
    }

    /// Every vector of GF(q)^d.
    fn all_vectors(d: usize, q: u32) -> Vec<FVector> {
        (0..(q as u64).pow(d as u32))
            .map(|mut i| {
                let e = (0..d)
                    .map(|_| {
                        let x = (i % q as u64) as Elem;
                        i /= q as u64;
                        x
                    })
                    .collect();
                FVector::new(e)
            })
            .collect()
    }

    #[test]
    fn rref_examples() {
        let f2 = FieldSpec::gf2();
        let s = span(&[&[1, 0], &[0, 1], &[1, 1]], 2, &f2);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), vec![v(&[1, 0]), v(&[0, 1])]);

        let empty = rref(&[], 3, &f2).unwrap();
        assert_eq!(empty.dim(), 0);
        assert_eq!(empty, Subspace::trivial(&f2, 3));

        let f3 = FieldSpec::new(3, 1).unwrap();
        let s = span(&[&[1, 1], &[2, 2]], 2, &f3);
        assert_eq!(s.basis(), vec![v(&[1, 1])]);
    }

    #[test]
    fn rref_rejects_mixed_dimensions() {
        let f2 = FieldSpec::gf2();
        assert_eq!(
            rref(&[v(&[1, 0]), v(&[1, 0, 1])], 2, &f2),
            Err(LinalgError::AmbientMismatch(2, 3))
        );
        assert!(matches!(
            rref(&[v(&[3, 0])], 2, &f2),
            Err(LinalgError::BadEntry(3))
        ));
    }

    #[test]
    fn hull_examples() {
        let f2 = FieldSpec::gf2();
        let a = span(&[&[1, 0]], 2, &f2);
        let b = span(&[&[0, 1]], 2, &f2);
        assert_eq!(hull(&a, &b, &f2).unwrap(), Subspace::full(&f2, 2));
        let t = Subspace::trivial(&f2, 2);
        assert_eq!(hull(&a, &t, &f2).unwrap(), a);

        let a = span(&[&[1, 0, 0]], 3, &f2);
        let b = span(&[&[1, 1, 0]], 3, &f2);
        let h = hull(&a, &b, &f2).unwrap();
        assert_eq!(h, span(&[&[1, 0, 0], &[0, 1, 0]], 3, &f2));
        // closure check by enumeration: exactly the vectors with last coordinate 0
        let members: Vec<_> = all_vectors(3, 2)
            .into_iter()
            .filter(|x| h.contains(x, &f2).unwrap())
            .collect();
        assert_eq!(members.len(), 4);
        assert!(members.iter().all(|x| x.entries()[2] == 0));
    }

    #[test]
    fn intersect_examples() {
        let f2 = FieldSpec::gf2();
        let plane = Subspace::full(&f2, 2);
        let diag = span(&[&[1, 1]], 2, &f2);
        assert_eq!(intersect(&plane, &diag, &f2).unwrap(), diag);
        let a = span(&[&[1, 0]], 2, &f2);
        let b = span(&[&[0, 1]], 2, &f2);
        assert!(intersect(&a, &b, &f2).unwrap().is_trivial());
        assert!(matches!(
            intersect(&a, &Subspace::trivial(&f2, 3), &f2),
            Err(LinalgError::AmbientMismatch(2, 3))
        ));
    }

    #[test]
    fn intersect_matches_membership_brute_force_gf3() {
        use rand::{Rng, SeedableRng};
        let f3 = FieldSpec::new(3, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let universe = all_vectors(4, 3);
        for _ in 0..40 {
            let rand_space = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(0..=3);
                let rows: Vec<_> = (0..k)
                    .map(|_| FVector::new((0..4).map(|_| rng.gen_range(0..3)).collect()))
                    .collect();
                rref(&rows, 4, &f3).unwrap()
            };
            let a = rand_space(&mut rng);
            let b = rand_space(&mut rng);
            let i = intersect(&a, &b, &f3).unwrap();
            let brute: Vec<_> = universe
                .iter()
                .filter(|x| a.contains(x, &f3).unwrap() && b.contains(x, &f3).unwrap())
                .collect();
            assert_eq!(brute.len() as u64, 3u64.pow(i.dim() as u32));
            assert!(brute.iter().all(|x| i.contains(x, &f3).unwrap()));
        }
    }

    #[test]
    fn enumerate_small_spaces() {
        let f2 = FieldSpec::gf2();
        assert_eq!(
            enumerate_subspaces(&Subspace::trivial(&f2, 4), &f2).unwrap(),
            vec![Subspace::trivial(&f2, 4)]
        );
        let plane = span(&[&[1, 0, 1, 0], &[0, 1, 1, 1]], 4, &f2);
        let subs = enumerate_subspaces(&plane, &f2).unwrap();
        assert_eq!(subs.len(), 5);
        assert_eq!(subs[0].dim(), 0);
        assert_eq!(subs[4], plane);
        let cube = Subspace::full(&f2, 3);
        assert_eq!(enumerate_subspaces(&cube, &f2).unwrap().len(), 16);
    }

    /// Counts subspaces by brute force: subsets of vectors closed under span,
    /// identified through the set of vectors they contain.
    fn brute_subspace_count(d: usize, q: u32, f: &FieldSpec) -> usize {
        let vs = all_vectors(d, q);
        let mut seen = std::collections::BTreeSet::new();
        // every subspace of dim <= d is spanned by at most d vectors; spans of
        // all pairs/triples of vectors suffice for d <= 3
        let mut gens: Vec<Vec<FVector>> = vec![vec![]];
        for a in &vs {
            gens.push(vec![a.clone()]);
            for b in &vs {
                gens.push(vec![a.clone(), b.clone()]);
                if d == 3 {
                    for c in &vs {
                        gens.push(vec![a.clone(), b.clone(), c.clone()]);
                    }
                }
            }
        }
        for g in gens {
            let s = rref(&g, d, f).unwrap();
            let members: Vec<_> = vs.iter().filter(|x| s.contains(x, f).unwrap()).cloned().collect();
            seen.insert(members);
        }
        seen.len()
    }

    #[test]
    fn enumeration_count_matches_brute_force() {
        let f2 = FieldSpec::gf2();
        assert_eq!(brute_subspace_count(2, 2, &f2), 5);
        assert_eq!(brute_subspace_count(3, 2, &f2), 16);
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(brute_subspace_count(2, 3, &f3), 6);
        assert_eq!(
            enumerate_subspaces(&Subspace::full(&f3, 2), &f3).unwrap().len(),
            6
        );
    }

    #[test]
    fn enumeration_count_is_galois_number() {
        for q in [2u64, 3, 4, 5] {
            let f = FieldSpec::from_order(q).unwrap();
            for k in 0..=4 {
                let space = Subspace::full(&f, k);
                let subs = enumerate_subspaces(&space, &f).unwrap();
                assert_eq!(BigUint::from(subs.len()), galois_number(k, q), "q={q} k={k}");
                assert!(subs.windows(2).all(|w| w[0].cmp_canonical(&w[1]) == Ordering::Less));
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let f2 = FieldSpec::gf2();
        assert!(enumerate_subspaces(&Subspace::full(&f2, 7), &f2).is_err());
        let big = FieldSpec::from_order(256).unwrap();
        assert!(enumerate_subspaces(&Subspace::full(&big, 4), &big).is_err());
    }

    #[test]
    fn galois_numbers() {
        assert_eq!(galois_number(0, 2), BigUint::from(1u32));
        assert_eq!(galois_number(2, 2), BigUint::from(5u32));
        assert_eq!(galois_number(3, 2), BigUint::from(16u32));
        assert_eq!(galois_number(2, 3), BigUint::from(6u32));
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
    }
}
