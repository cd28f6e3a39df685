//! Tutte polynomial data by dynamic programming over a K-decomposition.
//!
//! The coefficient DP counts, per node and color, the subsets of the subtree
//! by size and label. Point evaluation carries one value per color instead:
//! with `u = x−1` and `v = y−1`, node `v` stores
//! `Σ u^(|E_v|−λ(F)) · v^(|F|−λ(F))` over subsets `F` of its subtree with
//! that color. Merging two children multiplies by `(uv)^φʳ`, so the pass is
//! division-free; the root sum is divided once by `u^(n−r(E))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::decomp::{DNode, EvalError, KDecomposition};
use crate::matroid::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TutteError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("node {node} produces label {label} for a subset of size {size}")]
    BadLabel { node: usize, size: usize, label: i64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{0} has no inverse modulo {1}")]
    NotInvertible(String, u64),
}

/// Subset counts `N(n′, r′)` by size and rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneyTable {
    n: usize,
    rank: usize,
    /// `(n+1) × (rank+1)`, row-major by size.
    counts: Vec<BigUint>,
}

impl WhitneyTable {
    pub fn zero(n: usize, rank: usize) -> Self {
        WhitneyTable {
            n,
            rank,
            counts: vec![BigUint::zero(); (n + 1) * (rank + 1)],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Panics when `(size, r)` lies outside the table.
    pub fn add(&mut self, size: usize, r: usize, count: &BigUint) {
        assert!(size <= self.n && r <= self.rank, "entry ({size}, {r}) outside table");
        self.counts[size * (self.rank + 1) + r] += count;
    }

    pub fn get(&self, size: usize, r: usize) -> BigUint {
        if size <= self.n && r <= self.rank {
            self.counts[size * (self.rank + 1) + r].clone()
        } else {
            BigUint::zero()
        }
    }

    /// Nonzero entries as `(size, rank, count)` in lexicographic order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, BigUint)> + '_ {
        let w = self.rank + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (i / w, i % w, c.clone()))
    }

    /// Sum of all counts; `2^n` for any matroid.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `Σ N(n′, r′) (x−1)^(r−r′) (y−1)^(n′−r′)`, with `0⁰ = 1`.
    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let u = x - BigRational::one();
        let v = y - BigRational::one();
        self.nonzero()
            .map(|(size, r, c)| {
                BigRational::from_integer(BigInt::from(c))
                    * num_traits::pow(u.clone(), self.rank - r)
                    * num_traits::pow(v.clone(), size - r)
            })
            .sum()
    }

    fn evaluate_mod(&self, u: u64, v: u64, m: u64) -> u64 {
        let big_m = BigUint::from(m);
        self.nonzero().fold(0, |acc, (size, r, c)| {
            let c = (c % &big_m).to_u64().expect("reduced below modulus");
            let term = mul_mod(
                c,
                mul_mod(pow_mod(u, (self.rank - r) as u64, m), pow_mod(v, (size - r) as u64, m), m),
                m,
            );
            add_mod(acc, term, m)
        })
    }

    /// One `N <n'> <r'> <count>` line per nonzero entry.
    pub fn to_text(&self) -> String {
        self.nonzero()
            .map(|(s, r, c)| format!("N {s} {r} {c}\n"))
            .collect()
    }
}

/// Coefficients `t(i, j)` of `x^i y^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuttePolynomial {
    /// Row `i` holds the coefficients of `x^i`.
    coeffs: Vec<Vec<BigInt>>,
}

impl TuttePolynomial {
    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero coefficients as `(i, j, t)` in lexicographic order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(j, c)| (i, j, c))
        })
    }

    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> BigRational {
        self.nonzero()
            .map(|(i, j, c)| {
                BigRational::from_integer(c.clone())
                    * num_traits::pow(x.clone(), i)
                    * num_traits::pow(y.clone(), j)
            })
            .sum()
    }

    /// One `t <i> <j> <coeff>` line per nonzero coefficient.
    pub fn to_text(&self) -> String {
        self.nonzero()
            .map(|(i, j, c)| format!("t {i} {j} {c}\n"))
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Expands the `(x−1), (y−1)` basis into monomials.
pub fn to_tutte(w: &WhitneyTable) -> TuttePolynomial {
    let r = w.rank();
    let mut coeffs = vec![vec![BigInt::zero(); w.len() - r.min(w.len()) + 1]; r + 1];
    for (size, rr, c) in w.nonzero() {
        let c = BigInt::from(c);
        let (a, b) = (r - rr, size - rr);
        for i in 0..=a {
            let ci = &c * binomial(a, i);
            let ci = if (a - i) % 2 == 1 { -ci } else { ci };
            for j in 0..=b {
                let term = &ci * binomial(b, j);
                coeffs[i][j] += if (b - j) % 2 == 1 { -term } else { term };
            }
        }
    }
    TuttePolynomial { coeffs }
}

/// Rank of the ground set according to `d`.
fn full_rank(d: &KDecomposition) -> Result<i64, EvalError> {
    d.eval_rank(&ElementSet::full(d.len()))
}

/// Per-color table of counts indexed by `(size, label)` with `label ≤ size`.
struct CountTable {
    size: usize,
    /// `palette × (size+1) × (size+1)`
    cells: Vec<BigUint>,
}

impl CountTable {
    fn idx(&self, g: u32, s: usize, r: usize) -> usize {
        let w = self.size + 1;
        (g as usize * w + s) * w + r
    }
}

/// Whitney counts of the matroid described by `d`, summed over all root
/// colors.
pub fn whitney_coefficients(d: &KDecomposition) -> Result<WhitneyTable, TutteError> {
    let n = d.len();
    let Some(root) = d.root() else {
        let mut w = WhitneyTable::zero(0, 0);
        w.add(0, 0, &BigUint::one());
        return Ok(w);
    };
    let order = d.postorder().map_err(EvalError::Malformed)?;
    let mut tables: Vec<Option<CountTable>> = (0..d.nodes().len()).map(|_| None).collect();
    for &v in order {
        let table = match &d.nodes()[v] {
            DNode::Leaf { is_loop, .. } => {
                let mut t = CountTable {
                    size: 1,
                    cells: vec![BigUint::zero(); 8],
                };
                let (i0, i1) = (t.idx(0, 0, 0), t.idx(1, 1, !is_loop as usize));
                t.cells[i0] = BigUint::one();
                t.cells[i1] = BigUint::one();
                t
            }
            DNode::Inner {
                children,
                palette,
                table,
            } => {
                let a = tables[children[0]].take().expect("child before parent");
                let b = tables[children[1]].take().expect("child before parent");
                let size = a.size + b.size;
                let w = size + 1;
                let mut t = CountTable {
                    size,
                    cells: vec![BigUint::zero(); *palette as usize * w * w],
                };
                for g1 in 0..table.rows() {
                    for g2 in 0..table.cols() {
                        let (g, defect) = table.get(g1, g2).expect("in range");
                        if g >= *palette {
                            return Err(EvalError::Malformed(
                                crate::decomp::StructureDefect::ColorOutOfPalette { node: v, g1, g2 },
                            )
                            .into());
                        }
                        for s1 in 0..=a.size {
                            for r1 in 0..=s1 {
                                let c1 = &a.cells[a.idx(g1, s1, r1)];
                                if c1.is_zero() {
                                    continue;
                                }
                                for s2 in 0..=b.size {
                                    for r2 in 0..=s2 {
                                        let c2 = &b.cells[b.idx(g2, s2, r2)];
                                        if c2.is_zero() {
                                            continue;
                                        }
                                        let label = (r1 + r2) as i64 - defect as i64;
                                        if label < 0 || label as usize > s1 + s2 {
                                            return Err(TutteError::BadLabel {
                                                node: v,
                                                size: s1 + s2,
                                                label,
                                            });
                                        }
                                        let i = t.idx(g, s1 + s2, label as usize);
                                        t.cells[i] += c1 * c2;
                                    }
                                }
                            }
                        }
                    }
                }
                t
            }
        };
        tables[v] = Some(table);
    }
    let top = tables[root].take().expect("root table");
    let rank = full_rank(d)?;
    let rank = usize::try_from(rank).map_err(|_| TutteError::BadLabel {
        node: root,
        size: n,
        label: rank,
    })?;
    let mut w = WhitneyTable::zero(n, rank);
    let palette = d.nodes()[root].palette();
    for g in 0..palette {
        for s in 0..=n {
            for r in 0..=s {
                let c = &top.cells[top.idx(g, s, r)];
                if c.is_zero() {
                    continue;
                }
                if r > rank {
                    return Err(TutteError::BadLabel {
                        node: root,
                        size: s,
                        label: r as i64,
                    });
                }
                w.add(s, r, c);
            }
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Modular(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalValue {
    Exact(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl fmt::Display for EvalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalValue::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            EvalValue::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            EvalValue::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (BigInt::from_str(p).ok()?, BigInt::from_str(q).ok()?);
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// `q` reduced modulo `m`.
fn reduce(q: &BigRational, m: u64) -> Result<u64, TutteError> {
    let big_m = BigInt::from(m);
    let num = (q.numer() % &big_m + &big_m) % &big_m;
    let den = (q.denom() % &big_m + &big_m) % &big_m;
    let den = den.to_u64().expect("reduced");
    let inv = inv_mod(den, m).ok_or_else(|| TutteError::NotInvertible(q.denom().to_string(), m))?;
    Ok(mul_mod(num.to_u64().expect("reduced"), inv, m))
}

/// Arithmetic used by the per-color evaluation pass.
trait Ring: Clone {
    fn r_zero(&self) -> Self;
    fn r_one(&self) -> Self;
    fn r_add(&self, a: &Self, b: &Self) -> Self;
    fn r_mul(&self, a: &Self, b: &Self) -> Self;
}

#[derive(Clone, Copy)]
struct Residue(u64);

impl Ring for Residue {
    fn r_zero(&self) -> Self {
        Residue(0)
    }
    fn r_one(&self) -> Self {
        Residue(1 % self.0)
    }
    fn r_add(&self, a: &Self, b: &Self) -> Self {
        Residue(add_mod(a.0, b.0, self.0))
    }
    fn r_mul(&self, a: &Self, b: &Self) -> Self {
        Residue(mul_mod(a.0, b.0, self.0))
    }
}

impl Ring for BigRational {
    fn r_zero(&self) -> Self {
        Zero::zero()
    }
    fn r_one(&self) -> Self {
        One::one()
    }
    fn r_add(&self, a: &Self, b: &Self) -> Self {
        a + b
    }
    fn r_mul(&self, a: &Self, b: &Self) -> Self {
        a * b
    }
}

/// Root sums `Σ_γ Σ_F u^(n−λ) v^(|F|−λ)`. `ctx` supplies the ring; `u`,
/// `v` are elements of it.
fn color_pass<R: Ring>(d: &KDecomposition, ctx: &R, u: &R, v: &R) -> Result<R, TutteError> {
    let Some(root) = d.root() else {
        return Ok(ctx.r_one());
    };
    let order = d.postorder().map_err(EvalError::Malformed)?;
    let uv = ctx.r_mul(u, v);
    let mut uv_pows = vec![ctx.r_one()];
    let mut values: Vec<Vec<R>> = vec![Vec::new(); d.nodes().len()];
    for &node in order {
        values[node] = match &d.nodes()[node] {
            DNode::Leaf { is_loop: false, .. } => vec![u.clone(), ctx.r_one()],
            DNode::Leaf { is_loop: true, .. } => vec![u.clone(), uv.clone()],
            DNode::Inner {
                children,
                palette,
                table,
            } => {
                let a = std::mem::take(&mut values[children[0]]);
                let b = std::mem::take(&mut values[children[1]]);
                let mut out = vec![ctx.r_zero(); *palette as usize];
                for (g1, x1) in a.iter().enumerate() {
                    for (g2, x2) in b.iter().enumerate() {
                        let (g, defect) = table.get(g1 as u32, g2 as u32).ok_or(
                            EvalError::ColorOutOfTable {
                                node,
                                g1: g1 as u32,
                                g2: g2 as u32,
                            },
                        )?;
                        let slot = out.get_mut(g as usize).ok_or(EvalError::Malformed(
                            crate::decomp::StructureDefect::ColorOutOfPalette {
                                node,
                                g1: g1 as u32,
                                g2: g2 as u32,
                            },
                        ))?;
                        while uv_pows.len() <= defect as usize {
                            let next = ctx.r_mul(uv_pows.last().expect("nonempty"), &uv);
                            uv_pows.push(next);
                        }
                        let term = ctx.r_mul(&ctx.r_mul(x1, x2), &uv_pows[defect as usize]);
                        *slot = ctx.r_add(slot, &term);
                    }
                }
                out
            }
        };
    }
    Ok(values[root].iter().fold(ctx.r_zero(), |acc, x| ctx.r_add(&acc, x)))
}

/// Exponent `n − r(E)` of the root normalization, or an error for labels
/// that cannot come from a matroid.
fn corank(d: &KDecomposition) -> Result<u64, TutteError> {
    let r = full_rank(d)?;
    let n = d.len() as i64;
    if r < 0 || r > n {
        return Err(TutteError::BadLabel {
            node: d.root().unwrap_or(0),
            size: d.len(),
            label: r,
        });
    }
    Ok((n - r) as u64)
}

/// `T(x, y)` for the matroid described by `d`.
pub fn evaluate(
    d: &KDecomposition,
    x: &BigRational,
    y: &BigRational,
    mode: EvalMode,
) -> Result<EvalValue, TutteError> {
    let one = BigRational::one();
    let degenerate = *x == one || *y == one;
    match mode {
        EvalMode::Exact => {
            if degenerate {
                return Ok(EvalValue::Exact(whitney_coefficients(d)?.evaluate(x, y)));
            }
            let (u, v) = (x - &one, y - &one);
            let sum = color_pass(d, &one, &u, &v)?;
            let scale = num_traits::pow(u, corank(d)? as usize);
            Ok(EvalValue::Exact(sum / scale))
        }
        EvalMode::Modular(0) => Err(TutteError::ZeroModulus),
        EvalMode::Modular(m) => {
            let (xm, ym) = (reduce(x, m)?, reduce(y, m)?);
            let (u, v) = (add_mod(xm, m - 1 % m, m), add_mod(ym, m - 1 % m, m));
            let k = corank(d)?;
            let u_inv = if k == 0 { Some(1 % m) } else { inv_mod(u, m) };
            let value = match u_inv {
                Some(inv) if !degenerate => {
                    let ring = Residue(m);
                    let sum = color_pass(d, &ring, &Residue(u), &Residue(v))?;
                    mul_mod(sum.0, pow_mod(inv, k, m), m)
                }
                _ => whitney_coefficients(d)?.evaluate_mod(u, v, m),
            };
            Ok(EvalValue::Modular { value, modulus: m })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{parse_decomposition, Table};

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn u12() -> KDecomposition {
        parse_decomposition(
            "dw version=1 n=2 K=1\nleaf 0 elem=0 loop=0\nleaf 1 elem=1 loop=0\n\
             inner 2 left=0 right=1 kv=1\nphi 2 1 1 0 1\nroot 2\n",
        )
        .unwrap()
    }

    fn single(is_loop: bool) -> KDecomposition {
        KDecomposition::new(1, vec![DNode::Leaf { elem: 0, is_loop }], Some(0))
    }

    fn entries(w: &WhitneyTable) -> Vec<(usize, usize, u64)> {
        w.nonzero().map(|(s, r, c)| (s, r, c.to_u64().unwrap())).collect()
    }

    #[test]
    fn whitney_small_cases() {
        let w = whitney_coefficients(&u12()).unwrap();
        assert_eq!(entries(&w), vec![(0, 0, 1), (1, 1, 2), (2, 1, 1)]);
        let t = to_tutte(&w);
        assert_eq!(t.to_text(), "t 0 1 1\nt 1 0 1\n");

        let w = whitney_coefficients(&single(true)).unwrap();
        assert_eq!(entries(&w), vec![(0, 0, 1), (1, 0, 1)]);
        assert_eq!(to_tutte(&w).to_text(), "t 0 1 1\n");
        assert_eq!(w.to_text(), "N 0 0 1\nN 1 0 1\n");
    }

    #[test]
    fn empty_matroid_is_one() {
        let d = KDecomposition::new(0, vec![], None);
        let w = whitney_coefficients(&d).unwrap();
        assert_eq!(to_tutte(&w).to_text(), "t 0 0 1\n");
        assert_eq!(
            evaluate(&d, &q("5"), &q("7"), EvalMode::Exact).unwrap(),
            EvalValue::Exact(q("1"))
        );
    }

    #[test]
    fn to_tutte_expands_u23() {
        let mut w = WhitneyTable::zero(3, 2);
        for (s, r, c) in [(0, 0, 1u32), (1, 1, 3), (2, 2, 3), (3, 2, 1)] {
            w.add(s, r, &BigUint::from(c));
        }
        let t = to_tutte(&w);
        assert_eq!(t.to_text(), "t 0 1 1\nt 1 0 1\nt 2 0 1\n");
        assert_eq!(t.evaluate(&q("2"), &q("2")), q("8"));
        assert_eq!(w.total(), BigUint::from(8u32));
    }

    #[test]
    fn evaluation_matches_polynomial() {
        for d in [u12(), single(true), single(false)] {
            let t = to_tutte(&whitney_coefficients(&d).unwrap());
            for (x, y) in [("2", "2"), ("1", "1"), ("-3/2", "5"), ("1", "7/3"), ("4", "1"), ("0", "0")] {
                let (x, y) = (q(x), q(y));
                let want = t.evaluate(&x, &y);
                assert_eq!(evaluate(&d, &x, &y, EvalMode::Exact).unwrap(), EvalValue::Exact(want.clone()));
                let m = 1_000_000_007;
                let got = evaluate(&d, &x, &y, EvalMode::Modular(m)).unwrap();
                assert_eq!(got, EvalValue::Modular { value: reduce(&want, m).unwrap(), modulus: m });
            }
        }
    }

    #[test]
    fn modular_edge_cases() {
        let d = u12();
        assert_eq!(evaluate(&d, &q("2"), &q("2"), EvalMode::Modular(0)), Err(TutteError::ZeroModulus));
        assert_eq!(
            evaluate(&d, &q("2"), &q("2"), EvalMode::Modular(1)).unwrap(),
            EvalValue::Modular { value: 0, modulus: 1 }
        );
        assert!(matches!(
            evaluate(&d, &q("1/3"), &q("2"), EvalMode::Modular(9)),
            Err(TutteError::NotInvertible(..))
        ));
        // u = 6 is not invertible mod 12, forcing the coefficient route
        let want = reduce(&to_tutte(&whitney_coefficients(&d).unwrap()).evaluate(&q("7"), &q("5")), 12).unwrap();
        assert_eq!(
            evaluate(&d, &q("7"), &q("5"), EvalMode::Modular(12)).unwrap(),
            EvalValue::Modular { value: want, modulus: 12 }
        );
    }

    #[test]
    fn bad_labels_are_errors() {
        let mut t = Table::zeros(2, 2);
        t.set(1, 1, 0, 3);
        let d = KDecomposition::new(
            2,
            vec![
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Leaf { elem: 1, is_loop: false },
                DNode::Inner { children: vec![0, 1], palette: 1, table: t },
            ],
            Some(2),
        );
        assert!(matches!(whitney_coefficients(&d), Err(TutteError::BadLabel { .. })));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6"), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("12"), Some(q("12")));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1.5"), None);
        assert_eq!(EvalValue::Exact(q("-3/6")).to_string(), "-1/2");
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(binomial(5, 2), BigInt::from(10));
    }
}
