//! Deciding whether a K-decomposition describes a matroid.
//!
//! The root labels define a set function `r`. It is a matroid rank function
//! iff `r(∅) = 0`, every singleton has rank 0 or 1, `r` is monotone and `r`
//! is submodular. Submodularity and monotonicity are each decided by a
//! minimum-defect DP over tuples of colors: for submodularity the state at a
//! node is the color quadruple of `(A, B, A∩B, A∪B)` and the value is the
//! least `λ(A) + λ(B) − λ(A∪B) − λ(A∩B)`; for monotonicity it is the color
//! pair of `A ⊆ B` and the least `λ(B) − λ(A)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decomp::{DNode, EvalError, KDecomposition, StructureDefect};
use crate::matroid::ElementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    EmptySet,
    Submodularity,
    Monotonicity,
    Singleton,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::EmptySet => "empty set",
            Check::Submodularity => "submodularity",
            Check::Monotonicity => "monotonicity",
            Check::Singleton => "singleton bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Matroid,
    NotMatroid {
        check: Check,
        /// Root colors of the violating tuple; the element for singleton
        /// failures.
        colors: Vec<u32>,
        /// Amount of the violation: the negative DP minimum, or the
        /// offending rank.
        value: i64,
    },
}

impl Verdict {
    pub fn is_matroid(&self) -> bool {
        matches!(self, Verdict::Matroid)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Matroid => f.write_str("matroid"),
            Verdict::NotMatroid {
                check,
                colors,
                value,
            } => write!(f, "not a matroid: {check} fails (colors {colors:?}, value {value})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("structural defect: {0}")]
    Structure(#[from] StructureDefect),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("verdict carries no violation to extract")]
    NoViolation,
}

const INF: i64 = i64::MAX;

/// Minimum-defect table of one node over `arity`-tuples of colors, with the
/// argmin child entries for backtracking.
struct TupleTable {
    palette: u32,
    arity: u32,
    value: Vec<i64>,
    /// Indices into the children's tables of the first minimizing pair.
    back: Vec<(u32, u32)>,
    finite: Vec<u32>,
}

impl TupleTable {
    fn new(palette: u32, arity: u32) -> Self {
        let len = (palette as usize).pow(arity);
        TupleTable {
            palette,
            arity,
            value: vec![INF; len],
            back: vec![(u32::MAX, u32::MAX); len],
            finite: Vec::new(),
        }
    }

    fn index(&self, tuple: &[u32]) -> usize {
        tuple
            .iter()
            .fold(0usize, |acc, &g| acc * self.palette as usize + g as usize)
    }

    fn tuple(&self, mut idx: usize) -> Vec<u32> {
        let p = self.palette as usize;
        let mut out = vec![0u32; self.arity as usize];
        for slot in out.iter_mut().rev() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
        out
    }

    fn offer(&mut self, tuple: &[u32], value: i64, back: (u32, u32)) {
        let i = self.index(tuple);
        if self.value[i] == INF {
            self.finite.push(i as u32);
        }
        if value < self.value[i] {
            self.value[i] = value;
            self.back[i] = back;
        }
    }

    fn finalize(&mut self) {
        self.finite.sort_unstable();
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Quad,
    Mono,
}

impl Kind {
    fn arity(self) -> u32 {
        match self {
            Kind::Quad => 4,
            Kind::Mono => 2,
        }
    }

    /// Sign of each component's defect in the objective.
    fn signs(self) -> &'static [i64] {
        match self {
            // λ(A) + λ(B) − λ(A∩B) − λ(A∪B); a label loses φʳ on merging
            Kind::Quad => &[-1, -1, 1, 1],
            // λ(B) − λ(A)
            Kind::Mono => &[1, -1],
        }
    }

    /// Finite leaf entries as (tuple, value).
    fn leaf(self, label: i64) -> Vec<(Vec<u32>, i64)> {
        match self {
            Kind::Quad => vec![
                (vec![0, 0, 0, 0], 0),
                (vec![1, 0, 0, 1], 0),
                (vec![0, 1, 0, 1], 0),
                (vec![1, 1, 1, 1], 0),
            ],
            Kind::Mono => vec![(vec![0, 0], 0), (vec![0, 1], label), (vec![1, 1], 0)],
        }
    }
}

fn run_dp(d: &KDecomposition, kind: Kind) -> Result<Vec<Option<TupleTable>>, EvalError> {
    let order = d.postorder().map_err(EvalError::Malformed)?;
    let arity = kind.arity();
    let signs = kind.signs();
    let mut tables: Vec<Option<TupleTable>> = (0..d.nodes().len()).map(|_| None).collect();
    let mut tuple = vec![0u32; arity as usize];
    for &v in order {
        let mut t = match &d.nodes()[v] {
            DNode::Leaf { is_loop, .. } => {
                let mut t = TupleTable::new(2, arity);
                for (tuple, value) in kind.leaf(!is_loop as i64) {
                    t.offer(&tuple, value, (u32::MAX, u32::MAX));
                }
                t
            }
            DNode::Inner {
                children,
                palette,
                table,
            } => {
                let (a, b) = (
                    tables[children[0]].as_ref().expect("child before parent"),
                    tables[children[1]].as_ref().expect("child before parent"),
                );
                let mut t = TupleTable::new(*palette, arity);
                let (ta, tb): (Vec<_>, Vec<_>) = (
                    a.finite.iter().map(|&i| a.tuple(i as usize)).collect(),
                    b.finite.iter().map(|&i| b.tuple(i as usize)).collect(),
                );
                for (x, &ia) in ta.iter().zip(&a.finite) {
                    let va = a.value[ia as usize];
                    for (y, &ib) in tb.iter().zip(&b.finite) {
                        let mut value = va + b.value[ib as usize];
                        for k in 0..arity as usize {
                            let (g, defect) = table.get(x[k], y[k]).ok_or(EvalError::ColorOutOfTable {
                                node: v,
                                g1: x[k],
                                g2: y[k],
                            })?;
                            if g >= *palette {
                                return Err(EvalError::Malformed(StructureDefect::ColorOutOfPalette {
                                    node: v,
                                    g1: x[k],
                                    g2: y[k],
                                }));
                            }
                            tuple[k] = g;
                            value += signs[k] * defect as i64;
                        }
                        t.offer(&tuple, value, (ia, ib));
                    }
                }
                t
            }
        };
        t.finalize();
        tables[v] = Some(t);
    }
    Ok(tables)
}

/// Root minima of the submodularity DP, keyed by `(γ_A, γ_B, γ_∩, γ_∪)`.
pub fn quad_minima(d: &KDecomposition) -> Result<Vec<([u32; 4], i64)>, VerifyError> {
    root_minima(d, Kind::Quad).map(|v| {
        v.into_iter()
            .map(|(t, x)| ([t[0], t[1], t[2], t[3]], x))
            .collect()
    })
}

/// Root minima of the monotonicity DP, keyed by `(γ_A, γ_B)`.
pub fn mono_minima(d: &KDecomposition) -> Result<Vec<([u32; 2], i64)>, VerifyError> {
    root_minima(d, Kind::Mono).map(|v| v.into_iter().map(|(t, x)| ([t[0], t[1]], x)).collect())
}

fn root_minima(d: &KDecomposition, kind: Kind) -> Result<Vec<(Vec<u32>, i64)>, VerifyError> {
    d.validate_structure()?;
    let Some(root) = d.root() else {
        return Ok(Vec::new());
    };
    let tables = run_dp(d, kind)?;
    let t = tables[root].as_ref().expect("root table");
    Ok(t.finite
        .iter()
        .map(|&i| (t.tuple(i as usize), t.value[i as usize]))
        .collect())
}

/// First negative root entry of a DP, as (colors, value).
fn first_negative(d: &KDecomposition, kind: Kind) -> Result<Option<(Vec<u32>, i64)>, VerifyError> {
    Ok(root_minima(d, kind)?.into_iter().find(|&(_, x)| x < 0))
}

pub fn verify(d: &KDecomposition) -> Result<Verdict, VerifyError> {
    d.validate_structure()?;
    let n = d.len();
    let empty = d.eval_rank(&ElementSet::empty(n))?;
    if empty != 0 {
        return Ok(Verdict::NotMatroid {
            check: Check::EmptySet,
            colors: vec![],
            value: empty,
        });
    }
    for (check, kind) in [(Check::Submodularity, Kind::Quad), (Check::Monotonicity, Kind::Mono)] {
        if let Some((colors, value)) = first_negative(d, kind)? {
            return Ok(Verdict::NotMatroid {
                check,
                colors,
                value,
            });
        }
    }
    for e in 0..n {
        let r = d.eval_rank(&ElementSet::singleton(n, e))?;
        if !(0..=1).contains(&r) {
            return Ok(Verdict::NotMatroid {
                check: Check::Singleton,
                colors: vec![e as u32],
                value: r,
            });
        }
    }
    Ok(Verdict::Matroid)
}

/// Concrete sets behind a negative verdict. Submodularity gives `(A, B)`
/// with `r(A∪B) + r(A∩B) > r(A) + r(B)`, monotonicity gives `A ⊆ B` with
/// `r(A) > r(B)`, and singleton failures give `({e}, {e})`.
pub fn extract_witness(
    d: &KDecomposition,
    verdict: &Verdict,
) -> Result<(ElementSet, ElementSet), VerifyError> {
    let Verdict::NotMatroid { check, colors, .. } = verdict else {
        return Err(VerifyError::NoViolation);
    };
    let n = d.len();
    let kind = match check {
        Check::Submodularity => Kind::Quad,
        Check::Monotonicity => Kind::Mono,
        Check::Singleton => {
            let e = ElementSet::singleton(n, colors[0] as usize);
            return Ok((e.clone(), e));
        }
        Check::EmptySet => return Ok((ElementSet::empty(n), ElementSet::empty(n))),
    };
    d.validate_structure()?;
    let root = d.root().ok_or(VerifyError::NoViolation)?;
    let tables = run_dp(d, kind)?;
    let (mut a, mut b) = (ElementSet::empty(n), ElementSet::empty(n));
    let root_table = tables[root].as_ref().expect("root table");
    let start = root_table.index(colors);
    if root_table.value[start] == INF {
        return Err(VerifyError::NoViolation);
    }
    let mut stack = vec![(root, start)];
    while let Some((v, idx)) = stack.pop() {
        let t = tables[v].as_ref().expect("table");
        match &d.nodes()[v] {
            DNode::Leaf { elem, .. } => {
                let tuple = t.tuple(idx);
                if tuple[0] == 1 {
                    a.insert(*elem);
                }
                if tuple[1] == 1 {
                    b.insert(*elem);
                }
            }
            DNode::Inner { children, .. } => {
                let (i, j) = t.back[idx];
                stack.push((children[0], i as usize));
                stack.push((children[1], j as usize));
            }
        }
    }
    Ok((a, b))
}

/// Copy of `d` with `changes` random table entries overwritten. Entries
/// `(0, 0)` are left alone so the result stays structurally valid; new
/// colors stay inside each node's palette and new defects lie in
/// `0..=max_defect`.
pub fn mutate(d: &KDecomposition, seed: u64, changes: usize, max_defect: u32) -> KDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = d.clone();
    let inner: Vec<(usize, u32)> = d
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(v, node)| match node {
            DNode::Inner { palette, table, .. } if table.rows() * table.cols() > 1 => {
                Some((v, *palette))
            }
            _ => None,
        })
        .collect();
    if inner.is_empty() {
        return out;
    }
    for _ in 0..changes {
        let (v, palette) = inner[rng.gen_range(0..inner.len())];
        let table = out.table_mut(v).expect("inner node");
        let (g1, g2) = loop {
            let g = (rng.gen_range(0..table.rows()), rng.gen_range(0..table.cols()));
            if g != (0, 0) {
                break g;
            }
        };
        let (color, defect) = table.get(g1, g2).expect("in range");
        if rng.gen_bool(0.5) {
            table.set(g1, g2, rng.gen_range(0..palette), defect);
        } else {
            table.set(g1, g2, color, rng.gen_range(0..=max_defect));
        }
    }
    out
}
