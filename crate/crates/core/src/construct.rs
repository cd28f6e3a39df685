//! K-decompositions from GF(q) representations and rooted branch trees.
//!
//! For each node `v`, `W_v` is the span of the vectors below `v`, `W′_v` the
//! span of the remaining vectors, and `D_v = W_v ∩ W′_v`. A color at `v`
//! names a subspace of `D_v`: the subset `F` below `v` gets the color of
//! `span(F) ∩ D_v`. Colors are allocated as they are first reached, with
//! the trivial subspace always color 0.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::branch::{RootedBranchTree, RootedNode};
use crate::decomp::{DNode, KDecomposition, Table};
use crate::gf::{hull, intersect, rref, FieldSpec, LinalgError, Subspace};
use crate::matroid::oracle::{self, TooLarge, MAX_PAIR_BRUTE};
use crate::matroid::{Backend, ElementSet, MatroidInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("matroid has no linear representation")]
    NotLinear,
    #[error("branch tree has {tree} leaves, matroid has {matroid} elements")]
    LeafMismatch { tree: usize, matroid: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Subspaces computed for one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSubspaceData {
    pub w: Subspace,
    pub w_prime: Subspace,
    pub d: Subspace,
    /// `colors[γ]` is the subspace of `D_v` named by color `γ`.
    pub colors: Vec<Subspace>,
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub decomposition: KDecomposition,
    pub field: FieldSpec,
    /// Indexed like the nodes of the branch tree and the decomposition.
    pub nodes: Vec<NodeSubspaceData>,
}

impl Construction {
    /// `max dim D_v`, at most the width of the branch tree.
    pub fn max_boundary_dim(&self) -> usize {
        self.nodes.iter().map(|d| d.d.dim()).max().unwrap_or(0)
    }
}

/// Color allocation at one node.
struct Palette {
    colors: Vec<Subspace>,
    index: HashMap<Subspace, u32>,
}

impl Palette {
    fn new(trivial: Subspace) -> Self {
        let mut p = Palette {
            colors: Vec::new(),
            index: HashMap::new(),
        };
        p.color_of(trivial);
        p
    }

    fn color_of(&mut self, s: Subspace) -> u32 {
        if let Some(&c) = self.index.get(&s) {
            return c;
        }
        let c = self.colors.len() as u32;
        self.colors.push(s.clone());
        self.index.insert(s, c);
        c
    }
}

pub fn construct(m: &MatroidInstance, t: &RootedBranchTree) -> Result<KDecomposition, ConstructError> {
    construct_with_data(m, t).map(|c| c.decomposition)
}

pub fn construct_with_data(
    m: &MatroidInstance,
    t: &RootedBranchTree,
) -> Result<Construction, ConstructError> {
    let Backend::Linear {
        field,
        rows,
        columns,
    } = m.backend()
    else {
        return Err(ConstructError::NotLinear);
    };
    let (field, d) = (field.clone(), *rows);
    let n = m.len();
    if t.len() != n {
        return Err(ConstructError::LeafMismatch {
            tree: t.len(),
            matroid: n,
        });
    }
    let trivial = Subspace::trivial(&field, d);
    let count = t.nodes().len();
    let order = t.postorder();

    let mut w = vec![trivial.clone(); count];
    for &v in &order {
        w[v] = match t.nodes()[v] {
            RootedNode::Leaf(e) => rref(std::slice::from_ref(&columns[e]), d, &field)?,
            RootedNode::Inner { left, right } => hull(&w[left], &w[right], &field)?,
        };
    }
    let mut w_prime = vec![trivial.clone(); count];
    for &v in order.iter().rev() {
        if let RootedNode::Inner { left, right } = t.nodes()[v] {
            w_prime[left] = hull(&w_prime[v], &w[right], &field)?;
            w_prime[right] = hull(&w_prime[v], &w[left], &field)?;
        }
    }
    let boundary = (0..count)
        .map(|v| intersect(&w[v], &w_prime[v], &field))
        .collect::<Result<Vec<_>, _>>()?;

    let mut palettes: Vec<Vec<Subspace>> = vec![Vec::new(); count];
    let mut nodes: Vec<DNode> = Vec::with_capacity(count);
    nodes.resize(count, DNode::Leaf { elem: 0, is_loop: false });
    for &v in &order {
        match t.nodes()[v] {
            RootedNode::Leaf(e) => {
                palettes[v] = vec![trivial.clone(), boundary[v].clone()];
                nodes[v] = DNode::Leaf {
                    elem: e,
                    is_loop: columns[e].is_zero(),
                };
            }
            RootedNode::Inner { left, right } => {
                let mut palette = Palette::new(trivial.clone());
                let (lc, rc) = (&palettes[left], &palettes[right]);
                let mut table = Table::zeros(lc.len() as u32, rc.len() as u32);
                for (g1, s1) in lc.iter().enumerate() {
                    for (g2, s2) in rc.iter().enumerate() {
                        let h = hull(s1, s2, &field)?;
                        let defect = (s1.dim() + s2.dim() - h.dim()) as u32;
                        let color = palette.color_of(intersect(&boundary[v], &h, &field)?);
                        table.set(g1 as u32, g2 as u32, color, defect);
                    }
                }
                palettes[v] = palette.colors;
                nodes[v] = DNode::Inner {
                    children: vec![left, right],
                    palette: palettes[v].len() as u32,
                    table,
                };
            }
        }
    }
    let decomposition = KDecomposition::new(n, nodes, t.root());
    let data = w
        .into_iter()
        .zip(w_prime)
        .zip(boundary)
        .zip(palettes)
        .map(|(((w, w_prime), d), colors)| NodeSubspaceData {
            w,
            w_prime,
            d,
            colors,
        })
        .collect();
    Ok(Construction {
        decomposition,
        field,
        nodes: data,
    })
}

/// `(q^(k+1) − q(k+1) + k) / (q−1)²`, the color bound for boundary
/// dimension `k`; `None` on overflow.
pub fn color_bound(q: u64, k: u32) -> Option<u64> {
    let top = q
        .checked_pow(k + 1)?
        .checked_add(k as u64)?
        .checked_sub(q.checked_mul(k as u64 + 1)?)?;
    Some(top / (q - 1).checked_pow(2)?)
}

/// Total number of subspaces of a `k`-dimensional space, as a bound on the
/// palette size.
pub fn palette_bound(q: u64, k: usize) -> BigUint {
    crate::gf::galois_number(k, q)
}

/// Two subsets below a node that share a color but differ in rank defect
/// against some outside set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Counterexample {
    pub node: usize,
    pub f1: ElementSet,
    pub f2: ElementSet,
    pub outside: ElementSet,
}

impl fmt::Display for Lemma1Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {}: {} and {} share a color but differ against {}",
            self.node, self.f1, self.f2, self.outside
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Lemma1Error {
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
    #[error(transparent)]
    Eval(#[from] crate::decomp::EvalError),
    #[error("no node {0}")]
    NoSuchNode(usize),
    #[error("decomposition has {got} elements, matroid has {expected}")]
    Universe { got: usize, expected: usize },
}

/// Elements below every node of `d`, as bitmasks.
fn subtree_masks(d: &KDecomposition) -> Result<Vec<u64>, crate::decomp::EvalError> {
    let order = d.postorder().map_err(crate::decomp::EvalError::Malformed)?;
    let mut masks = vec![0u64; d.nodes().len()];
    for &v in order {
        masks[v] = match &d.nodes()[v] {
            DNode::Leaf { elem, .. } => 1 << elem,
            DNode::Inner { children, .. } => masks[children[0]] | masks[children[1]],
        };
    }
    Ok(masks)
}

/// Checks that subsets below `node` with equal colors have equal rank
/// defects `r(F) + r(F_i) − r(F ∪ F_i)` against every `F` outside, using
/// ranks from the matroid itself. Exhaustive, `n ≤ 12`.
pub fn lemma1_consistency_check(
    d: &KDecomposition,
    m: &MatroidInstance,
    node: usize,
) -> Result<Option<Lemma1Counterexample>, Lemma1Error> {
    let n = m.len();
    if n > MAX_PAIR_BRUTE {
        return Err(TooLarge {
            n,
            max: MAX_PAIR_BRUTE,
        }
        .into());
    }
    if d.len() != n {
        return Err(Lemma1Error::Universe {
            got: d.len(),
            expected: n,
        });
    }
    let masks = subtree_masks(d)?;
    let inside = *masks.get(node).ok_or(Lemma1Error::NoSuchNode(node))?;
    let outside = ((1u64 << n) - 1) & !inside;
    let rank = oracle::rank_table(m)?;
    let r = |mask: u64| rank[mask as usize] as i64;

    let mut representative: HashMap<u32, u64> = HashMap::new();
    let mut f1 = 0u64;
    loop {
        let color = d.node_states(&ElementSet::from_mask(n, f1))?[node].color;
        let rep = *representative.entry(color).or_insert(f1);
        if rep != f1 {
            let mut f = 0u64;
            loop {
                if r(rep) - r(f | rep) != r(f1) - r(f | f1) {
                    return Ok(Some(Lemma1Counterexample {
                        node,
                        f1: ElementSet::from_mask(n, rep),
                        f2: ElementSet::from_mask(n, f1),
                        outside: ElementSet::from_mask(n, f),
                    }));
                }
                if f == outside {
                    break;
                }
                f = f.wrapping_sub(outside) & outside;
            }
        }
        if f1 == inside {
            break;
        }
        f1 = f1.wrapping_sub(inside) & inside;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{exact_branch_decomposition, root_tree, RootedBranchTree};
    use crate::gf::FVector;
    use crate::matroid::oracle::rank_table;

    fn gf2(cols: &[&[u32]]) -> MatroidInstance {
        let rows = cols[0].len();
        let matrix: Vec<Vec<u32>> = (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        MatroidInstance::from_matrix(FieldSpec::gf2(), &matrix).unwrap()
    }

    fn fano() -> MatroidInstance {
        gf2(&[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 1, 0],
            &[1, 0, 1],
            &[0, 1, 1],
            &[1, 1, 1],
        ])
    }

    fn exact_rooted(m: &MatroidInstance) -> RootedBranchTree {
        let (t, _) = exact_branch_decomposition(m).unwrap();
        root_tree(&t, None).unwrap()
    }

    fn assert_rank_fidelity(m: &MatroidInstance, d: &KDecomposition) {
        let want = rank_table(m).unwrap();
        let got = d.rank_table().unwrap();
        for (mask, (&w, &g)) in want.iter().zip(&got).enumerate() {
            assert_eq!(w as i64, g, "mask {mask:#b}");
        }
    }

    #[test]
    fn u23_star() {
        let m = gf2(&[&[1, 0], &[0, 1], &[1, 1]]);
        let d = construct(&m, &exact_rooted(&m)).unwrap();
        assert_eq!(d.validate_structure(), Ok(()));
        assert_eq!(d.width(), 1);
        assert_rank_fidelity(&m, &d);
        assert_eq!(d.eval_rank(&ElementSet::from_mask(3, 0b101)).unwrap(), 2);
    }

    #[test]
    fn all_loops() {
        let m = gf2(&[&[0, 0], &[0, 0], &[0, 0]]);
        let c = construct_with_data(&m, &exact_rooted(&m)).unwrap();
        assert!(c.nodes.iter().all(|n| n.d.is_trivial()));
        for node in c.decomposition.nodes() {
            if let DNode::Inner { table, .. } = node {
                assert_eq!(table.nonzero().count(), 0);
            }
        }
        assert_eq!(c.decomposition.rank_table().unwrap(), vec![0; 8]);
        assert_eq!(c.decomposition.width(), 1);
    }

    #[test]
    fn parallel_pair_and_coloop() {
        let m = gf2(&[&[1, 0], &[1, 0], &[0, 1]]);
        for order in [[0, 1, 2], [0, 2, 1], [2, 1, 0]] {
            let t = root_tree(&crate::branch::caterpillar(3, &order).unwrap(), None).unwrap();
            assert_rank_fidelity(&m, &construct(&m, &t).unwrap());
        }
    }

    #[test]
    fn fano_width_and_fidelity() {
        let m = fano();
        let t = exact_rooted(&m);
        let c = construct_with_data(&m, &t).unwrap();
        let d = &c.decomposition;
        assert_eq!(d.validate_structure(), Ok(()));
        assert!(c.max_boundary_dim() <= 2);
        assert!(d.width() as u64 <= color_bound(2, 2).unwrap());
        assert_rank_fidelity(&m, d);
        let line = ElementSet::from_indices(7, [0, 1, 3]).unwrap();
        assert_eq!(d.eval_rank(&line).unwrap(), 2);
        for v in 0..d.nodes().len() {
            assert_eq!(lemma1_consistency_check(d, &m, v).unwrap(), None, "node {v}");
        }
    }

    #[test]
    fn color_subspaces_track_spans() {
        let m = MatroidInstance::from_matrix(
            FieldSpec::new(3, 1).unwrap(),
            &[vec![1, 0, 1, 1, 0], vec![0, 1, 1, 2, 0], vec![0, 0, 0, 1, 1]],
        )
        .unwrap();
        let t = exact_rooted(&m);
        let c = construct_with_data(&m, &t).unwrap();
        assert_rank_fidelity(&m, &c.decomposition);
        let Backend::Linear { columns, .. } = m.backend() else { unreachable!() };
        let sets = t.leaf_sets();
        for mask in 0..32u64 {
            let f = ElementSet::from_mask(5, mask);
            let states = c.decomposition.node_states(&f).unwrap();
            for (v, node) in c.nodes.iter().enumerate() {
                let below: Vec<FVector> = f
                    .intersection(&sets[v])
                    .iter()
                    .map(|e| columns[e].clone())
                    .collect();
                let span = rref(&below, 3, &c.field).unwrap();
                let want = intersect(&span, &node.d, &c.field).unwrap();
                assert_eq!(node.colors[states[v].color as usize], want, "node {v} mask {mask:#b}");
            }
        }
    }

    #[test]
    fn merged_colors_break_consistency() {
        let m = gf2(&[&[1, 0], &[0, 1], &[1, 1]]);
        let t = root_tree(&crate::branch::caterpillar(3, &[0, 1, 2]).unwrap(), None).unwrap();
        let mut d = construct(&m, &t).unwrap();
        let inner = (3..d.nodes().len())
            .find(|&v| d.nodes()[v].palette() > 1 && Some(v) != d.root())
            .unwrap();
        assert_eq!(lemma1_consistency_check(&d, &m, inner).unwrap(), None);
        let table = d.table_mut(inner).unwrap();
        for g1 in 0..table.rows() {
            for g2 in 0..table.cols() {
                let (_, r) = table.get(g1, g2).unwrap();
                table.set(g1, g2, 0, r);
            }
        }
        let cx = lemma1_consistency_check(&d, &m, inner).unwrap().unwrap();
        let r = |s: &ElementSet| m.rank(s) as i64;
        assert_ne!(
            r(&cx.f1) - r(&cx.f1.union(&cx.outside)),
            r(&cx.f2) - r(&cx.f2.union(&cx.outside))
        );
    }

    #[test]
    fn bounds() {
        assert_eq!(color_bound(2, 1), Some(1));
        assert_eq!(color_bound(2, 2), Some(4));
        assert_eq!(color_bound(3, 2), Some(5));
        assert_eq!(color_bound(2, 3), Some(11));
        assert_eq!(palette_bound(2, 2), BigUint::from(5u32));
    }

    #[test]
    fn rejects_mismatches() {
        let u = MatroidInstance::uniform(1, 2).unwrap();
        let t = exact_rooted(&gf2(&[&[1], &[1]]));
        assert_eq!(construct(&u, &t).unwrap_err(), ConstructError::NotLinear);
        let m = gf2(&[&[1], &[1], &[1]]);
        assert!(matches!(
            construct(&m, &t),
            Err(ConstructError::LeafMismatch { .. })
        ));
    }
}
