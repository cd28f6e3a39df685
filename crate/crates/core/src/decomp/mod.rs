//! K-decompositions and their rank-evaluation pass.
//!
//! For a subset `F`, every node gets a color and a label bottom-up. A leaf is
//! colored 1 if its element is in `F` and 0 otherwise, and labelled 1 exactly
//! when it is colored 1 and not flagged as a loop. An inner node whose
//! children carry `(γ1, λ1)` and `(γ2, λ2)` gets color `φ(γ1, γ2)` and label
//! `λ1 + λ2 − φʳ(γ1, γ2)`. The root label is the rank of `F`.
//!
//! Palettes are per node: an inner node with palette size `k` uses colors
//! `0..k`, leaves always use `{0, 1}`, and `K` is the largest palette size
//! minus one.

mod format;

use std::fmt;

use thiserror::Error;

pub use format::{parse_decomposition, write_decomposition, DecompParseError};

use crate::matroid::ElementSet;

/// Palette size of every leaf.
pub const LEAF_PALETTE: u32 = 2;

/// Dense `φ`/`φʳ` tables of an inner node, indexed by the left child's color
/// (rows) and the right child's color (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    rows: u32,
    cols: u32,
    color: Vec<u32>,
    defect: Vec<u32>,
}

impl Table {
    /// All entries `(0, 0)`.
    pub fn zeros(rows: u32, cols: u32) -> Self {
        let len = (rows * cols) as usize;
        Table {
            rows,
            cols,
            color: vec![0; len],
            defect: vec![0; len],
        }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    #[inline]
    fn index(&self, g1: u32, g2: u32) -> Option<usize> {
        (g1 < self.rows && g2 < self.cols).then(|| (g1 * self.cols + g2) as usize)
    }

    /// `(φ(g1, g2), φʳ(g1, g2))`, or `None` outside the table.
    #[inline]
    pub fn get(&self, g1: u32, g2: u32) -> Option<(u32, u32)> {
        self.index(g1, g2).map(|i| (self.color[i], self.defect[i]))
    }

    /// Panics outside the table.
    pub fn set(&mut self, g1: u32, g2: u32, color: u32, defect: u32) {
        let i = self.index(g1, g2).expect("table index in range");
        self.color[i] = color;
        self.defect[i] = defect;
    }

    /// Nonzero entries as `(g1, g2, color, defect)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u32, u32, u32)> + '_ {
        (0..self.rows).flat_map(move |g1| {
            (0..self.cols).filter_map(move |g2| {
                let (c, d) = self.get(g1, g2)?;
                (c != 0 || d != 0).then_some((g1, g2, c, d))
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DNode {
    Leaf { elem: usize, is_loop: bool },
    Inner {
        children: Vec<usize>,
        palette: u32,
        table: Table,
    },
}

impl DNode {
    pub fn palette(&self) -> u32 {
        match self {
            DNode::Leaf { .. } => LEAF_PALETTE,
            DNode::Inner { palette, .. } => *palette,
        }
    }
}

/// Color and label of a node in one evaluation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeState {
    pub color: u32,
    pub label: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureDefect {
    /// Node does not have exactly two children.
    Arity { node: usize, children: usize },
    DanglingChild { node: usize, child: usize },
    /// Tree shape is broken: a node is shared, unreachable, or on a cycle.
    NotATree { node: usize },
    MissingRoot,
    /// Leaves are not in bijection with `0..n`.
    LeafBijection { elem: usize },
    /// Table dimensions differ from the children's palette sizes.
    TableShape { node: usize },
    ZeroPalette { node: usize },
    /// `φ(g1, g2)` lies outside the node's palette.
    ColorOutOfPalette { node: usize, g1: u32, g2: u32 },
    /// `φ(0, 0) ≠ 0` or `φʳ(0, 0) ≠ 0`.
    EmptySetConvention { node: usize },
}

impl fmt::Display for StructureDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureDefect::Arity { node, children } => {
                write!(f, "arity: node {node} has {children} children")
            }
            StructureDefect::DanglingChild { node, child } => {
                write!(f, "dangling child {child} of node {node}")
            }
            StructureDefect::NotATree { node } => write!(f, "not a tree at node {node}"),
            StructureDefect::MissingRoot => write!(f, "missing root"),
            StructureDefect::LeafBijection { elem } => {
                write!(f, "leaf bijection: element {elem}")
            }
            StructureDefect::TableShape { node } => write!(f, "table shape at node {node}"),
            StructureDefect::ZeroPalette { node } => write!(f, "empty palette at node {node}"),
            StructureDefect::ColorOutOfPalette { node, g1, g2 } => {
                write!(f, "palette bound: node {node} entry ({g1}, {g2})")
            }
            StructureDefect::EmptySetConvention { node } => {
                write!(f, "empty-set convention at node {node}")
            }
        }
    }
}

impl std::error::Error for StructureDefect {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("decomposition is malformed: {0}")]
    Malformed(StructureDefect),
    #[error("color pair ({g1}, {g2}) outside the table of node {node}")]
    ColorOutOfTable { node: usize, g1: u32, g2: u32 },
    #[error("set over {got} elements, decomposition has {expected}")]
    Universe { got: usize, expected: usize },
}

/// A K-decomposition: a rooted binary tree with per-node color tables.
#[derive(Debug, Clone)]
pub struct KDecomposition {
    n: usize,
    nodes: Vec<DNode>,
    root: Option<usize>,
    /// Children-before-parents order when the topology is a proper tree.
    order: Result<Vec<usize>, StructureDefect>,
    /// `leaf_of[e]` is the node of element `e`.
    leaf_of: Vec<usize>,
}

impl PartialEq for KDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.nodes == other.nodes && self.root == other.root
    }
}

impl Eq for KDecomposition {}

impl KDecomposition {
    /// Assembles a decomposition without validating it; see
    /// [`KDecomposition::validate_structure`].
    pub fn new(n: usize, nodes: Vec<DNode>, root: Option<usize>) -> Self {
        let order = topology(n, &nodes, root);
        let mut leaf_of = vec![usize::MAX; n];
        for (i, node) in nodes.iter().enumerate() {
            if let DNode::Leaf { elem, .. } = *node {
                if elem < n {
                    leaf_of[elem] = i;
                }
            }
        }
        KDecomposition {
            n,
            nodes,
            root,
            order,
            leaf_of,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> &[DNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Node of element `e`'s leaf.
    pub fn leaf_node(&self, e: usize) -> Option<usize> {
        self.leaf_of.get(e).copied().filter(|&v| v != usize::MAX)
    }

    /// Nodes with children before parents; fails on broken topology.
    pub fn postorder(&self) -> Result<&[usize], StructureDefect> {
        self.order.as_deref().map_err(Clone::clone)
    }

    /// Largest palette size minus one; 0 for the empty decomposition.
    pub fn width(&self) -> u32 {
        self.nodes
            .iter()
            .map(DNode::palette)
            .max()
            .map_or(0, |p| p.saturating_sub(1))
    }

    /// Checks arity, tree shape, leaf bijection, table shapes and bounds,
    /// and the empty-set convention; reports the first defect.
    pub fn validate_structure(&self) -> Result<(), StructureDefect> {
        let order = self.postorder()?;
        let _ = order;
        for (node, n) in self.nodes.iter().enumerate() {
            let DNode::Inner {
                children,
                palette,
                table,
            } = n
            else {
                continue;
            };
            if *palette == 0 {
                return Err(StructureDefect::ZeroPalette { node });
            }
            let (l, r) = (children[0], children[1]);
            if table.rows != self.nodes[l].palette() || table.cols != self.nodes[r].palette() {
                return Err(StructureDefect::TableShape { node });
            }
            for g1 in 0..table.rows {
                for g2 in 0..table.cols {
                    if table.get(g1, g2).expect("in range").0 >= *palette {
                        return Err(StructureDefect::ColorOutOfPalette { node, g1, g2 });
                    }
                }
            }
            if table.get(0, 0) != Some((0, 0)) {
                return Err(StructureDefect::EmptySetConvention { node });
            }
        }
        Ok(())
    }

    /// Colors and labels of every node for `set`, indexed by node id.
    pub fn node_states(&self, set: &ElementSet) -> Result<Vec<NodeState>, EvalError> {
        if set.universe() != self.n {
            return Err(EvalError::Universe {
                got: set.universe(),
                expected: self.n,
            });
        }
        let order = self.postorder().map_err(EvalError::Malformed)?;
        let mut states = vec![NodeState::default(); self.nodes.len()];
        for &v in order {
            states[v] = match &self.nodes[v] {
                DNode::Leaf { elem, is_loop } => {
                    let inside = set.contains(*elem);
                    NodeState {
                        color: inside as u32,
                        label: (inside && !is_loop) as i64,
                    }
                }
                DNode::Inner {
                    children, table, ..
                } => {
                    let (a, b) = (states[children[0]], states[children[1]]);
                    let (color, defect) =
                        table
                            .get(a.color, b.color)
                            .ok_or(EvalError::ColorOutOfTable {
                                node: v,
                                g1: a.color,
                                g2: b.color,
                            })?;
                    NodeState {
                        color,
                        label: a.label + b.label - defect as i64,
                    }
                }
            };
        }
        Ok(states)
    }

    /// Rank of `set`: the root label of the evaluation pass. May be negative
    /// for decompositions that do not describe a matroid.
    pub fn eval_rank(&self, set: &ElementSet) -> Result<i64, EvalError> {
        let states = self.node_states(set)?;
        Ok(self.root.map_or(0, |r| states[r].label))
    }

    /// Root labels for every subset, indexed by bitmask (`n <= 20`).
    pub fn rank_table(&self) -> Result<Vec<i64>, EvalError> {
        assert!(self.n <= 20, "rank table over {} elements", self.n);
        (0..1u64 << self.n)
            .map(|mask| self.eval_rank(&ElementSet::from_mask(self.n, mask)))
            .collect()
    }

    /// Loop flags of the leaves, indexed by element.
    pub fn loop_flags(&self) -> Vec<bool> {
        (0..self.n)
            .map(|e| match self.leaf_node(e).map(|v| &self.nodes[v]) {
                Some(DNode::Leaf { is_loop, .. }) => *is_loop,
                _ => false,
            })
            .collect()
    }

    /// Mutable access to an inner node's table, for building and testing
    /// perturbed decompositions.
    pub fn table_mut(&mut self, node: usize) -> Option<&mut Table> {
        match self.nodes.get_mut(node) {
            Some(DNode::Inner { table, .. }) => Some(table),
            _ => None,
        }
    }
}

/// Children-before-parents order, or the first topological defect.
fn topology(n: usize, nodes: &[DNode], root: Option<usize>) -> Result<Vec<usize>, StructureDefect> {
    for (node, v) in nodes.iter().enumerate() {
        if let DNode::Inner { children, .. } = v {
            if children.len() != 2 {
                return Err(StructureDefect::Arity {
                    node,
                    children: children.len(),
                });
            }
            if let Some(&child) = children.iter().find(|&&c| c >= nodes.len()) {
                return Err(StructureDefect::DanglingChild { node, child });
            }
        }
    }
    let mut seen_elem = vec![false; n];
    for v in nodes {
        if let DNode::Leaf { elem, .. } = *v {
            if elem >= n || std::mem::replace(&mut seen_elem[elem], true) {
                return Err(StructureDefect::LeafBijection { elem });
            }
        }
    }
    if let Some(elem) = seen_elem.iter().position(|&s| !s) {
        return Err(StructureDefect::LeafBijection { elem });
    }
    let Some(root) = root else {
        return if nodes.is_empty() {
            Ok(Vec::new())
        } else {
            Err(StructureDefect::MissingRoot)
        };
    };
    if root >= nodes.len() {
        return Err(StructureDefect::MissingRoot);
    }
    let mut visited = vec![false; nodes.len()];
    let mut out = Vec::with_capacity(nodes.len());
    let mut stack = vec![(root, false)];
    while let Some((v, expanded)) = stack.pop() {
        match &nodes[v] {
            DNode::Inner { children, .. } if !expanded => {
                if std::mem::replace(&mut visited[v], true) {
                    return Err(StructureDefect::NotATree { node: v });
                }
                stack.push((v, true));
                stack.push((children[1], false));
                stack.push((children[0], false));
            }
            DNode::Leaf { .. } => {
                if std::mem::replace(&mut visited[v], true) {
                    return Err(StructureDefect::NotATree { node: v });
                }
                out.push(v);
            }
            DNode::Inner { .. } => out.push(v),
        }
    }
    if let Some(node) = visited.iter().position(|&s| !s) {
        return Err(StructureDefect::NotATree { node });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two leaves under one root with the given table.
    fn pair(table: Table, loops: [bool; 2]) -> KDecomposition {
        KDecomposition::new(
            2,
            vec![
                DNode::Leaf { elem: 0, is_loop: loops[0] },
                DNode::Leaf { elem: 1, is_loop: loops[1] },
                DNode::Inner {
                    children: vec![0, 1],
                    palette: 1,
                    table,
                },
            ],
            Some(2),
        )
    }

    /// U_{1,2}: two parallel non-loops.
    fn u12() -> KDecomposition {
        let mut t = Table::zeros(2, 2);
        t.set(1, 1, 0, 1);
        pair(t, [false, false])
    }

    #[test]
    fn evaluates_ranks() {
        let d = u12();
        let rank = |m| d.eval_rank(&ElementSet::from_mask(2, m)).unwrap();
        assert_eq!([rank(0), rank(1), rank(2), rank(3)], [0, 1, 1, 1]);
        assert_eq!(d.width(), 1);
        assert_eq!(d.validate_structure(), Ok(()));
        assert_eq!(d.rank_table().unwrap(), vec![0, 1, 1, 1]);
    }

    #[test]
    fn all_loops_evaluate_to_zero() {
        let d = pair(Table::zeros(2, 2), [true, true]);
        assert_eq!(d.rank_table().unwrap(), vec![0; 4]);
        assert_eq!(d.width(), 1);
    }

    #[test]
    fn labels_may_go_negative() {
        let mut t = Table::zeros(2, 2);
        t.set(1, 0, 0, 3);
        let d = pair(t, [false, false]);
        assert_eq!(d.eval_rank(&ElementSet::from_mask(2, 1)).unwrap(), -2);
    }

    #[test]
    fn structural_defects() {
        let mut t = Table::zeros(2, 2);
        t.set(0, 0, 1, 0);
        let mut d = pair(t, [false, false]);
        if let DNode::Inner { palette, .. } = &mut d.nodes[2] {
            *palette = 2;
        }
        assert_eq!(
            d.validate_structure(),
            Err(StructureDefect::EmptySetConvention { node: 2 })
        );
        assert!(d.validate_structure().unwrap_err().to_string().starts_with("empty-set convention"));

        let one_child = KDecomposition::new(
            1,
            vec![
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Inner {
                    children: vec![0],
                    palette: 1,
                    table: Table::zeros(2, 1),
                },
            ],
            Some(1),
        );
        let defect = one_child.validate_structure().unwrap_err();
        assert_eq!(defect, StructureDefect::Arity { node: 1, children: 1 });
        assert!(defect.to_string().starts_with("arity"));
        assert!(matches!(
            one_child.eval_rank(&ElementSet::empty(1)),
            Err(EvalError::Malformed(_))
        ));

        let mut t = Table::zeros(2, 2);
        t.set(1, 1, 1, 0);
        assert_eq!(
            pair(t, [false, false]).validate_structure(),
            Err(StructureDefect::ColorOutOfPalette { node: 2, g1: 1, g2: 1 })
        );
        assert_eq!(
            pair(Table::zeros(2, 3), [false, false]).validate_structure(),
            Err(StructureDefect::TableShape { node: 2 })
        );

        let dup = KDecomposition::new(
            2,
            vec![
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Inner {
                    children: vec![0, 1],
                    palette: 1,
                    table: Table::zeros(2, 2),
                },
            ],
            Some(2),
        );
        assert_eq!(
            dup.validate_structure(),
            Err(StructureDefect::LeafBijection { elem: 0 })
        );

        let shared = KDecomposition::new(
            1,
            vec![
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Inner {
                    children: vec![0, 0],
                    palette: 1,
                    table: Table::zeros(2, 2),
                },
            ],
            Some(1),
        );
        assert!(matches!(
            shared.validate_structure(),
            Err(StructureDefect::NotATree { .. })
        ));
    }

    #[test]
    fn out_of_table_colors_are_errors() {
        // inner node declares palette 3 and emits color 2, but its parent's
        // table only has two rows
        let mut low = Table::zeros(2, 2);
        low.set(1, 1, 2, 0);
        let d = KDecomposition::new(
            3,
            vec![
                DNode::Leaf { elem: 0, is_loop: false },
                DNode::Leaf { elem: 1, is_loop: false },
                DNode::Leaf { elem: 2, is_loop: false },
                DNode::Inner {
                    children: vec![0, 1],
                    palette: 3,
                    table: low,
                },
                DNode::Inner {
                    children: vec![3, 2],
                    palette: 1,
                    table: Table::zeros(2, 2),
                },
            ],
            Some(4),
        );
        assert_eq!(
            d.validate_structure(),
            Err(StructureDefect::TableShape { node: 4 })
        );
        assert_eq!(
            d.eval_rank(&ElementSet::from_mask(3, 0b011)),
            Err(EvalError::ColorOutOfTable { node: 4, g1: 2, g2: 0 })
        );
    }

    #[test]
    fn empty_and_single_element() {
        let empty = KDecomposition::new(0, vec![], None);
        assert_eq!(empty.validate_structure(), Ok(()));
        assert_eq!(empty.eval_rank(&ElementSet::empty(0)).unwrap(), 0);
        assert_eq!(empty.width(), 0);

        let single = KDecomposition::new(1, vec![DNode::Leaf { elem: 0, is_loop: false }], Some(0));
        assert_eq!(single.rank_table().unwrap(), vec![0, 1]);
        assert_eq!(single.width(), 1);
    }
}
