//! Branch-decompositions of matroids.
//!
//! Widths use the convention `r(E1) + r(E2) − r(E)` for an edge inducing the
//! bipartition `(E1, E2)`. This is one less than the `+1` convention found in
//! most matroid texts (so the Fano plane has width 2 here, not 3).

mod format;

use thiserror::Error;

pub use format::{parse_branch_tree, parse_rooted_tree, write_branch_tree, write_rooted_tree, TreeParseError};

use crate::matroid::{oracle, ElementSet, MatroidInstance};

/// Largest ground set for [`exact_branch_decomposition`].
pub const MAX_EXACT: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error("exhaustive search supports at most {max} elements, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid branch tree: {0}")]
    Invalid(String),
    #[error("edge ({0}, {1}) is not in the tree")]
    NoSuchEdge(usize, usize),
}

/// Unrooted tree whose leaves are the elements `0..n` and whose inner nodes
/// have degree 3. Node `k < n` is the leaf of element `k`; inner nodes follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchTree {
    n: usize,
    adj: Vec<Vec<usize>>,
}

/// A tree edge as a pair of node ids.
pub type Edge = (usize, usize);

impl BranchTree {
    /// Builds a tree from its edge list, checking shape and leaf bijection.
    pub fn from_edges(n: usize, node_count: usize, edges: &[Edge]) -> Result<Self, BranchError> {
        let mut adj = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a >= node_count || b >= node_count || a == b {
                return Err(BranchError::Invalid(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let t = BranchTree { n, adj };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<(), BranchError> {
        let (n, nodes) = (self.n, self.adj.len());
        let expected = match n {
            0 | 1 => n,
            _ => 2 * n - 2,
        };
        if nodes != expected {
            return Err(BranchError::Invalid(format!(
                "{n} leaves need {expected} nodes, got {nodes}"
            )));
        }
        for (v, nb) in self.adj.iter().enumerate() {
            let want = if v < n { usize::from(n > 1) } else { 3 };
            if nb.len() != want {
                return Err(BranchError::Invalid(format!(
                    "node {v} has degree {}, expected {want}",
                    nb.len()
                )));
            }
        }
        let edge_count: usize = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        if nodes > 0 && (edge_count != nodes - 1 || self.reachable(0, usize::MAX).len() != nodes) {
            return Err(BranchError::Invalid("not a tree".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.n
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(a, nb)| nb.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    fn has_edge(&self, (a, b): Edge) -> bool {
        a < self.adj.len() && self.adj[a].contains(&b)
    }

    /// Nodes reachable from `start` without stepping onto `blocked`.
    fn reachable(&self, start: usize, blocked: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            out.push(v);
            for &w in &self.adj[v] {
                if w != blocked && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out
    }

    /// Leaves on the `b` side of edge `(a, b)`.
    pub fn side(&self, (a, b): Edge) -> Result<ElementSet, BranchError> {
        if !self.has_edge((a, b)) {
            return Err(BranchError::NoSuchEdge(a, b));
        }
        let mut s = ElementSet::empty(self.n);
        for v in self.reachable(b, a) {
            if self.is_leaf(v) {
                s.insert(v);
            }
        }
        Ok(s)
    }

    /// The pendant edge of element 0's leaf, oriented leaf first. This is
    /// the edge [`root_tree`] subdivides when no edge is given.
    pub fn default_root_edge(&self) -> Option<Edge> {
        (self.n >= 2).then(|| (0, self.adj[0][0]))
    }
}

/// Width `r(E1) + r(E2) − r(E)` of one tree edge.
pub fn edge_width(m: &MatroidInstance, t: &BranchTree, e: Edge) -> Result<usize, BranchError> {
    Ok(m.separation_width(&t.side(e)?))
}

/// Maximum edge width; 0 for trees without edges.
pub fn width(m: &MatroidInstance, t: &BranchTree) -> usize {
    t.edges()
        .into_iter()
        .map(|e| edge_width(m, t, e).expect("edge of t"))
        .max()
        .unwrap_or(0)
}

fn trivial_tree(n: usize) -> BranchTree {
    let edges: &[Edge] = if n == 2 { &[(0, 1)] } else { &[] };
    BranchTree::from_edges(n, n, edges).expect("trivial tree")
}

/// Tree edge `(a, b)` with the leaf mask of its `b` side.
type MaskedEdge = (usize, usize, u32);

/// Calls `visit` on every leaf-labelled cubic tree with leaves `0..n`
/// (`3 <= n <= 31`), built by inserting leaf `k` on each edge of every tree on
/// leaves `0..k`. Leaves are nodes `0..n`, inner nodes `n..2n-2`.
fn for_each_cubic_tree(n: usize, mut visit: impl FnMut(&[MaskedEdge])) {
    fn grow(n: usize, k: usize, edges: &[MaskedEdge], visit: &mut impl FnMut(&[MaskedEdge])) {
        if k == n {
            visit(edges);
            return;
        }
        let placed = (1u32 << k) - 1;
        let x = n + k - 2;
        for (i, &(a, b, m_b)) in edges.iter().enumerate() {
            let rest = placed & !m_b;
            // leaf k joins whichever side of each other edge contains edge i
            let mut next: Vec<MaskedEdge> = edges
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &(fa, fb, s))| {
                    if m_b & !s == 0 || rest & !s == 0 {
                        (fa, fb, s | 1 << k)
                    } else {
                        (fa, fb, s)
                    }
                })
                .collect();
            next.push((a, x, m_b | 1 << k));
            next.push((x, b, m_b));
            next.push((x, k, 1 << k));
            grow(n, k + 1, &next, visit);
        }
    }
    let c = n;
    grow(n, 3, &[(c, 0, 1), (c, 1, 2), (c, 2, 4)], &mut visit);
}

/// Minimum-width branch-decomposition by enumerating all `(2n−5)!!`
/// leaf-labelled cubic trees. Ties go to the first tree in enumeration order.
pub fn exact_branch_decomposition(m: &MatroidInstance) -> Result<(BranchTree, usize), BranchError> {
    let n = m.len();
    if n > MAX_EXACT {
        return Err(BranchError::TooLarge { n, max: MAX_EXACT });
    }
    if n <= 2 {
        let t = trivial_tree(n);
        let w = width(m, &t);
        return Ok((t, w));
    }
    let ranks = oracle::rank_table(m).expect("n <= MAX_EXACT");
    let all = (1u32 << n) - 1;
    let lambda: Vec<u8> = (0..=all)
        .map(|s| (ranks[s as usize] + ranks[(all & !s) as usize] - ranks[all as usize]) as u8)
        .collect();

    let mut best: Option<(u8, Vec<MaskedEdge>)> = None;
    for_each_cubic_tree(n, |edges| {
        let w = edges.iter().map(|&(_, _, s)| lambda[s as usize]).max().unwrap_or(0);
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, edges.to_vec()));
        }
    });
    let (w, edges) = best.expect("at least one tree");
    let pairs: Vec<Edge> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
    let t = BranchTree::from_edges(n, 2 * n - 2, &pairs).expect("enumerated tree is valid");
    Ok((t, w as usize))
}

/// Caterpillar over the element order `order`: inner node `j` carries leaf
/// `order[j]`, with the first and last inner nodes taking two leaves each.
pub fn caterpillar(n: usize, order: &[usize]) -> Result<BranchTree, BranchError> {
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&e| e >= n || std::mem::replace(&mut seen[e], true)) {
        return Err(BranchError::Invalid("order is not a permutation".into()));
    }
    if n <= 2 {
        return Ok(trivial_tree(n));
    }
    let inner = |j: usize| n + j - 1; // j in 1..=n-2
    let mut edges = vec![(inner(1), order[0])];
    for j in 1..=n - 2 {
        edges.push((inner(j), order[j]));
        if j + 1 <= n - 2 {
            edges.push((inner(j), inner(j + 1)));
        }
    }
    edges.push((inner(n - 2), order[n - 1]));
    BranchTree::from_edges(n, 2 * n - 2, &edges)
}

/// Greedy caterpillar: repeatedly append the element whose addition gives
/// the smallest separation width for the prefix (ties to the lowest index).
pub fn greedy_branch_decomposition(m: &MatroidInstance) -> (BranchTree, usize) {
    let n = m.len();
    let mut prefix = ElementSet::empty(n);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&e| !prefix.contains(e))
            .min_by_key(|&e| {
                let mut p = prefix.clone();
                p.insert(e);
                m.separation_width(&p)
            })
            .expect("remaining element");
        prefix.insert(next);
        order.push(next);
    }
    let t = caterpillar(n, &order).expect("permutation");
    let w = width(m, &t);
    (t, w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootedNode {
    Leaf(usize),
    Inner { left: usize, right: usize },
}

/// Rooted binary tree; node `k < n` is the leaf of element `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBranchTree {
    n: usize,
    nodes: Vec<RootedNode>,
    root: Option<usize>,
}

impl RootedBranchTree {
    /// Checks leaf bijection, binary shape and that every node hangs below
    /// `root` exactly once.
    pub fn new(n: usize, nodes: Vec<RootedNode>, root: Option<usize>) -> Result<Self, BranchError> {
        let t = RootedBranchTree { n, nodes, root };
        let bad = |m: &str| Err(BranchError::Invalid(m.to_string()));
        if t.nodes.len() != n.saturating_mul(2).saturating_sub(1) {
            return bad("wrong node count");
        }
        for (i, node) in t.nodes.iter().enumerate() {
            match *node {
                RootedNode::Leaf(e) if i < n && e == i => {}
                RootedNode::Inner { left, right }
                    if i >= n && left < t.nodes.len() && right < t.nodes.len() => {}
                _ => return bad("leaf/inner numbering"),
            }
        }
        match root {
            None if n == 0 => return Ok(t),
            Some(r) if r < t.nodes.len() => {
                let mut count = vec![0u32; t.nodes.len()];
                let mut stack = vec![r];
                while let Some(v) = stack.pop() {
                    count[v] += 1;
                    if count[v] > 1 {
                        return bad("node reached twice");
                    }
                    if let RootedNode::Inner { left, right } = t.nodes[v] {
                        stack.extend([left, right]);
                    }
                }
                if count.iter().any(|&c| c != 1) {
                    return bad("node not below root");
                }
            }
            _ => return bad("bad root"),
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn nodes(&self) -> &[RootedNode] {
        &self.nodes
    }

    pub fn inner_count(&self) -> usize {
        self.nodes.len() - self.n
    }

    /// Nodes with every child before its parent, root last.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let Some(r) = self.root else { return out };
        let mut stack = vec![(r, false)];
        while let Some((v, expanded)) = stack.pop() {
            match self.nodes[v] {
                RootedNode::Inner { left, right } if !expanded => {
                    stack.push((v, true));
                    stack.push((right, false));
                    stack.push((left, false));
                }
                _ => out.push(v),
            }
        }
        out
    }

    /// Leaf set below every node.
    pub fn leaf_sets(&self) -> Vec<ElementSet> {
        let mut sets = vec![ElementSet::empty(self.n); self.nodes.len()];
        for v in self.postorder() {
            sets[v] = match self.nodes[v] {
                RootedNode::Leaf(e) => ElementSet::singleton(self.n, e),
                RootedNode::Inner { left, right } => sets[left].union(&sets[right]),
            };
        }
        sets
    }
}

/// Subdivides edge `e = (a, b)` (or the default root edge) and roots the tree
/// at the new node, with the `a` side as left child. Children of other inner
/// nodes keep their adjacency order.
pub fn root_tree(t: &BranchTree, e: Option<Edge>) -> Result<RootedBranchTree, BranchError> {
    let n = t.n;
    if n <= 1 {
        let nodes = (0..n).map(RootedNode::Leaf).collect();
        return RootedBranchTree::new(n, nodes, (n == 1).then_some(0));
    }
    let (a, b) = match e {
        Some(e) => e,
        None => t.default_root_edge().expect("n >= 2"),
    };
    if !t.has_edge((a, b)) {
        return Err(BranchError::NoSuchEdge(a, b));
    }
    // inner nodes of t keep relative order; the new root goes last
    let mut id = vec![usize::MAX; t.node_count()];
    for (k, slot) in id.iter_mut().enumerate().take(n) {
        *slot = k;
    }
    let mut next = n;
    for v in n..t.node_count() {
        id[v] = next;
        next += 1;
    }
    let root = next;
    let mut nodes: Vec<RootedNode> = (0..n).map(RootedNode::Leaf).collect();
    nodes.resize(root + 1, RootedNode::Leaf(usize::MAX));
    nodes[root] = RootedNode::Inner {
        left: id[a],
        right: id[b],
    };
    let mut stack = vec![(a, b), (b, a)];
    while let Some((v, parent)) = stack.pop() {
        if t.is_leaf(v) {
            continue;
        }
        let kids: Vec<usize> = t.adj[v].iter().copied().filter(|&w| w != parent).collect();
        nodes[id[v]] = RootedNode::Inner {
            left: id[kids[0]],
            right: id[kids[1]],
        };
        stack.extend(kids.iter().map(|&w| (w, v)));
    }
    RootedBranchTree::new(n, nodes, Some(root))
}
