//! Large synthetic instances with decompositions written down directly.
//!
//! Both families use the left-deep caterpillar: inner node `j` (for
//! `j = 1..n`) joins the previous spine node with the leaf of element `j`,
//! and the last spine node is the root.

use crate::branch::{RootedBranchTree, RootedNode};
use crate::decomp::{DNode, KDecomposition, Table};
use crate::matroid::MatroidInstance;

/// Graphic matroid of the path with `n` edges: every element is a coloop.
pub fn path_matroid(n: usize) -> MatroidInstance {
    let edges = (0..n).map(|i| (i, i + 1)).collect();
    MatroidInstance::graphic(n + 1, edges).expect("valid path graph")
}

/// Graphic matroid of the cycle with `n` edges; edge `i` joins vertices `i`
/// and `i+1 mod n`.
pub fn cycle_matroid(n: usize) -> MatroidInstance {
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    MatroidInstance::graphic(n, edges).expect("valid cycle graph")
}

/// Node id of spine node `j` (`1 ≤ j < n`); spine node 0 is leaf 0.
fn spine(n: usize, j: usize) -> usize {
    if j == 0 {
        0
    } else {
        n + j - 1
    }
}

/// The left-deep caterpillar as a rooted branch tree.
pub fn caterpillar_tree(n: usize) -> RootedBranchTree {
    let mut nodes: Vec<RootedNode> = (0..n).map(RootedNode::Leaf).collect();
    for j in 1..n {
        nodes.push(RootedNode::Inner {
            left: spine(n, j - 1),
            right: j,
        });
    }
    let root = (n > 0).then(|| spine(n, n - 1));
    RootedBranchTree::new(n, nodes, root).expect("caterpillar is a valid tree")
}

fn caterpillar_decomposition(n: usize, inner: impl Fn(usize) -> (u32, Table)) -> KDecomposition {
    let mut nodes: Vec<DNode> = (0..n)
        .map(|elem| DNode::Leaf {
            elem,
            is_loop: false,
        })
        .collect();
    for j in 1..n {
        let (palette, table) = inner(j);
        nodes.push(DNode::Inner {
            children: vec![spine(n, j - 1), j],
            palette,
            table,
        });
    }
    let root = (n > 0).then(|| spine(n, n - 1));
    KDecomposition::new(n, nodes, root)
}

/// Decomposition of [`path_matroid`] on the caterpillar: all tables zero.
pub fn path_decomposition(n: usize) -> KDecomposition {
    caterpillar_decomposition(n, |j| {
        let rows = if j == 1 { 2 } else { 1 };
        (1, Table::zeros(rows, 2))
    })
}

/// Decomposition of [`cycle_matroid`] (`n ≥ 2`) on the caterpillar. Below
/// the root, color 1 marks a spine prefix containing all of its edges; the
/// root charges one rank when both sides are complete.
pub fn cycle_decomposition(n: usize) -> KDecomposition {
    assert!(n >= 2, "cycle needs at least two edges");
    caterpillar_decomposition(n, |j| {
        let mut t = Table::zeros(2, 2);
        if j + 1 == n {
            t.set(1, 1, 0, 1);
            (1, t)
        } else {
            t.set(1, 1, 1, 0);
            (2, t)
        }
    })
}
