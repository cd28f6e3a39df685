//! Matroid instances with rank oracles.

mod elements;
mod format;
pub mod oracle;

use thiserror::Error;

pub use elements::ElementSet;
pub use format::{parse_matroid, write_matroid, MatroidParseError};
pub(crate) use format::{keyed, number};

use crate::gf::{rank_of, FVector, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("column {col} has length {got}, expected {expected}")]
    ColumnLength { col: usize, got: usize, expected: usize },
    #[error("column {col} has an entry outside GF({q})")]
    ColumnEntry { col: usize, q: u32 },
    #[error("edge {edge} uses vertex {vertex} but the graph has {vertices} vertices")]
    EdgeVertex { edge: usize, vertex: usize, vertices: usize },
    #[error("uniform rank {rank} exceeds ground set size {n}")]
    UniformRank { rank: usize, n: usize },
    #[error("explicit rank table needs 2^{n} entries, got {got}")]
    TableLength { n: usize, got: usize },
    #[error("explicit rank tables support at most {max} elements, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("rank table violates the matroid axioms: {0}")]
    NotMatroid(String),
    #[error("matroid has no linear representation in this backend")]
    NotLinear,
}

/// Largest ground set accepted by the explicit-table backend.
pub const MAX_EXPLICIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Columns `w_e` of a `rows × n` matrix over a finite field.
    Linear {
        field: FieldSpec,
        rows: usize,
        columns: Vec<FVector>,
    },
    /// Edge list over vertices `0..vertices`; self-loops are matroid loops.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Uniform { rank: usize },
    /// `table[mask]` is the rank of the subset with bitmask `mask`.
    ExplicitRank { table: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidInstance {
    n: usize,
    backend: Backend,
}

impl MatroidInstance {
    pub fn linear(field: FieldSpec, rows: usize, columns: Vec<FVector>) -> Result<Self, MatroidError> {
        for (col, c) in columns.iter().enumerate() {
            if c.dim() != rows {
                return Err(MatroidError::ColumnLength {
                    col,
                    got: c.dim(),
                    expected: rows,
                });
            }
            if c.check(&field).is_err() {
                return Err(MatroidError::ColumnEntry {
                    col,
                    q: field.order(),
                });
            }
        }
        Ok(MatroidInstance {
            n: columns.len(),
            backend: Backend::Linear { field, rows, columns },
        })
    }

    /// Linear matroid from a row-major `rows × cols` matrix.
    pub fn from_matrix(field: FieldSpec, matrix: &[Vec<u32>]) -> Result<Self, MatroidError> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| FVector::new(matrix.iter().map(|r| r.get(j).copied().unwrap_or(0)).collect()))
            .collect();
        if let Some((i, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(MatroidError::ColumnLength {
                col: i,
                got: r.len(),
                expected: cols,
            });
        }
        MatroidInstance::linear(field, rows, columns)
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, MatroidError> {
        for (edge, &(u, v)) in edges.iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= vertices {
                    return Err(MatroidError::EdgeVertex {
                        edge,
                        vertex,
                        vertices,
                    });
                }
            }
        }
        Ok(MatroidInstance {
            n: edges.len(),
            backend: Backend::Graphic { vertices, edges },
        })
    }

    pub fn uniform(rank: usize, n: usize) -> Result<Self, MatroidError> {
        if rank > n {
            return Err(MatroidError::UniformRank { rank, n });
        }
        Ok(MatroidInstance {
            n,
            backend: Backend::Uniform { rank },
        })
    }

    /// Explicit rank table over all `2^n` subsets, validated eagerly.
    pub fn explicit(n: usize, table: Vec<u32>) -> Result<Self, MatroidError> {
        if n > MAX_EXPLICIT {
            return Err(MatroidError::TooLarge { n, max: MAX_EXPLICIT });
        }
        if table.len() != 1 << n {
            return Err(MatroidError::TableLength { n, got: table.len() });
        }
        oracle::check_local_axioms(n, &table).map_err(MatroidError::NotMatroid)?;
        Ok(MatroidInstance {
            n,
            backend: Backend::ExplicitRank { table },
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn ground_set(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn rank(&self, set: &ElementSet) -> usize {
        debug_assert_eq!(set.universe(), self.n);
        match &self.backend {
            Backend::Linear { field, rows, columns } => {
                rank_of(set.iter().map(|e| &columns[e]), *rows, field)
            }
            Backend::Graphic { vertices, edges } => {
                let mut uf = UnionFind::new(*vertices);
                set.iter()
                    .filter(|&e| uf.union(edges[e].0, edges[e].1))
                    .count()
            }
            Backend::Uniform { rank } => set.len().min(*rank),
            Backend::ExplicitRank { table } => {
                table[set.to_mask().expect("explicit tables have n <= 20") as usize] as usize
            }
        }
    }

    pub fn full_rank(&self) -> usize {
        self.rank(&self.ground_set())
    }

    /// Connectivity of the separation `(set, E∖set)`: `r(A) + r(E∖A) − r(E)`.
    pub fn separation_width(&self, set: &ElementSet) -> usize {
        self.rank(set) + self.rank(&set.complement()) - self.full_rank()
    }

    /// A GF(q) representation of this matroid: linear instances as is,
    /// graphic instances through their vertex-incidence vectors over GF(2).
    pub fn to_linear(&self) -> Result<MatroidInstance, MatroidError> {
        match &self.backend {
            Backend::Linear { .. } => Ok(self.clone()),
            Backend::Graphic { vertices, edges } => {
                let columns = edges
                    .iter()
                    .map(|&(u, v)| {
                        let mut c = vec![0; *vertices];
                        if u != v {
                            c[u] = 1;
                            c[v] = 1;
                        }
                        FVector::new(c)
                    })
                    .collect();
                MatroidInstance::linear(FieldSpec::gf2(), *vertices, columns)
            }
            _ => Err(MatroidError::NotLinear),
        }
    }

    /// `(loops, coloops)` of the matroid.
    pub fn loops_and_coloops(&self) -> (ElementSet, ElementSet) {
        let n = self.n;
        let full = self.full_rank();
        let mut loops = ElementSet::empty(n);
        let mut coloops = ElementSet::empty(n);
        for e in 0..n {
            if self.rank(&ElementSet::singleton(n, e)) == 0 {
                loops.insert(e);
            }
            let mut rest = self.ground_set();
            rest.remove(e);
            if self.rank(&rest) + 1 == full {
                coloops.insert(e);
            }
        }
        (loops, coloops)
    }
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
