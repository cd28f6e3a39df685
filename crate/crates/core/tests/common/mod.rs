#![allow(dead_code)]

use dwidth::gf::FieldSpec;
use dwidth::matroid::MatroidInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub name: String,
    pub q: u64,
    /// Column vectors over the prime field `GF(q)`.
    pub columns: Vec<Vec<u32>>,
    pub matroid: MatroidInstance,
}

fn from_columns(name: &str, q: u64, columns: Vec<Vec<u32>>) -> Instance {
    let rows = columns[0].len();
    let matrix: Vec<Vec<u32>> = (0..rows)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let field = FieldSpec::from_order(q).unwrap();
    Instance {
        name: name.to_string(),
        q,
        matroid: MatroidInstance::from_matrix(field, &matrix).unwrap(),
        columns,
    }
}

fn graphic(name: &str, vertices: usize, edges: &[(usize, usize)]) -> Instance {
    let columns = edges
        .iter()
        .map(|&(u, v)| {
            let mut c = vec![0; vertices];
            if u != v {
                c[u] = 1;
                c[v] = 1;
            }
            c
        })
        .collect();
    from_columns(name, 2, columns)
}

pub fn u12() -> Instance {
    from_columns("U(1,2)", 2, vec![vec![1], vec![1]])
}

pub fn u23() -> Instance {
    from_columns("U(2,3)", 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]])
}

pub fn fano() -> Instance {
    from_columns(
        "Fano",
        2,
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![1, 1, 1],
        ],
    )
}

pub const K4_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn k4() -> Instance {
    graphic("M(K4)", 4, &K4_EDGES)
}

pub fn c5() -> Instance {
    graphic("C5", 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
}

pub fn loop_coloop_mixes() -> Vec<Instance> {
    vec![
        from_columns("loop", 2, vec![vec![0]]),
        from_columns("coloop", 2, vec![vec![1]]),
        from_columns("loop+coloop", 2, vec![vec![0], vec![1]]),
        from_columns("parallel pair+coloop", 2, vec![vec![1, 0], vec![1, 0], vec![0, 1]]),
        from_columns(
            "parallel pair+coloop+loop",
            2,
            vec![vec![1, 0], vec![0, 0], vec![1, 0], vec![0, 1]],
        ),
        from_columns("three loops", 2, vec![vec![0, 0], vec![0, 0], vec![0, 0]]),
        from_columns("three coloops", 3, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]),
    ]
}

pub fn random_matrix(name: &str, q: u64, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Instance {
    let columns = (0..cols)
        .map(|_| (0..rows).map(|_| rng.gen_range(0..q as u32)).collect())
        .collect();
    from_columns(name, q, columns)
}

/// The full corpus: fixed instances, 20 random 4×8 matrices over GF(2) and 10
/// random 3×7 matrices over GF(3).
pub fn corpus() -> Vec<Instance> {
    let mut out = vec![u12(), u23()];
    out.extend(loop_coloop_mixes());
    out.extend([fano(), k4(), c5()]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for i in 0..20 {
        out.push(random_matrix(&format!("GF(2) 4x8 #{i}"), 2, 4, 8, &mut rng));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for i in 0..10 {
        out.push(random_matrix(&format!("GF(3) 3x7 #{i}"), 3, 3, 7, &mut rng));
    }
    out
}

/// Rank of the columns selected by `mask`, by Gaussian elimination over the
/// prime field `GF(p)`.
pub fn prime_rank(columns: &[Vec<u32>], mask: u64, p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = columns
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, c)| c.iter().map(|&x| x as u64 % p).collect())
        .collect();
    let width = columns.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|&x| x * rows[rank][col] % p == 1).unwrap();
        let pr: Vec<u64> = rows[rank].iter().map(|&x| x * inv % p).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pr) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rows[rank] = pr;
        rank += 1;
    }
    rank
}

/// Ranks of all subsets, from [`prime_rank`].
pub fn rank_table(inst: &Instance) -> Vec<i64> {
    let n = inst.columns.len();
    (0..1u64 << n)
        .map(|mask| prime_rank(&inst.columns, mask, inst.q) as i64)
        .collect()
}

/// Subsets counted by `(size, rank)`, from [`rank_table`].
pub fn whitney_counts(inst: &Instance) -> Vec<(usize, usize, u64)> {
    let table = rank_table(inst);
    let mut counts = std::collections::BTreeMap::new();
    for (mask, &r) in table.iter().enumerate() {
        *counts.entry((mask.count_ones() as usize, r as usize)).or_insert(0u64) += 1;
    }
    counts.into_iter().map(|((s, r), c)| (s, r, c)).collect()
}

/// Spanning trees of a connected graph by checking every `(V−1)`-edge subset
/// for cycles.
pub fn spanning_trees(vertices: usize, edges: &[(usize, usize)]) -> u64 {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    (0..1u64 << edges.len())
        .filter(|m| m.count_ones() as usize == vertices - 1)
        .filter(|&m| {
            let mut parent: Vec<usize> = (0..vertices).collect();
            edges.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).all(|(_, &(u, v))| {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
                a != b
            })
        })
        .count() as u64
}
