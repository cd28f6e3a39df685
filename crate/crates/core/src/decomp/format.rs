//! Decomposition text format.
//!
//! ```text
//! dw version=1 n=<n> K=<K>
//! leaf <id> elem=<k> loop=<0|1>
//! inner <id> left=<id> right=<id> kv=<palette size>
//! phi <id> <g1> <g2> <color> <rdef>
//! root <id>
//! ```
//!
//! Table entries without a `phi` line are `0 0`. Node ids are arbitrary
//! distinct integers; nodes are numbered internally in declaration order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{DNode, KDecomposition, Table, LEAF_PALETTE};
use crate::matroid::{keyed, number};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct DecompParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> DecompParseError {
    DecompParseError {
        line,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, DecompParseError> {
    number(line, s).map_err(|e| err(line, e.msg))
}

fn fields<'a>(line: usize, tokens: &[&'a str], keys: &[&str]) -> Result<Vec<&'a str>, DecompParseError> {
    keyed(line, tokens, keys).map_err(|e| err(line, e.msg))
}

struct PendingInner {
    line: usize,
    left: u64,
    right: u64,
    palette: u32,
}

pub fn parse_decomposition(text: &str) -> Result<KDecomposition, DecompParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"dw") {
        return Err(err(hl, "expected `dw version=1 n=<n> K=<K>` header"));
    }
    let v = fields(hl, &tokens[1..], &["version", "n", "K"])?;
    if v[0] != "1" {
        return Err(err(hl, format!("unsupported version {}", v[0])));
    }
    let n: usize = num(hl, v[1])?;
    let k: u32 = num(hl, v[2])?;
    let max_palette = k.saturating_add(1);
    if n > 0 && max_palette < LEAF_PALETTE {
        return Err(err(hl, format!("palette bound: K={k} is below the leaf palette")));
    }

    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut nodes: Vec<DNode> = Vec::new();
    let mut inners: Vec<(usize, PendingInner)> = Vec::new();
    let mut phis: Vec<(usize, u64, [u32; 4])> = Vec::new();
    let mut root: Option<(usize, u64)> = None;

    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let declare = |ids: &mut HashMap<u64, usize>, count: usize| -> Result<(), DecompParseError> {
            let id: u64 = num(ln, tokens.get(1).copied().unwrap_or(""))?;
            if ids.insert(id, count).is_some() {
                return Err(err(ln, format!("duplicate node id {id}")));
            }
            Ok(())
        };
        match tokens[0] {
            "leaf" => {
                if tokens.len() != 4 {
                    return Err(err(ln, "expected `leaf <id> elem=<k> loop=<0|1>`"));
                }
                declare(&mut ids, nodes.len())?;
                let f = fields(ln, &tokens[2..], &["elem", "loop"])?;
                let elem: usize = num(ln, f[0])?;
                if elem >= n {
                    return Err(err(ln, format!("element {elem} out of range for n={n}")));
                }
                let is_loop = match f[1] {
                    "0" => false,
                    "1" => true,
                    other => return Err(err(ln, format!("loop flag must be 0 or 1, got {other:?}"))),
                };
                nodes.push(DNode::Leaf { elem, is_loop });
            }
            "inner" => {
                if tokens.len() != 5 {
                    return Err(err(ln, "expected `inner <id> left=<id> right=<id> kv=<k>`"));
                }
                declare(&mut ids, nodes.len())?;
                let f = fields(ln, &tokens[2..], &["left", "right", "kv"])?;
                let palette: u32 = num(ln, f[2])?;
                if palette == 0 || palette > max_palette {
                    return Err(err(
                        ln,
                        format!("palette bound: kv={palette} outside 1..={max_palette} for K={k}"),
                    ));
                }
                inners.push((
                    nodes.len(),
                    PendingInner {
                        line: ln,
                        left: num(ln, f[0])?,
                        right: num(ln, f[1])?,
                        palette,
                    },
                ));
                // placeholder, replaced once all nodes are known
                nodes.push(DNode::Leaf { elem: usize::MAX, is_loop: false });
            }
            "phi" => {
                if tokens.len() != 6 {
                    return Err(err(ln, "expected `phi <id> <g1> <g2> <color> <rdef>`"));
                }
                let id: u64 = num(ln, tokens[1])?;
                let mut vals = [0u32; 4];
                for (slot, tok) in vals.iter_mut().zip(&tokens[2..]) {
                    *slot = num(ln, tok)?;
                }
                phis.push((ln, id, vals));
            }
            "root" => {
                if tokens.len() != 2 || root.is_some() {
                    return Err(err(ln, "expected a single `root <id>` line"));
                }
                root = Some((ln, num(ln, tokens[1])?));
            }
            other => return Err(err(ln, format!("unknown record {other:?}"))),
        }
    }

    let resolve = |ln: usize, id: u64| {
        ids.get(&id)
            .copied()
            .ok_or_else(|| err(ln, format!("unknown node id {id}")))
    };
    let mut palettes: Vec<u32> = nodes.iter().map(DNode::palette).collect();
    for (idx, p) in &inners {
        palettes[*idx] = p.palette;
    }
    for (idx, p) in inners {
        let (l, r) = (resolve(p.line, p.left)?, resolve(p.line, p.right)?);
        nodes[idx] = DNode::Inner {
            children: vec![l, r],
            palette: p.palette,
            table: Table::zeros(palettes[l], palettes[r]),
        };
    }
    let mut seen = std::collections::HashSet::new();
    for (ln, id, [g1, g2, color, rdef]) in phis {
        let idx = resolve(ln, id)?;
        let DNode::Inner { palette, table, .. } = &mut nodes[idx] else {
            return Err(err(ln, format!("node {id} is a leaf")));
        };
        if g1 >= table.rows() || g2 >= table.cols() {
            return Err(err(ln, format!("palette bound: child colors ({g1}, {g2}) outside the table")));
        }
        if color >= *palette || color > k {
            return Err(err(
                ln,
                format!("palette bound: color {color} outside palette of size {palette} (K={k})"),
            ));
        }
        if !seen.insert((idx, g1, g2)) {
            return Err(err(ln, format!("duplicate entry ({g1}, {g2}) for node {id}")));
        }
        table.set(g1, g2, color, rdef);
    }
    let root = match root {
        Some((ln, id)) => Some(resolve(ln, id)?),
        None if nodes.is_empty() => None,
        None => return Err(err(hl, "missing root line")),
    };
    Ok(KDecomposition::new(n, nodes, root))
}

pub fn write_decomposition(d: &KDecomposition) -> String {
    let mut out = format!("dw version=1 n={} K={}\n", d.len(), d.width());
    for (id, node) in d.nodes().iter().enumerate() {
        match node {
            DNode::Leaf { elem, is_loop } => {
                writeln!(out, "leaf {id} elem={elem} loop={}", *is_loop as u8)
            }
            DNode::Inner {
                children,
                palette,
                table,
            } => {
                let (l, r) = match children[..] {
                    [l, r] => (l, r),
                    _ => panic!("cannot serialize node {id} with {} children", children.len()),
                };
                writeln!(out, "inner {id} left={l} right={r} kv={palette}").expect("string write");
                table
                    .nonzero()
                    .try_for_each(|(g1, g2, c, dr)| writeln!(out, "phi {id} {g1} {g2} {c} {dr}"))
            }
        }
        .expect("string write");
    }
    if let Some(r) = d.root() {
        writeln!(out, "root {r}").expect("string write");
    }
    out
}
