//! Branch-tree text format.
//!
//! ```text
//! bd n=<n>
//! node <id> <nbr> <nbr> <nbr>     unrooted: all three neighbours
//! node <id> <child> <child>       rooted: the two children
//! root <id>                       rooted only
//! ```
//!
//! Neighbours are inner ids or `L<k>` for the leaf of element `k`. An
//! unrooted tree on two elements has no `node` lines; its single edge joins
//! `L0` and `L1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{BranchTree, RootedBranchTree, RootedNode};
use crate::matroid::{keyed, number};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct TreeParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> TreeParseError {
    TreeParseError {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ref {
    Leaf(usize),
    Inner(usize),
}

struct Raw {
    n: usize,
    header_line: usize,
    /// inner id -> (line, references)
    nodes: BTreeMap<usize, (usize, Vec<Ref>)>,
    root: Option<(usize, Ref)>,
}

fn parse_ref(line: usize, tok: &str, n: usize) -> Result<Ref, TreeParseError> {
    if let Some(k) = tok.strip_prefix('L') {
        let k: usize = number(line, k).map_err(|e| err(line, e.msg))?;
        if k >= n {
            return Err(err(line, format!("leaf L{k} out of range for n={n}")));
        }
        Ok(Ref::Leaf(k))
    } else {
        Ok(Ref::Inner(number(line, tok).map_err(|e| err(line, e.msg))?))
    }
}

fn parse_raw(text: &str) -> Result<Raw, TreeParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"bd") {
        return Err(err(hl, "expected `bd n=<n>` header"));
    }
    let n: usize = keyed(hl, &tokens[1..], &["n"])
        .and_then(|v| number(hl, v[0]))
        .map_err(|e| err(hl, e.msg))?;
    let mut raw = Raw {
        n,
        header_line: hl,
        nodes: BTreeMap::new(),
        root: None,
    };
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "node" => {
                if tokens.len() < 4 || tokens.len() > 5 {
                    return Err(err(ln, "expected `node <id> <a> <b> [<c>]`"));
                }
                let id: usize = number(ln, tokens[1]).map_err(|e| err(ln, e.msg))?;
                let refs = tokens[2..]
                    .iter()
                    .map(|t| parse_ref(ln, t, n))
                    .collect::<Result<Vec<_>, _>>()?;
                if raw.nodes.insert(id, (ln, refs)).is_some() {
                    return Err(err(ln, format!("duplicate node {id}")));
                }
            }
            "root" if tokens.len() == 2 => {
                if raw.root.is_some() {
                    return Err(err(ln, "duplicate root"));
                }
                raw.root = Some((ln, parse_ref(ln, tokens[1], n)?));
            }
            _ => return Err(err(ln, format!("unexpected line {line:?}"))),
        }
    }
    Ok(raw)
}

pub fn parse_branch_tree(text: &str) -> Result<BranchTree, TreeParseError> {
    let raw = parse_raw(text)?;
    let n = raw.n;
    if let Some((ln, _)) = raw.root {
        return Err(err(ln, "unrooted tree cannot have a root line"));
    }
    let index: BTreeMap<usize, usize> = raw.nodes.keys().enumerate().map(|(i, &id)| (id, n + i)).collect();
    let mut edges = Vec::new();
    let mut inner_pairs = Vec::new();
    for (&id, (ln, refs)) in &raw.nodes {
        if refs.len() != 3 {
            return Err(err(*ln, "unrooted inner nodes list three neighbours"));
        }
        let v = index[&id];
        for r in refs {
            match *r {
                Ref::Leaf(k) => edges.push((v, k)),
                Ref::Inner(w) => {
                    let w = *index
                        .get(&w)
                        .ok_or_else(|| err(*ln, format!("unknown node {w}")))?;
                    inner_pairs.push((v.min(w), v.max(w)));
                }
            }
        }
    }
    inner_pairs.sort_unstable();
    for pair in inner_pairs.chunks(2) {
        if pair.len() != 2 || pair[0] != pair[1] {
            return Err(err(raw.header_line, "inner adjacency is not symmetric"));
        }
        edges.push(pair[0]);
    }
    if n == 2 && raw.nodes.is_empty() {
        edges.push((0, 1));
    }
    let count = n + raw.nodes.len();
    BranchTree::from_edges(n, count, &edges).map_err(|e| err(raw.header_line, e.to_string()))
}

pub fn parse_rooted_tree(text: &str) -> Result<RootedBranchTree, TreeParseError> {
    let raw = parse_raw(text)?;
    let n = raw.n;
    let index: BTreeMap<usize, usize> = raw.nodes.keys().enumerate().map(|(i, &id)| (id, n + i)).collect();
    let resolve = |ln: usize, r: Ref| match r {
        Ref::Leaf(k) => Ok(k),
        Ref::Inner(w) => index
            .get(&w)
            .copied()
            .ok_or_else(|| err(ln, format!("unknown node {w}"))),
    };
    let mut nodes: Vec<RootedNode> = (0..n).map(RootedNode::Leaf).collect();
    for (ln, refs) in raw.nodes.values() {
        let [a, b] = refs[..] else {
            return Err(err(*ln, "rooted inner nodes list two children"));
        };
        nodes.push(RootedNode::Inner {
            left: resolve(*ln, a)?,
            right: resolve(*ln, b)?,
        });
    }
    let root = match raw.root {
        Some((ln, r)) => Some(resolve(ln, r)?),
        None if n == 0 => None,
        None => return Err(err(raw.header_line, "missing root line")),
    };
    RootedBranchTree::new(n, nodes, root).map_err(|e| err(raw.header_line, e.to_string()))
}

fn ref_name(n: usize, v: usize) -> String {
    if v < n {
        format!("L{v}")
    } else {
        (v - n).to_string()
    }
}

pub fn write_branch_tree(t: &BranchTree) -> String {
    let n = t.len();
    let mut out = format!("bd n={n}\n");
    for v in n..t.node_count() {
        let nb: Vec<String> = t.neighbors(v).iter().map(|&w| ref_name(n, w)).collect();
        writeln!(out, "node {} {}", v - n, nb.join(" ")).expect("string write");
    }
    out
}

pub fn write_rooted_tree(t: &RootedBranchTree) -> String {
    let n = t.len();
    let mut out = format!("bd n={n}\n");
    for (v, node) in t.nodes().iter().enumerate() {
        if let RootedNode::Inner { left, right } = *node {
            writeln!(out, "node {} {} {}", v - n, ref_name(n, left), ref_name(n, right))
                .expect("string write");
        }
    }
    if let Some(r) = t.root() {
        writeln!(out, "root {}", ref_name(n, r)).expect("string write");
    }
    out
}
