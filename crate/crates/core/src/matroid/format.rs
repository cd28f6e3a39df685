//! Matroid text format.
//!
//! ```text
//! matroid linear q=<q> rows=<d> cols=<n>      then d rows of n entries
//! matroid graphic vertices=<V> edges=<n>      then n lines `u v`
//! matroid uniform r=<r> n=<n>
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Backend, MatroidInstance};
use crate::gf::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct MatroidParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> MatroidParseError {
    MatroidParseError {
        line,
        msg: msg.into(),
    }
}

/// Parses `key=value` tokens, requiring exactly the given keys in order.
pub(crate) fn keyed<'a>(
    line: usize,
    tokens: &[&'a str],
    keys: &[&str],
) -> Result<Vec<&'a str>, MatroidParseError> {
    if tokens.len() != keys.len() {
        return Err(err(line, format!("expected fields {}", keys.join(" "))));
    }
    tokens
        .iter()
        .zip(keys)
        .map(|(tok, key)| {
            tok.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| err(line, format!("expected {key}=<value>, got {tok:?}")))
        })
        .collect()
}

pub(crate) fn number<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, MatroidParseError> {
    s.parse()
        .map_err(|_| err(line, format!("invalid number {s:?}")))
}

pub fn parse_matroid(text: &str) -> Result<MatroidInstance, MatroidParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"matroid") || tokens.len() < 2 {
        return Err(err(hl, "expected `matroid <kind> ...` header"));
    }
    let m = match tokens[1] {
        "linear" => {
            let v = keyed(hl, &tokens[2..], &["q", "rows", "cols"])?;
            let q: u64 = number(hl, v[0])?;
            let (d, n): (usize, usize) = (number(hl, v[1])?, number(hl, v[2])?);
            let field = FieldSpec::from_order(q).map_err(|e| err(hl, e.to_string()))?;
            let mut matrix = Vec::with_capacity(d);
            for _ in 0..d {
                let (ln, row) = lines
                    .next()
                    .ok_or_else(|| err(hl, format!("expected {d} matrix rows")))?;
                let entries = row
                    .split_whitespace()
                    .map(|t| number::<u32>(ln, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if entries.len() != n {
                    return Err(err(ln, format!("expected {n} entries, got {}", entries.len())));
                }
                if let Some(bad) = entries.iter().find(|&&e| e as u64 >= q) {
                    return Err(err(ln, format!("entry {bad} not in 0..{q}")));
                }
                matrix.push(entries);
            }
            let columns = (0..n)
                .map(|j| matrix.iter().map(|r| r[j]).collect::<Vec<_>>().into())
                .collect();
            MatroidInstance::linear(field, d, columns).map_err(|e| err(hl, e.to_string()))?
        }
        "graphic" => {
            let v = keyed(hl, &tokens[2..], &["vertices", "edges"])?;
            let (nv, ne): (usize, usize) = (number(hl, v[0])?, number(hl, v[1])?);
            let mut edges = Vec::with_capacity(ne);
            for _ in 0..ne {
                let (ln, row) = lines
                    .next()
                    .ok_or_else(|| err(hl, format!("expected {ne} edge lines")))?;
                let ends: Vec<usize> = row
                    .split_whitespace()
                    .map(|t| number(ln, t))
                    .collect::<Result<_, _>>()?;
                let [u, w] = ends[..] else {
                    return Err(err(ln, "expected `u v`"));
                };
                if u >= nv || w >= nv {
                    return Err(err(ln, format!("vertex out of range 0..{nv}")));
                }
                edges.push((u, w));
            }
            MatroidInstance::graphic(nv, edges).map_err(|e| err(hl, e.to_string()))?
        }
        "uniform" => {
            let v = keyed(hl, &tokens[2..], &["r", "n"])?;
            let (r, n) = (number(hl, v[0])?, number(hl, v[1])?);
            MatroidInstance::uniform(r, n).map_err(|e| err(hl, e.to_string()))?
        }
        other => return Err(err(hl, format!("unknown matroid kind {other:?}"))),
    };
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "unexpected trailing content"));
    }
    Ok(m)
}

/// Writes a matroid in the text format. Explicit rank tables have no text
/// form and yield `None`.
pub fn write_matroid(m: &MatroidInstance) -> Option<String> {
    let mut out = String::new();
    match m.backend() {
        Backend::Linear { field, rows, columns } => {
            writeln!(out, "matroid linear q={} rows={} cols={}", field.order(), rows, columns.len()).ok()?;
            for i in 0..*rows {
                let row: Vec<String> = columns.iter().map(|c| c.entries()[i].to_string()).collect();
                writeln!(out, "{}", row.join(" ")).ok()?;
            }
        }
        Backend::Graphic { vertices, edges } => {
            writeln!(out, "matroid graphic vertices={} edges={}", vertices, edges.len()).ok()?;
            for (u, v) in edges {
                writeln!(out, "{u} {v}").ok()?;
            }
        }
        Backend::Uniform { rank } => {
            writeln!(out, "matroid uniform r={} n={}", rank, m.len()).ok()?;
        }
        Backend::ExplicitRank { .. } => return None,
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::ElementSet;

    #[test]
    fn parses_all_kinds() {
        let lin = parse_matroid("# U23\nmatroid linear q=2 rows=2 cols=3\n1 0 1\n0 1 1\n").unwrap();
        assert_eq!(lin.len(), 3);
        assert_eq!(lin.full_rank(), 2);
        let g = parse_matroid("matroid graphic vertices=3 edges=3\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.full_rank(), 2);
        let u = parse_matroid("matroid uniform r=2 n=5").unwrap();
        assert_eq!(u.rank(&ElementSet::full(5)), 2);
        let gf4 = parse_matroid("matroid linear q=4 rows=1 cols=2\n3 2\n").unwrap();
        assert_eq!(gf4.full_rank(), 1);
    }

    #[test]
    fn round_trips() {
        for text in [
            "matroid linear q=3 rows=2 cols=3\n1 0 2\n0 1 1\n",
            "matroid graphic vertices=2 edges=2\n0 1\n1 1\n",
            "matroid uniform r=1 n=3\n",
        ] {
            let m = parse_matroid(text).unwrap();
            assert_eq!(write_matroid(&m).unwrap(), text);
        }
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_matroid("matroid linear q=2 rows=2 cols=2\n1 0\n# c\n1 5\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_matroid("\n\nmatroid graphic vertices=2 edges=1\n0 7\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(parse_matroid("").unwrap_err().line, 1);
        assert!(parse_matroid("matroid linear q=6 rows=0 cols=0").is_err());
        assert!(parse_matroid("matroid uniform r=3 n=2").is_err());
        assert!(parse_matroid("matroid uniform n=2 r=1").is_err());
        let e = parse_matroid("matroid uniform r=1 n=2\nextra\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
