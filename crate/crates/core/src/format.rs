//! Plain-text arrangement format.
//!
//! ```text
//! # comment
//! dim 3
//! 1 0 0
//! 0 1 -1
//! ```
//!
//! The first non-comment line is `dim ℓ`; each later non-comment line is a
//! normal vector of ℓ integers. `#` starts a comment anywhere on a line.

use crate::arrangement::{canonicalize, Arrangement};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses the text format. With `strict`, a line that repeats an earlier
/// hyperplane (after canonicalisation) is an error; otherwise it is dropped.
pub fn parse_arrangement(text: &str, strict: bool) -> Result<Arrangement> {
    let mut dim: Option<usize> = None;
    let mut normals: Vec<Vec<i64>> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let mut it = body.split_whitespace();
            if it.next() != Some("dim") {
                return Err(parse_err(line, "expected header `dim <n>`"));
            }
            let n = it
                .next()
                .ok_or_else(|| parse_err(line, "missing dimension after `dim`"))?
                .parse::<usize>()
                .map_err(|e| parse_err(line, format!("bad dimension: {e}")))?;
            if it.next().is_some() {
                return Err(parse_err(line, "trailing tokens after dimension"));
            }
            dim = Some(n);
            continue;
        };
        let v: Vec<i64> = body
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|e| parse_err(line, format!("bad integer `{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if v.len() != d {
            return Err(parse_err(line, format!("expected {d} entries, found {}", v.len())));
        }
        let h = canonicalize(&v).map_err(|_| parse_err(line, "zero normal vector"))?;
        if let Some(first) = seen.get(&h) {
            if strict {
                return Err(parse_err(line, format!("duplicate of the hyperplane on line {first}")));
            }
            continue;
        }
        seen.insert(h.clone(), line);
        normals.push(h.normal().to_vec());
    }
    let dim = dim.ok_or_else(|| parse_err(0, "missing `dim` header"))?;
    Arrangement::new(dim, normals)
}

/// Canonical text: header, then one normal per line in arrangement order.
pub fn emit_arrangement(a: &Arrangement) -> String {
    let mut s = format!("dim {}\n", a.dim());
    for n in a.normals() {
        let row: Vec<String> = n.iter().map(|x| x.to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_plane() {
        let a = parse_arrangement("dim 2\n1 0\n0 1\n", false).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(emit_arrangement(&a), "dim 2\n1 0\n0 1\n");
    }

    #[test]
    fn comments_and_canonical_form() {
        let a = parse_arrangement("# header\ndim 3 # ambient\n2 -4 6\n\n-1 1 0 # x - y\n", false).unwrap();
        assert_eq!(emit_arrangement(&a), "dim 3\n1 -2 3\n1 -1 0\n");
    }

    #[test]
    fn wrong_arity_reports_line() {
        match parse_arrangement("dim 2\n1 0\n1 2 3\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicates() {
        let text = "dim 2\n1 1\n2 2\n";
        assert_eq!(parse_arrangement(text, false).unwrap().len(), 1);
        match parse_arrangement(text, true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_arrangement("1 0\n", false), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_arrangement("dim x\n", false), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_arrangement("", false), Err(Error::Parse { .. })));
        assert!(matches!(parse_arrangement("dim 2\n0 0\n", false), Err(Error::Parse { line: 2, .. })));
    }
}
