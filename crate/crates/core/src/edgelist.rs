//! Whitespace-separated edge lists (Network Repository `.edges`/`.mtx` style).
//!
//! One edge per line as `u v [weight]`. Lines starting with `%` or `#` are
//! comments. The first data line is a dimension header when it holds at least
//! three integers and its first two agree (`n n m`); such a line would
//! otherwise be a self-loop, which is dropped anyway. Weights are binarized,
//! self-loops dropped, and the result symmetrized.
//!
//! Vertex ids are compacted to `1..=n` in increasing order, unless a header is
//! present and every id fits in `1..=n`, in which case ids are kept as-is so
//! isolated vertices survive a round trip.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

fn is_dimension_line(tokens: &[&str]) -> Option<usize> {
    if tokens.len() < 3 {
        return None;
    }
    let nums: Option<Vec<u64>> = tokens[..3].iter().map(|t| t.parse().ok()).collect();
    match nums {
        Some(v) if v[0] == v[1] => Some(v[0] as usize),
        _ => None,
    }
}

pub fn parse_edge_list(text: &str, path: &Path) -> Result<SymMatrix> {
    let mut header_n = None;
    let mut seen_data = false;
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !seen_data {
            seen_data = true;
            if let Some(n) = is_dimension_line(&tokens) {
                header_n = Some(n);
                continue;
            }
        }
        let bad = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(bad(format!("expected `u v [weight]`, found {} fields", tokens.len())));
        }
        let id = |t: &str| t.parse::<u64>().map_err(|e| bad(format!("bad vertex id {t:?}: {e}")));
        let (u, v) = (id(tokens[0])?, id(tokens[1])?);
        if let Some(w) = tokens.get(2) {
            w.parse::<f64>().map_err(|e| bad(format!("bad weight {w:?}: {e}")))?;
        }
        edges.push((u, v));
    }

    let ids: BTreeSet<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let keep_ids = header_n.filter(|&n| ids.iter().all(|&id| id >= 1 && id as usize <= n));
    let (n, index): (usize, Box<dyn Fn(u64) -> usize>) = match keep_ids {
        Some(n) => (n, Box::new(|id| id as usize - 1)),
        None => {
            let sorted: Vec<u64> = ids.iter().copied().collect();
            let n = sorted.len();
            (n, Box::new(move |id| sorted.binary_search(&id).expect("id was collected")))
        }
    };
    let mut adj = SymMatrix::zeros(n);
    for (u, v) in edges {
        if u != v {
            adj.set(index(u), index(v), 1.0);
        }
    }
    Ok(adj)
}

pub fn load_edge_list(path: &Path) -> Result<SymMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, path)
}

/// Edge list with an `n n m` header and 1-indexed `i j` lines for `i < j`.
pub fn edge_list_text(adj: &SymMatrix) -> String {
    let n = adj.n();
    let mut out = String::new();
    let _ = writeln!(out, "% undirected edge list");
    let _ = writeln!(out, "{n} {n} {}", adj.edge_count());
    for i in 0..n {
        for j in (i + 1)..n {
            if adj.get(i, j) != 0.0 {
                let _ = writeln!(out, "{} {}", i + 1, j + 1);
            }
        }
    }
    out
}

pub fn write_edge_list(adj: &SymMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, edge_list_text(adj))?;
    Ok(())
}
