//! Dense symmetric matrices, observed-pair masks and the estimation error metric.
//!
//! A [`SymMatrix`] carries one of three payloads: adjacency (0/1 entries, zero
//! diagonal), probability (entries in `[0, 1]`) or distance (finite, non-negative,
//! zero diagonal). The payload is not encoded in the type; the `validate_*`
//! methods check it where it matters.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Tolerance used when loading matrices from text.
pub const LOAD_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn filled(n: usize, value: f64) -> Self {
        SymMatrix {
            n,
            data: vec![value; n * n],
        }
    }

    /// Builds a matrix by evaluating `f(i, j)` for `i <= j` and mirroring.
    pub fn from_upper_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Wraps a row-major buffer, checking exact symmetry.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let m = SymMatrix { n, data };
        m.check_symmetric(0.0)?;
        Ok(m)
    }

    /// Wraps a buffer the caller guarantees is symmetric.
    pub(crate) fn from_row_major_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        SymMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a - b).is_nan() || (a - b).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j, a, b });
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric(0.0).is_ok()
    }

    /// 0/1 entries and a zero diagonal.
    pub fn validate_adjacency(&self) -> Result<()> {
        self.check_symmetric(0.0)?;
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "adjacency diagonal at {i} is {}",
                    self.get(i, i)
                )));
            }
            for &v in self.row(i) {
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "adjacency entry {v} in row {i} is not 0 or 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn validate_probability(&self) -> Result<()> {
        self.check_symmetric(0.0)?;
        match self.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            Some(v) => Err(Error::InvalidArgument(format!(
                "probability entry {v} outside [0, 1]"
            ))),
            None => Ok(()),
        }
    }

    pub fn validate_distance(&self) -> Result<()> {
        self.check_symmetric(0.0)?;
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "distance diagonal at {i} is nonzero"
                )));
            }
        }
        match self.data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            Some(v) => Err(Error::InvalidArgument(format!(
                "distance entry {v} is negative or not finite"
            ))),
            None => Ok(()),
        }
    }

    /// Number of edges when the payload is an adjacency matrix.
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Parses `n` rows of `n` comma-separated decimals. Asymmetry up to
    /// [`LOAD_SYMMETRY_TOL`] is averaged away; larger asymmetry is rejected.
    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        msg: format!("bad value {:?}: {e}", field.trim()),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("expected {n} columns, found {}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        let mut m = SymMatrix { n, data };
        m.check_symmetric(LOAD_SYMMETRY_TOL)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set(i, j, avg);
            }
        }
        Ok(m)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, path)
    }

    /// Shortest round-trip decimal representation, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 8);
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Symmetric membership grid of observed vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedSet {
    n: usize,
    mask: Vec<bool>,
}

impl ObservedSet {
    pub fn empty(n: usize) -> Self {
        ObservedSet {
            n,
            mask: vec![false; n * n],
        }
    }

    pub fn full(n: usize) -> Self {
        ObservedSet {
            n,
            mask: vec![true; n * n],
        }
    }

    /// Marks `(i, j)` and `(j, i)`.
    pub fn insert(&mut self, i: usize, j: usize) {
        self.mask[i * self.n + j] = true;
        self.mask[j * self.n + i] = true;
    }

    /// Marks every pair in `block × block`.
    pub fn insert_block(&mut self, block: &[usize]) {
        for &i in block {
            for &j in block {
                self.mask[i * self.n + j] = true;
            }
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.mask[i * self.n..(i + 1) * self.n]
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    /// Number of observed ordered pairs `(i, j)` with `i != j`.
    pub fn off_diagonal_count(&self) -> usize {
        let diag = (0..self.n).filter(|&i| self.contains(i, i)).count();
        self.mask.iter().filter(|&&b| b).count() - diag
    }
}

/// Zero-fills every unobserved pair of an adjacency matrix.
pub fn mask_observed(adj: &SymMatrix, observed: &ObservedSet) -> Result<SymMatrix> {
    if adj.n() != observed.n() {
        return Err(Error::DimensionMismatch {
            expected: adj.n(),
            found: observed.n(),
        });
    }
    let data = adj
        .data
        .iter()
        .zip(&observed.mask)
        .map(|(&v, &seen)| if seen { v } else { 0.0 })
        .collect();
    Ok(SymMatrix::from_row_major_unchecked(adj.n(), data))
}

/// `n⁻¹ · ‖estimate − truth‖_F`, summing all `n²` entries including the diagonal.
pub fn frobenius_error(estimate: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    if estimate.n() != truth.n() {
        return Err(Error::DimensionMismatch {
            expected: truth.n(),
            found: estimate.n(),
        });
    }
    if estimate.n() == 0 {
        return Ok(0.0);
    }
    let sum: f64 = estimate
        .data
        .iter()
        .zip(&truth.data)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum.sqrt() / estimate.n() as f64)
}

/// Principal submatrix on `vertices` (0-indexed), rows in sorted vertex order.
pub fn submatrix(m: &SymMatrix, vertices: &[usize]) -> Result<SymMatrix> {
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.is_empty() {
        return Err(Error::InvalidArgument("empty vertex subset".into()));
    }
    if let Some(&v) = vs.iter().find(|&&v| v >= m.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: m.n() });
    }
    let k = vs.len();
    let mut data = Vec::with_capacity(k * k);
    for &i in &vs {
        let row = m.row(i);
        data.extend(vs.iter().map(|&j| row[j]));
    }
    Ok(SymMatrix::from_row_major_unchecked(k, data))
}
