//! Quantile neighbourhoods and symmetrized neighbourhood smoothing.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::par;

/// For each vertex `i`, the sorted list of vertices `i' != i` whose distance
/// to `i` is at most the row's quantile threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourhoodSet {
    lists: Vec<Vec<usize>>,
}

impl NeighbourhoodSet {
    /// Checks that no vertex is its own neighbour and every list is nonempty.
    pub fn new(mut lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        for (i, l) in lists.iter_mut().enumerate() {
            l.sort_unstable();
            l.dedup();
            if l.is_empty() && n >= 2 {
                return Err(Error::InvalidArgument(format!("empty neighbourhood for vertex {i}")));
            }
            if l.binary_search(&i).is_ok() {
                return Err(Error::InvalidArgument(format!("vertex {i} in its own neighbourhood")));
            }
            if let Some(&v) = l.last().filter(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
        Ok(NeighbourhoodSet { lists })
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn of(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }
}

/// Rank (1-based) of the lower empirical `h`-quantile among `m` values:
/// `⌈h·m⌉`, at least 1. A relative slack of 1e-9 absorbs products such as
/// `0.3 * 10 = 3.0000000000000004`.
pub fn quantile_rank(h: f64, m: usize) -> usize {
    let x = h * m as f64;
    let k = (x - 1e-9 * x.max(1.0)).ceil();
    (k.max(1.0) as usize).min(m.max(1))
}

/// `N_i = { i' ≠ i : D[i][i'] ≤ q_i(h) }` with `q_i(h)` the lower empirical
/// `h`-quantile of row `i`'s off-diagonal entries. Ties at the threshold are
/// included.
pub fn neighbourhoods(dist: &SymMatrix, h: f64) -> Result<NeighbourhoodSet> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("quantile level {h} outside (0, 1]")));
    }
    let rank = quantile_rank(h, n - 1);
    let lists = par::map_range(n, |i| {
        let row = dist.row(i);
        let mut others: Vec<f64> = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let (_, &mut q, _) = others.select_nth_unstable_by(rank - 1, f64::total_cmp);
        (0..n).filter(|&j| j != i && row[j] <= q).collect()
    });
    NeighbourhoodSet::new(lists)
}

/// `c · sqrt(ln n / n)`, clamped to `(0, 1]`.
pub fn default_bandwidth(n: usize, c: f64) -> f64 {
    let n = n.max(2) as f64;
    let h = c * (n.ln() / n).sqrt();
    if h.is_nan() || h <= 0.0 {
        f64::MIN_POSITIVE
    } else {
        h.min(1.0)
    }
}

/// Symmetrized smoothing of a row-major `n × n` value grid `values`:
///
/// ```text
/// P[i][j] = ½ ( Σ_{i'∈N_i} values[i'][j] / |N_i| + Σ_{i'∈N_j} values[i'][i] / |N_j| )
/// ```
///
/// Each sum runs over the neighbourhood in ascending vertex order, which makes
/// the output independent of how rows are scheduled and monotone in `values`.
pub fn smooth(values: &[f64], nbhd: &NeighbourhoodSet) -> SymMatrix {
    let n = nbhd.n();
    assert_eq!(values.len(), n * n, "smoothing grid must be n × n");
    let mut half = vec![0.0f64; n * n];
    par::for_each_row(&mut half, n, |i, acc| {
        let members = nbhd.of(i);
        for &ip in members {
            let src = &values[ip * n..(ip + 1) * n];
            for (a, &v) in acc.iter_mut().zip(src) {
                *a += v;
            }
        }
        let size = members.len() as f64;
        for a in acc.iter_mut() {
            *a /= size;
        }
    });
    let mut out = vec![0.0f64; n * n];
    par::for_each_row(&mut out, n, |i, row| {
        for (j, o) in row.iter_mut().enumerate() {
            *o = 0.5 * (half[i * n + j] + half[j * n + i]);
        }
    });
    SymMatrix::from_row_major_unchecked(n, out)
}

/// Neighbourhood smoothing of an adjacency matrix with neighbourhoods drawn
/// from `dist` at quantile level `h`. The diagonal uses the same formula.
pub fn nbs_estimate(adj: &SymMatrix, dist: &SymMatrix, h: f64) -> Result<SymMatrix> {
    Ok(nbs_with_neighbourhoods(adj, dist, h)?.0)
}

/// [`nbs_estimate`] that also returns the neighbourhoods it used.
pub fn nbs_with_neighbourhoods(
    adj: &SymMatrix,
    dist: &SymMatrix,
    h: f64,
) -> Result<(SymMatrix, NeighbourhoodSet)> {
    if adj.n() != dist.n() {
        return Err(Error::DimensionMismatch {
            expected: adj.n(),
            found: dist.n(),
        });
    }
    if adj.n() < 3 {
        return Err(Error::TooSmall { n: adj.n(), min: 3 });
    }
    let nbhd = neighbourhoods(dist, h)?;
    Ok((smooth(adj.as_slice(), &nbhd), nbhd))
}
