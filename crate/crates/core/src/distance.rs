//! Row-profile distance between vertices of an adjacency matrix.
//!
//! For vertices `i`, `i'` of an `n`-vertex graph
//!
//! ```text
//! d(i, i') = sqrt( max(0, max_{k ≠ i, i'} s(i, i', k)) / n ),   s = ⟨A_i − A_i', A_k⟩
//! ```
//!
//! taken over both orientations of the pair, i.e. the maximum of `|s|`. All
//! inner products are small integers, so the kernel works on bit-packed rows
//! and an integer Gram matrix and the result is exact.

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::matrix::{submatrix, SymMatrix};
use crate::par;

/// Smallest graph on which the distance is defined.
pub const MIN_VERTICES: usize = 3;

fn pack_rows(adj: &SymMatrix) -> Vec<Vec<u64>> {
    let n = adj.n();
    let words = n.div_ceil(64);
    par::map_range(n, |i| {
        let mut bits = vec![0u64; words];
        for (j, &v) in adj.row(i).iter().enumerate() {
            if v != 0.0 {
                bits[j / 64] |= 1 << (j % 64);
            }
        }
        bits
    })
}

/// Integer Gram matrix `G[i][k] = ⟨A_i, A_k⟩`, row-major.
fn gram(adj: &SymMatrix) -> Vec<i32> {
    let n = adj.n();
    let bits = pack_rows(adj);
    let mut g = vec![0i32; n * n];
    par::for_each_row(&mut g, n, |i, row| {
        let bi = &bits[i];
        for (k, out) in row.iter_mut().enumerate() {
            *out = bi
                .iter()
                .zip(&bits[k])
                .map(|(a, b)| (a & b).count_ones() as i32)
                .sum();
        }
    });
    g
}

#[inline]
fn max_abs_diff(a: &[i32], b: &[i32]) -> i32 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0)
}

/// Full distance matrix of an adjacency matrix with at least three vertices.
pub fn dist_matrix(adj: &SymMatrix) -> Result<SymMatrix> {
    let n = adj.n();
    if n < MIN_VERTICES {
        return Err(Error::TooSmall { n, min: MIN_VERTICES });
    }
    for v in adj.as_slice() {
        if *v != 0.0 && *v != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "distance needs a 0/1 adjacency matrix, found entry {v}"
            )));
        }
    }
    adj.check_symmetric(0.0)?;

    let g = gram(adj);
    let scale = n as f64;
    let mut data = vec![0.0f64; n * n];
    par::for_each_row(&mut data, n, |i, row| {
        let gi = &g[i * n..(i + 1) * n];
        for (j, out) in row.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            let gj = &g[j * n..(j + 1) * n];
            let (lo, hi) = (i.min(j), i.max(j));
            // Skip k = i and k = j.
            let m = max_abs_diff(&gi[..lo], &gj[..lo])
                .max(max_abs_diff(&gi[lo + 1..hi], &gj[lo + 1..hi]))
                .max(max_abs_diff(&gi[hi + 1..], &gj[hi + 1..]));
            *out = (m.max(0) as f64 / scale).sqrt();
        }
    });
    Ok(SymMatrix::from_row_major_unchecked(n, data))
}

/// One distance matrix per cover block, computed on the block's induced
/// subgraph with rows in sorted vertex order.
pub fn dist_for_blocks(adj_obs: &SymMatrix, cover: &Cover) -> Result<Vec<SymMatrix>> {
    if adj_obs.n() != cover.n() {
        return Err(Error::DimensionMismatch {
            expected: cover.n(),
            found: adj_obs.n(),
        });
    }
    for (t, b) in cover.blocks().iter().enumerate() {
        if b.len() < MIN_VERTICES {
            return Err(Error::BlockTooSmall {
                block: t,
                size: b.len(),
                min: MIN_VERTICES,
            });
        }
    }
    cover
        .blocks()
        .iter()
        .map(|b| dist_matrix(&submatrix(adj_obs, b)?))
        .collect()
}
