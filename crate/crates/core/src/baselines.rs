//! Reference estimators: neighbourhood smoothing applied directly to the
//! zero-filled observed matrix, and universal singular value thresholding.

use nalgebra::DMatrix;

use crate::distance::dist_matrix;
use crate::error::{Error, Result};
use crate::matrix::{ObservedSet, SymMatrix};
use crate::smoothing::{default_bandwidth, nbs_estimate};

/// Default slack in the USVT threshold `(2 + eta)·sqrt(n·p̂)`.
pub const DEFAULT_USVT_ETA: f64 = 0.01;

/// Smoothing of `adj_obs` as if it were the full graph, with `h = sqrt(ln n / n)`.
pub fn nbs_vanilla(adj_obs: &SymMatrix) -> Result<SymMatrix> {
    nbs_vanilla_with(adj_obs, 1.0)
}

/// [`nbs_vanilla`] with bandwidth constant `c`.
pub fn nbs_vanilla_with(adj_obs: &SymMatrix, c: f64) -> Result<SymMatrix> {
    let n = adj_obs.n();
    nbs_estimate(adj_obs, &dist_matrix(adj_obs)?, default_bandwidth(n, c))
}

/// Universal singular value thresholding.
///
/// `p̂` is the edge density over observed off-diagonal pairs. Since the input is
/// symmetric its singular values are the absolute eigenvalues; every
/// eigenpair with `|λ| > (2 + eta)·sqrt(n·p̂)` is kept, the low-rank
/// reconstruction is clipped to `[0, 1]` and symmetrized. No rescaling by the
/// observed fraction is applied.
pub fn usvt(adj_obs: &SymMatrix, observed: &ObservedSet, eta: f64) -> Result<SymMatrix> {
    let n = adj_obs.n();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if observed.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: observed.n(),
        });
    }
    let mut edges = 0.0;
    for i in 0..n {
        let (row, seen) = (adj_obs.row(i), observed.row(i));
        for j in 0..n {
            if i != j && seen[j] {
                edges += row[j];
            }
        }
    }
    let pairs = observed.off_diagonal_count();
    let density = if pairs == 0 { 0.0 } else { edges / pairs as f64 };
    let threshold = (2.0 + eta) * (n as f64 * density).sqrt();

    let eig = DMatrix::from_row_slice(n, n, adj_obs.as_slice()).symmetric_eigen();
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k].abs() > threshold).collect();
    let mut recon = vec![0.0f64; n * n];
    for &k in &keep {
        let lambda = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        for i in 0..n {
            let scaled = lambda * v[i];
            let row = &mut recon[i * n..(i + 1) * n];
            for (j, r) in row.iter_mut().enumerate() {
                *r += scaled * v[j];
            }
        }
    }
    Ok(SymMatrix::from_upper_fn(n, |i, j| {
        (0.5 * (recon[i * n + j] + recon[j * n + i])).clamp(0.0, 1.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{make_chain_cover, observed_set, Cover};
    use crate::extension::{nbse, NbseParams};
    use crate::graphon::{build_prob_matrix, sample_adjacency, sample_latents, GraphonSpec};
    use crate::matrix::{frobenius_error, mask_observed};

    #[test]
    fn vanilla_matches_trivial_cover_extension() {
        let xi = sample_latents(80, 3).unwrap();
        let a = sample_adjacency(&build_prob_matrix(&GraphonSpec::D, &xi), 4);
        let ext = nbse(&a, &Cover::full(80), &NbseParams::default()).unwrap();
        assert_eq!(nbs_vanilla(&a).unwrap(), ext.estimate);
    }

    #[test]
    fn zero_inputs_give_zero_estimates() {
        let z = SymMatrix::zeros(12);
        assert!(nbs_vanilla(&z).unwrap().as_slice().iter().all(|&v| v == 0.0));
        let u = usvt(&z, &ObservedSet::full(12), DEFAULT_USVT_ETA).unwrap();
        assert!(u.as_slice().iter().all(|&v| v == 0.0));
        assert!(nbs_vanilla(&SymMatrix::zeros(2)).is_err());
    }

    #[test]
    fn usvt_recovers_constant_matrix() {
        let n = 500;
        let p = SymMatrix::filled(n, 0.5);
        let a = sample_adjacency(&p, 17);
        let est = usvt(&a, &ObservedSet::full(n), DEFAULT_USVT_ETA).unwrap();
        let err = frobenius_error(&est, &p).unwrap();
        assert!(err <= 0.05, "error {err}");
        est.validate_probability().unwrap();
    }

    #[test]
    fn usvt_recovers_two_block_model() {
        let n = 500;
        let xi = sample_latents(n, 5).unwrap();
        let p = build_prob_matrix(&GraphonSpec::F, &xi);
        let a = sample_adjacency(&p, 6);
        let est = usvt(&a, &ObservedSet::full(n), DEFAULT_USVT_ETA).unwrap();
        let err = frobenius_error(&est, &p).unwrap();
        assert!(err <= 0.1, "error {err}");
    }

    #[test]
    fn outputs_are_probability_matrices() {
        let n = 120;
        let xi = sample_latents(n, 8).unwrap();
        let a = sample_adjacency(&build_prob_matrix(&GraphonSpec::A, &xi), 9);
        let cover = make_chain_cover(n, 3, 6, 10).unwrap();
        let obs = observed_set(&cover);
        let a_obs = mask_observed(&a, &obs).unwrap();
        for est in [nbs_vanilla(&a_obs).unwrap(), usvt(&a_obs, &obs, DEFAULT_USVT_ETA).unwrap()] {
            est.validate_probability().unwrap();
        }
    }
}
