//! Estimation of the edge-probability matrix of a graphon-generated network
//! when only overlapping induced subgraphs are observed.
//!
//! The pipeline: per-block vertex distances ([`distance`]) are stitched into a
//! full distance matrix along spanning-tree traversals of the block
//! super-graph ([`extension`]), neighbourhoods built from it drive
//! neighbourhood smoothing ([`smoothing`]), and unobserved entries are then
//! refilled with current estimates until the fixed point is reached.
//! [`graphon`] and [`cover`] generate synthetic experiments, [`baselines`]
//! holds the comparison estimators and [`harness`] runs whole studies.

pub mod baselines;
pub mod cover;
pub mod distance;
pub mod edgelist;
pub mod error;
pub mod extension;
pub mod graphon;
pub mod harness;
pub mod matrix;
pub mod par;
pub mod seed;
pub mod smoothing;

pub use error::{Error, Result};
pub use matrix::{frobenius_error, mask_observed, submatrix, ObservedSet, SymMatrix};
