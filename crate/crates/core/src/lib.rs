//! Sparse dynamics for periodic PDEs.
//!
//! Solutions are advanced in a Fourier basis and projected back onto a sparse
//! set of coefficients after every step by soft thresholding
//! (`û ← max(|v̂| - λ, 0) v̂/|v̂|`). The crate provides the spectral toolkit,
//! the shrinkage machinery with sparse Galerkin convolution, sparse solvers
//! for four model problems, a dense reference solver with a low-frequency
//! baseline, and a small experiment harness.

// NaN inputs must fail the positivity checks, hence `!(x > 0.0)` forms.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficient;
pub mod convolve;
pub mod error;
pub mod eval;
pub mod grid;
pub mod harness;
pub mod shrink;
pub mod solver;
pub mod sparse;
pub mod spectral;

pub use coefficient::{coefficient_field_of, CoefficientSpec};
pub use convolve::sparse_convolve;
pub use error::{Error, Result};
pub use grid::{GridSpec, Wavevector};
pub use shrink::{soft_threshold, sparsity_fraction, LambdaSchedule};
pub use sparse::SparseSpectrum;
pub use spectral::{dft_forward, dft_inverse, spectral_derivative, DenseSpectrum, SpatialField};
