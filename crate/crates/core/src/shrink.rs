//! Soft thresholding (the proximal map of `λ‖·‖₁` on complex coefficients)
//! and the shrinkage-parameter schedule.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::SparseSpectrum;
use crate::spectral::DenseSpectrum;

/// Scalar shrink `max(|z| - λ, 0) z/|z|`; `None` when the result is zero.
#[inline]
pub fn shrink(z: Complex64, lambda: f64) -> Option<Complex64> {
    let r = z.norm();
    if r <= lambda || r == 0.0 {
        return None;
    }
    if lambda == 0.0 {
        return Some(z);
    }
    Some(z * ((r - lambda) / r))
}

/// Objective minimized by the shrink of `v`: `λ|z| + ½|z - v|²`.
pub fn prox_objective(z: Complex64, v: Complex64, lambda: f64) -> f64 {
    lambda * z.norm() + 0.5 * (z - v).norm_sqr()
}

pub fn soft_threshold(spec: &SparseSpectrum, lambda: f64) -> Result<SparseSpectrum> {
    soft_threshold_protecting(spec, lambda, false)
}

/// Soft threshold that optionally leaves the mean (k = 0) coefficient as is.
pub fn soft_threshold_protecting(
    spec: &SparseSpectrum,
    lambda: f64,
    protect_mean: bool,
) -> Result<SparseSpectrum> {
    check_lambda(lambda)?;
    let entries = spec
        .entries()
        .iter()
        .filter_map(|&(i, z)| {
            if protect_mean && i == 0 {
                Some((i, z))
            } else {
                shrink(z, lambda).map(|s| (i, s))
            }
        })
        .collect();
    Ok(SparseSpectrum::from_sorted_unchecked(*spec.grid(), entries))
}

pub fn soft_threshold_dense(spec: &DenseSpectrum, lambda: f64) -> Result<SparseSpectrum> {
    check_lambda(lambda)?;
    let entries = spec
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, &z)| shrink(z, lambda).map(|s| (i, s)))
        .filter(|(_, z)| z.norm() >= crate::sparse::UNDERFLOW)
        .collect();
    Ok(SparseSpectrum::from_sorted_unchecked(*spec.grid(), entries))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    Ok(())
}

/// Fraction of retained coefficients, `n_s / N_total`.
pub fn sparsity_fraction(spec: &SparseSpectrum) -> f64 {
    spec.n_s() as f64 / spec.grid().total() as f64
}

/// How the shrinkage parameter depends on the time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    Fixed(f64),
    /// `λ = c · dt^p`. Exponents `p > 1` keep the scheme convergent as
    /// `dt → 0`.
    PowerLaw { c: f64, p: f64 },
}

impl LambdaSchedule {
    pub fn fixed(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "fixed lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(LambdaSchedule::Fixed(lambda))
    }

    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidSchedule(format!("C must be >= 0, got {c}")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidSchedule(format!("p must be > 0, got {p}")));
        }
        Ok(LambdaSchedule::PowerLaw { c, p })
    }

    /// True when the schedule vanishes faster than `dt` (`p = 1 + α`, `α > 0`).
    pub fn is_convergent(&self) -> bool {
        match *self {
            LambdaSchedule::Fixed(l) => l == 0.0,
            LambdaSchedule::PowerLaw { c, p } => c == 0.0 || p > 1.0,
        }
    }

    pub fn lambda_at(&self, dt: f64) -> Result<f64> {
        if !(dt > 0.0) {
            return Err(Error::NonpositiveDt(dt));
        }
        Ok(match *self {
            LambdaSchedule::Fixed(l) => l,
            LambdaSchedule::PowerLaw { c, p } => c * dt.powf(p),
        })
    }

    /// Same schedule with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> LambdaSchedule {
        match *self {
            LambdaSchedule::Fixed(l) => LambdaSchedule::Fixed(l * factor),
            LambdaSchedule::PowerLaw { c, p } => LambdaSchedule::PowerLaw { c: c * factor, p },
        }
    }
}

impl fmt::Display for LambdaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSchedule::Fixed(l) => write!(f, "fixed({l:e})"),
            LambdaSchedule::PowerLaw { c, p } => write!(f, "{c:e}*dt^{p}"),
        }
    }
}
