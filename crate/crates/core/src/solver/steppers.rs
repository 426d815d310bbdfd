//! Unshrunk update operators. Every convolution is a sparse, Galerkin-truncated
//! product of coefficient lists; no transform to physical space is involved.

use num_complex::Complex64;

use crate::convolve::sparse_convolve;
use crate::error::{Error, Result};
use crate::sparse::SparseSpectrum;

use super::SolverState;

/// `â ∗ (ik û)`: the transport term `a(x) u_x`.
fn transport(a_hat: &SparseSpectrum, u: &SparseSpectrum) -> Result<SparseSpectrum> {
    sparse_convolve(a_hat, &u.derivative(0)?)
}

/// `ik (â ∗ (ik û))`: the diffusion term `(a u_x)_x`.
fn diffusion(a_hat: &SparseSpectrum, u: &SparseSpectrum) -> Result<SparseSpectrum> {
    transport(a_hat, u)?.derivative(0)
}

/// Leap frog `v̂ = û^{n-1} + 2 dt â ∗ (ik û^n)`. Without history (first step)
/// a forward-Euler step of the same right-hand side is taken.
pub fn step_convection(state: &SolverState, a_hat: &SparseSpectrum, dt: f64) -> Result<SparseSpectrum> {
    let rhs = transport(a_hat, &state.current)?;
    match &state.previous {
        Some(prev) => prev.combine(1.0, &rhs, 2.0 * dt),
        None => state.current.combine(1.0, &rhs, dt),
    }
}

/// Forward Euler `v̂ = û^n + dt ik (â ∗ (ik û^n))`.
pub fn step_parabolic(state: &SolverState, a_hat: &SparseSpectrum, dt: f64) -> Result<SparseSpectrum> {
    let rhs = diffusion(a_hat, &state.current)?;
    state.current.combine(1.0, &rhs, dt)
}

/// Right-hand side of viscous Burgers: `ik (â ∗ (ik û)) - ik (½ û ∗ û)`.
fn burgers_rhs(a_hat: &SparseSpectrum, u: &SparseSpectrum) -> Result<SparseSpectrum> {
    let flux = sparse_convolve(u, u)?.scale(0.5);
    diffusion(a_hat, u)?.combine(1.0, &flux.derivative(0)?, -1.0)
}

/// Two-stage TVD Runge–Kutta:
///
/// ```text
/// û₁ = ûⁿ + dt L(ûⁿ)
/// v̂  = ½(ûⁿ + û₁) + ½ dt L(û₁)
/// ```
pub fn step_burgers(state: &SolverState, a_hat: &SparseSpectrum, dt: f64) -> Result<SparseSpectrum> {
    let u = &state.current;
    let u1 = u.combine(1.0, &burgers_rhs(a_hat, u)?, dt)?;
    let l1 = burgers_rhs(a_hat, &u1)?;
    u.combine(0.5, &u1, 0.5)?.combine(1.0, &l1, 0.5 * dt)
}

/// Advection term of the vorticity equation, `-(v · ∇u)^`, with velocity
/// `v = ∇⊥Δ⁻¹u`. Written as `Σ_d w_d ∗ (i k_d û)` with
/// `w = i k⊥ |k|⁻² û`, `k⊥ = (-k₂, k₁)` and `|k|⁻² := 0` at `k = 0`.
pub fn vorticity_advection(u: &SparseSpectrum) -> Result<SparseSpectrum> {
    let g = *u.grid();
    if g.dims() != 2 {
        return Err(Error::NotTwoDimensional);
    }
    let s = g.k_scale();
    let stream = |axis: usize, sign: f64| {
        u.map_diagonal(|i, z| {
            let k2 = g.k_squared(i);
            if k2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let k = g.wavevector(i)[axis] as f64 * s;
            z * Complex64::new(0.0, sign * k / k2)
        })
    };
    // w₁ = -i k₂ |k|⁻² û,  w₂ = i k₁ |k|⁻² û
    let w1 = stream(1, -1.0);
    let w2 = stream(0, 1.0);
    let t1 = sparse_convolve(&w1, &u.derivative(0)?)?;
    let t2 = sparse_convolve(&w2, &u.derivative(1)?)?;
    t1.add(&t2)
}

/// Crank–Nicolson diffusion with lagged advection:
///
/// ```text
/// v̂ = 2dt/(2 + γ dt |k|²) (N̂(ûⁿ) + f̂) + (2 - γ dt |k|²)/(2 + γ dt |k|²) ûⁿ
/// ```
pub fn step_vorticity(
    state: &SolverState,
    f_hat: &SparseSpectrum,
    gamma: f64,
    dt: f64,
) -> Result<SparseSpectrum> {
    let u = &state.current;
    let g = *u.grid();
    if g.dims() != 2 {
        return Err(Error::NotTwoDimensional);
    }
    let explicit = vorticity_advection(u)?.add(f_hat)?;
    let forced = explicit.map_diagonal(|i, z| z * (2.0 * dt / (2.0 + gamma * dt * g.k_squared(i))));
    let decayed = u.map_diagonal(|i, z| {
        let d = gamma * dt * g.k_squared(i);
        z * ((2.0 - d) / (2.0 + d))
    });
    forced.add(&decayed)
}
