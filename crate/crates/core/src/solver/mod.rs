//! Sparse time stepping: each step computes the unshrunk update `v̂` with one
//! of the schemes in [`steppers`] and then soft-thresholds it.

pub mod initial;
pub mod steppers;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::coefficient::{coefficient_field_of, sample_coefficient, CoefficientSpec};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::shrink::{soft_threshold_protecting, sparsity_fraction, LambdaSchedule};
use crate::sparse::SparseSpectrum;

pub use initial::{initial_condition, InitialSpec};
pub use steppers::{step_burgers, step_convection, step_parabolic, step_vorticity, vorticity_advection};

/// Coefficient-spectrum entries smaller than this fraction of the largest one
/// are pruned before use. Sparse and dense solvers share the pruned operator.
pub const COEFFICIENT_CUTOFF: f64 = 1e-14;

/// Stability-guard constants: transport `dt <= C dx / max|a|`, explicit
/// diffusion `dt <= C dx² / max a`.
pub const TRANSPORT_CFL: f64 = 1.0;
pub const DIFFUSION_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `u_t = a(x) u_x`, spectral leap frog.
    Convection,
    /// `u_t = (a(x) u_x)_x`, forward Euler.
    Parabolic,
    /// `u_t + (½u²)_x = (a(x) u_x)_x`, TVD-RK2.
    Burgers,
    /// 2-D vorticity with Crank–Nicolson diffusion and lagged advection.
    Vorticity2D,
}

impl Equation {
    pub fn is_leap_frog(&self) -> bool {
        matches!(self, Equation::Convection)
    }

    /// Whether the explicit time step is limited by diffusion (`dt ∝ dx²`)
    /// rather than transport (`dt ∝ dx`).
    pub fn diffusion_limited(&self) -> bool {
        matches!(self, Equation::Parabolic | Equation::Burgers)
    }

    pub fn dims(&self) -> usize {
        match self {
            Equation::Vorticity2D => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Convection => "convection",
            Equation::Parabolic => "parabolic",
            Equation::Burgers => "burgers",
            Equation::Vorticity2D => "vorticity",
        })
    }
}

impl FromStr for Equation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "convection" => Ok(Equation::Convection),
            "parabolic" => Ok(Equation::Parabolic),
            "burgers" => Ok(Equation::Burgers),
            "vorticity" => Ok(Equation::Vorticity2D),
            other => Err(format!(
                "unknown equation `{other}` (expected convection, parabolic, burgers or vorticity)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationParams {
    pub equation: Equation,
    /// `a(x)`; unused by the vorticity equation.
    pub coeff: CoefficientSpec,
    /// Viscosity of the vorticity equation.
    pub gamma: f64,
    /// Source term of the vorticity equation.
    pub forcing: CoefficientSpec,
}

impl EquationParams {
    pub fn new(equation: Equation, coeff: CoefficientSpec) -> Self {
        EquationParams {
            equation,
            coeff,
            gamma: 0.0,
            forcing: CoefficientSpec::Constant(0.0),
        }
    }

    pub fn vorticity(gamma: f64, forcing: CoefficientSpec) -> Self {
        EquationParams {
            equation: Equation::Vorticity2D,
            coeff: CoefficientSpec::Constant(0.0),
            gamma,
            forcing,
        }
    }
}

/// Equation data resolved on a grid: the pruned spectra of `a` and `f`.
#[derive(Debug, Clone)]
pub struct Operators {
    grid: GridSpec,
    params: EquationParams,
    a_hat: SparseSpectrum,
    f_hat: SparseSpectrum,
    max_abs_coeff: f64,
}

fn pruned(spec: &crate::spectral::DenseSpectrum) -> SparseSpectrum {
    let s = SparseSpectrum::from_dense(spec).restrict_to_box();
    let cut = COEFFICIENT_CUTOFF * s.max_abs();
    s.filter(|i| spec.coeffs()[i].norm() > cut)
}

impl Operators {
    pub fn assemble(params: &EquationParams, grid: &GridSpec) -> Result<Self> {
        let eq = params.equation;
        if eq == Equation::Vorticity2D {
            if grid.dims() != 2 {
                return Err(Error::NotTwoDimensional);
            }
            if !(params.gamma > 0.0 && params.gamma.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "gamma must be positive, got {}",
                    params.gamma
                )));
            }
            let f_hat = pruned(&coefficient_field_of(&params.forcing, grid)?);
            return Ok(Operators {
                grid: *grid,
                params: *params,
                a_hat: SparseSpectrum::empty(*grid),
                f_hat,
                max_abs_coeff: 0.0,
            });
        }
        if grid.dims() != 1 {
            return Err(Error::InvalidParams(format!("{eq} is solved on 1-D grids only")));
        }
        let samples = sample_coefficient(&params.coeff, grid)?;
        let min = samples.values().iter().copied().fold(f64::INFINITY, f64::min);
        let max_abs = samples.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if eq.diffusion_limited() && !(min > 0.0) {
            return Err(Error::InvalidParams(format!(
                "diffusion coefficient must be positive, minimum is {min}"
            )));
        }
        let a_hat = pruned(&coefficient_field_of(&params.coeff, grid)?);
        Ok(Operators {
            grid: *grid,
            params: *params,
            a_hat,
            f_hat: SparseSpectrum::empty(*grid),
            max_abs_coeff: max_abs,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &EquationParams {
        &self.params
    }

    pub fn equation(&self) -> Equation {
        self.params.equation
    }

    pub fn a_hat(&self) -> &SparseSpectrum {
        &self.a_hat
    }

    pub fn f_hat(&self) -> &SparseSpectrum {
        &self.f_hat
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.max_abs_coeff
    }

    /// Largest time step passing the stability guard, if one applies.
    pub fn stability_limit(&self) -> Option<f64> {
        let dx = self.grid.dx();
        if self.max_abs_coeff == 0.0 {
            return None;
        }
        match self.params.equation {
            Equation::Convection => Some(TRANSPORT_CFL * dx / self.max_abs_coeff),
            Equation::Parabolic | Equation::Burgers => {
                Some(DIFFUSION_CFL * dx * dx / self.max_abs_coeff)
            }
            Equation::Vorticity2D => None,
        }
    }

    pub fn check_stability(&self, dt: f64, strict: bool) -> Result<()> {
        if let Some(limit) = self.stability_limit() {
            if dt > limit {
                if strict {
                    return Err(Error::CflViolation { dt, limit });
                }
                log::warn!("dt = {dt:e} exceeds the {} stability guard {limit:e}", self.equation());
            }
        }
        Ok(())
    }

    /// Unshrunk update `v̂` for the current state.
    pub fn update(&self, state: &SolverState) -> Result<SparseSpectrum> {
        let dt = state.dt;
        match self.params.equation {
            Equation::Convection => step_convection(state, &self.a_hat, dt),
            Equation::Parabolic => step_parabolic(state, &self.a_hat, dt),
            Equation::Burgers => step_burgers(state, &self.a_hat, dt),
            Equation::Vorticity2D => step_vorticity(state, &self.f_hat, self.params.gamma, dt),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub current: SparseSpectrum,
    /// Previous level, kept only by the leap-frog scheme.
    pub previous: Option<SparseSpectrum>,
    pub step_index: usize,
    pub dt: f64,
}

impl SolverState {
    pub fn new(initial: SparseSpectrum, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NonpositiveDt(dt));
        }
        Ok(SolverState {
            current: initial,
            previous: None,
            step_index: 0,
            dt,
        })
    }

    /// `step_index · dt`, recomputed rather than accumulated.
    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOptions {
    /// Exempt the k = 0 coefficient from shrinkage.
    pub protect_mean: bool,
    /// Turn stability-guard warnings into [`Error::CflViolation`].
    pub strict_cfl: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub n_s: usize,
    pub sparsity_fraction: f64,
    pub mean: Complex64,
}

impl StepRecord {
    pub fn of(state: &SolverState) -> Self {
        StepRecord {
            step: state.step_index,
            time: state.time(),
            n_s: state.current.n_s(),
            sparsity_fraction: sparsity_fraction(&state.current),
            mean: state.current.mean(),
        }
    }
}

/// One update-then-shrink step.
pub fn step_once(
    state: &mut SolverState,
    ops: &Operators,
    lambda: f64,
    protect_mean: bool,
) -> Result<()> {
    let v = ops.update(state).map_err(|e| e.at_step(state.step_index + 1))?;
    let next = soft_threshold_protecting(&v, lambda, protect_mean)?;
    let old = std::mem::replace(&mut state.current, next);
    state.previous = ops.equation().is_leap_frog().then_some(old);
    state.step_index += 1;
    Ok(())
}

/// Advances `n_steps`, calling `observe` after every step.
pub fn advance_with(
    mut state: SolverState,
    ops: &Operators,
    schedule: &LambdaSchedule,
    n_steps: usize,
    options: &StepOptions,
    mut observe: impl FnMut(&SolverState) -> Result<()>,
) -> Result<SolverState> {
    if state.current.grid() != ops.grid() {
        return Err(Error::GridMismatch);
    }
    if n_steps == 0 {
        return Ok(state);
    }
    ops.check_stability(state.dt, options.strict_cfl)?;
    let lambda = schedule.lambda_at(state.dt)?;
    for _ in 0..n_steps {
        step_once(&mut state, ops, lambda, options.protect_mean)?;
        observe(&state)?;
    }
    Ok(state)
}

/// Advances `n_steps` and returns the final state with one record per step.
pub fn advance(
    state: SolverState,
    ops: &Operators,
    schedule: &LambdaSchedule,
    n_steps: usize,
    options: &StepOptions,
) -> Result<(SolverState, Vec<StepRecord>)> {
    let mut trace = Vec::with_capacity(n_steps);
    let state = advance_with(state, ops, schedule, n_steps, options, |s| {
        trace.push(StepRecord::of(s));
        Ok(())
    })?;
    Ok((state, trace))
}
