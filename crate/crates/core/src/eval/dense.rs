//! Fully resolved reference solver.
//!
//! Same update formulas as the sparse steppers, on dense coefficient arrays.
//! Products are evaluated by transforming to a zero-padded grid of
//! `3n/2` points per dimension, multiplying pointwise and transforming back,
//! which reproduces the Galerkin-truncated convolution exactly (no aliasing
//! into the resolved box).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::solver::{Equation, Operators};
use crate::spectral::{spectral_derivative, DenseSpectrum, FourierTransform};

type Buf = Vec<Complex64>;

/// Padded-grid products of dense spectra.
#[derive(Debug, Clone)]
pub struct DenseConvolver {
    grid: GridSpec,
    plan: FourierTransform,
    /// (grid index, padded index) for every coefficient in the resolved box.
    map: Vec<(usize, usize)>,
}

impl DenseConvolver {
    pub fn new(grid: &GridSpec) -> Self {
        let n = grid.n_per_dim();
        let m = 3 * n / 2;
        let padded = |k: i64| if k < 0 { (k + m as i64) as usize } else { k as usize };
        let map = (0..grid.total())
            .filter_map(|i| {
                let k = grid.wavevector(i);
                if !grid.in_box(k) {
                    return None;
                }
                let j = match grid.dims() {
                    1 => padded(k[0]),
                    _ => padded(k[0]) * m + padded(k[1]),
                };
                Some((i, j))
            })
            .collect();
        DenseConvolver {
            grid: *grid,
            plan: FourierTransform::new(grid.dims(), m),
            map,
        }
    }

    /// Samples of the spectrum on the padded grid.
    pub fn to_physical(&self, coeffs: &[Complex64]) -> Buf {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.plan.len()];
        for &(i, j) in &self.map {
            buf[j] = coeffs[i];
        }
        self.plan.inverse(&mut buf);
        buf
    }

    /// Box-truncated spectrum of padded-grid samples.
    pub fn to_spectrum(&self, mut buf: Buf) -> DenseSpectrum {
        self.plan.forward(&mut buf);
        let scale = 1.0 / self.plan.len() as f64;
        let mut out = DenseSpectrum::zeros(self.grid);
        let c = out.coeffs_mut();
        for &(i, j) in &self.map {
            c[i] = buf[j] * scale;
        }
        out
    }

    pub fn convolve(&self, a: &DenseSpectrum, b: &DenseSpectrum) -> Result<DenseSpectrum> {
        if a.grid() != &self.grid || b.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let pa = self.to_physical(a.coeffs());
        let mut pb = self.to_physical(b.coeffs());
        for (x, y) in pb.iter_mut().zip(&pa) {
            *x *= y;
        }
        Ok(self.to_spectrum(pb))
    }
}

/// Dense counterpart of [`Operators`], sharing its pruned coefficient spectra.
#[derive(Debug, Clone)]
pub struct DenseOperators {
    grid: GridSpec,
    equation: Equation,
    gamma: f64,
    a_phys: Buf,
    f_hat: DenseSpectrum,
    conv: DenseConvolver,
}

fn axpy(y: &mut DenseSpectrum, alpha: f64, x: &DenseSpectrum) {
    for (a, b) in y.coeffs_mut().iter_mut().zip(x.coeffs()) {
        *a += b * alpha;
    }
}

fn lincomb(alpha: f64, x: &DenseSpectrum, beta: f64, y: &DenseSpectrum) -> DenseSpectrum {
    let coeffs = x
        .coeffs()
        .iter()
        .zip(y.coeffs())
        .map(|(a, b)| a * alpha + b * beta)
        .collect();
    DenseSpectrum::new(*x.grid(), coeffs).expect("same grid")
}

impl DenseOperators {
    pub fn new(ops: &Operators) -> Self {
        let grid = *ops.grid();
        let conv = DenseConvolver::new(&grid);
        let a_phys = conv.to_physical(ops.a_hat().to_dense().coeffs());
        DenseOperators {
            grid,
            equation: ops.equation(),
            gamma: ops.gamma(),
            a_phys,
            f_hat: ops.f_hat().to_dense(),
            conv,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    fn transport(&self, u: &DenseSpectrum) -> Result<DenseSpectrum> {
        let mut p = self.conv.to_physical(spectral_derivative(u, 0)?.coeffs());
        for (x, a) in p.iter_mut().zip(&self.a_phys) {
            *x *= a;
        }
        Ok(self.conv.to_spectrum(p))
    }

    fn diffusion(&self, u: &DenseSpectrum) -> Result<DenseSpectrum> {
        spectral_derivative(&self.transport(u)?, 0)
    }

    fn burgers_rhs(&self, u: &DenseSpectrum) -> Result<DenseSpectrum> {
        let mut p = self.conv.to_physical(u.coeffs());
        for x in p.iter_mut() {
            *x = *x * *x * 0.5;
        }
        let flux = self.conv.to_spectrum(p);
        Ok(lincomb(1.0, &self.diffusion(u)?, -1.0, &spectral_derivative(&flux, 0)?))
    }

    /// `-(v·∇u)^` with `v = ∇⊥Δ⁻¹u`, as in the sparse stepper.
    pub fn vorticity_advection(&self, u: &DenseSpectrum) -> Result<DenseSpectrum> {
        let g = self.grid;
        let s = g.k_scale();
        let stream = |axis: usize, sign: f64| {
            let coeffs: Buf = u
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, &z)| {
                    let k2 = g.k_squared(i);
                    if k2 == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        z * Complex64::new(0.0, sign * g.wavevector(i)[axis] as f64 * s / k2)
                    }
                })
                .collect();
            self.conv.to_physical(&coeffs)
        };
        let w1 = stream(1, -1.0);
        let w2 = stream(0, 1.0);
        let g1 = self.conv.to_physical(spectral_derivative(u, 0)?.coeffs());
        let g2 = self.conv.to_physical(spectral_derivative(u, 1)?.coeffs());
        let prod = (0..w1.len()).map(|i| w1[i] * g1[i] + w2[i] * g2[i]).collect();
        Ok(self.conv.to_spectrum(prod))
    }

    /// Unshrunk update from `current` (and `previous` for leap frog).
    pub fn update(
        &self,
        current: &DenseSpectrum,
        previous: Option<&DenseSpectrum>,
        dt: f64,
    ) -> Result<DenseSpectrum> {
        match self.equation {
            Equation::Convection => {
                let rhs = self.transport(current)?;
                Ok(match previous {
                    Some(p) => lincomb(1.0, p, 2.0 * dt, &rhs),
                    None => lincomb(1.0, current, dt, &rhs),
                })
            }
            Equation::Parabolic => Ok(lincomb(1.0, current, dt, &self.diffusion(current)?)),
            Equation::Burgers => {
                let u1 = lincomb(1.0, current, dt, &self.burgers_rhs(current)?);
                let l1 = self.burgers_rhs(&u1)?;
                let mut v = lincomb(0.5, current, 0.5, &u1);
                axpy(&mut v, 0.5 * dt, &l1);
                Ok(v)
            }
            Equation::Vorticity2D => {
                let g = self.grid;
                let mut v = self.vorticity_advection(current)?;
                axpy(&mut v, 1.0, &self.f_hat);
                let gamma = self.gamma;
                for (i, (z, u)) in v.coeffs_mut().iter_mut().zip(current.coeffs()).enumerate() {
                    let d = gamma * dt * g.k_squared(i);
                    *z = *z * (2.0 * dt / (2.0 + d)) + u * ((2.0 - d) / (2.0 + d));
                }
                Ok(v)
            }
        }
    }
}

/// Zeroes every coefficient with some `|k_d| > cutoff`.
pub fn low_pass(spec: &mut DenseSpectrum, cutoff: i64) {
    let g = *spec.grid();
    for (i, z) in spec.coeffs_mut().iter_mut().enumerate() {
        let k = g.wavevector(i);
        if k[..g.dims()].iter().any(|c| c.abs() > cutoff) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}

/// Streaming dense time stepper, optionally projected onto `|k_d| <= K`
/// after every step.
#[derive(Debug, Clone)]
pub struct DenseSolver {
    ops: DenseOperators,
    current: DenseSpectrum,
    previous: Option<DenseSpectrum>,
    step_index: usize,
    dt: f64,
    cutoff: Option<i64>,
}

impl DenseSolver {
    pub fn new(ops: DenseOperators, initial: DenseSpectrum, dt: f64) -> Result<Self> {
        Self::build(ops, initial, dt, None)
    }

    pub fn low_frequency(ops: DenseOperators, initial: DenseSpectrum, dt: f64, cutoff: i64) -> Result<Self> {
        if cutoff < 0 {
            return Err(Error::InvalidParams(format!("cutoff must be >= 0, got {cutoff}")));
        }
        Self::build(ops, initial, dt, Some(cutoff))
    }

    fn build(ops: DenseOperators, mut initial: DenseSpectrum, dt: f64, cutoff: Option<i64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::NonpositiveDt(dt));
        }
        if initial.grid() != ops.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(k) = cutoff {
            low_pass(&mut initial, k);
        }
        Ok(DenseSolver {
            ops,
            current: initial,
            previous: None,
            step_index: 0,
            dt,
            cutoff,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let mut next = self
            .ops
            .update(&self.current, self.previous.as_ref(), self.dt)
            .map_err(|e| e.at_step(self.step_index + 1))?;
        if let Some(k) = self.cutoff {
            low_pass(&mut next, k);
        }
        let old = std::mem::replace(&mut self.current, next);
        self.previous = self.ops.equation().is_leap_frog().then_some(old);
        self.step_index += 1;
        Ok(())
    }

    pub fn current(&self) -> &DenseSpectrum {
        &self.current
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }
}

/// Trajectory of the dense reference, including the initial state.
pub fn dense_advance(
    initial: &DenseSpectrum,
    ops: &Operators,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<DenseSpectrum>> {
    collect(DenseSolver::new(DenseOperators::new(ops), initial.clone(), dt)?, n_steps)
}

/// Trajectory of the low-frequency baseline: dense updates projected onto
/// `|k_d| <= cutoff` (the initial state included).
pub fn low_frequency_advance(
    initial: &DenseSpectrum,
    ops: &Operators,
    dt: f64,
    n_steps: usize,
    cutoff: i64,
) -> Result<Vec<DenseSpectrum>> {
    collect(
        DenseSolver::low_frequency(DenseOperators::new(ops), initial.clone(), dt, cutoff)?,
        n_steps,
    )
}

fn collect(mut solver: DenseSolver, n_steps: usize) -> Result<Vec<DenseSpectrum>> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(solver.current().clone());
    for _ in 0..n_steps {
        solver.step()?;
        out.push(solver.current().clone());
    }
    Ok(out)
}
