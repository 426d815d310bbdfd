//! Dense Fourier representation: forward/inverse transforms, derivatives and
//! the spatial sample container.
//!
//! The forward transform carries the `1/N_total` factor, so a coefficient is
//! the amplitude of its mode and `û_0` is the spatial mean:
//!
//! ```text
//! û_k = (1/N) Σ_x u(x) e^{-i k·x},      u(x) = Σ_k û_k e^{i k·x}
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Imaginary residual above which an inverse transform refuses to return a
/// real field.
pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl SpatialField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.total() {
            return Err(Error::InvalidGrid(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.total()
            )));
        }
        Ok(SpatialField { grid, values })
    }

    /// Samples `f(x, y)` at every grid point (`y = 0` on 1-D grids).
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.total())
            .map(|i| {
                let [x, y] = grid.point(i);
                f(x, y)
            })
            .collect();
        SpatialField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl DenseSpectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        DenseSpectrum {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.total()],
        }
    }

    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.total() {
            return Err(Error::InvalidGrid(format!(
                "spectrum has {} coefficients, grid expects {}",
                coeffs.len(),
                grid.total()
            )));
        }
        Ok(DenseSpectrum { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at a wavevector, zero if it is not on the grid.
    pub fn at(&self, k: crate::grid::Wavevector) -> Complex64 {
        self.grid
            .flat_index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Largest `|û(-k) - conj(û(k))|` over the grid, relative to the largest
    /// coefficient. Nyquist entries pair with themselves.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let g = &self.grid;
        let n = g.n_per_dim() as i64;
        let mut worst: f64 = 0.0;
        for (i, z) in self.coeffs.iter().enumerate() {
            let k = g.wavevector(i);
            let wrap = |c: i64| if c == -n / 2 { c } else { -c };
            let mirror = g.flat_index([wrap(k[0]), wrap(k[1])]).unwrap();
            worst = worst.max((self.coeffs[mirror] - z.conj()).norm());
        }
        worst / scale
    }

    /// Copies the coefficients shared by both grids' resolved boxes onto
    /// another resolution (zero padding or truncation in wavenumber space).
    pub fn resample(&self, target: GridSpec) -> Result<DenseSpectrum> {
        if target.dims() != self.grid.dims() || target.domain_length() != self.grid.domain_length()
        {
            return Err(Error::GridMismatch);
        }
        let mut out = DenseSpectrum::zeros(target);
        for (i, z) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(i);
            if self.grid.in_box(k) && target.in_box(k) {
                let j = target.flat_index(k).unwrap();
                out.coeffs[j] = *z;
            }
        }
        Ok(out)
    }
}

/// Cached FFT plans for a square `m^dims` array. Transforms are unnormalized.
#[derive(Clone)]
pub struct FourierTransform {
    dims: usize,
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierTransform")
            .field("dims", &self.dims)
            .field("m", &self.m)
            .finish()
    }
}

impl FourierTransform {
    pub fn new(dims: usize, m: usize) -> Self {
        let mut planner = FftPlanner::new();
        FourierTransform {
            dims,
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::new(grid.dims(), grid.n_per_dim())
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// `Σ_x u(x) e^{-ik·x}` in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.apply(&*self.forward, buf);
    }

    /// `Σ_k û_k e^{ik·x}` in place.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.apply(&*self.inverse, buf);
    }

    fn apply(&self, fft: &dyn Fft<f64>, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len());
        fft.process(buf);
        if self.dims == 2 {
            transpose_square(buf, self.m);
            fft.process(buf);
            transpose_square(buf, self.m);
        }
    }
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

pub fn dft_forward(field: &SpatialField) -> DenseSpectrum {
    dft_forward_with(&FourierTransform::for_grid(field.grid()), field)
}

pub fn dft_forward_with(plan: &FourierTransform, field: &SpatialField) -> DenseSpectrum {
    let grid = *field.grid();
    let mut buf: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    plan.forward(&mut buf);
    let scale = 1.0 / grid.total() as f64;
    for z in &mut buf {
        *z *= scale;
    }
    DenseSpectrum { grid, coeffs: buf }
}

/// Complex samples of the represented function, without the realness check.
pub fn dft_inverse_complex(plan: &FourierTransform, spec: &DenseSpectrum) -> Vec<Complex64> {
    let mut buf = spec.coeffs.clone();
    plan.inverse(&mut buf);
    buf
}

pub fn dft_inverse(spec: &DenseSpectrum) -> Result<SpatialField> {
    dft_inverse_with(&FourierTransform::for_grid(spec.grid()), spec)
}

/// Inverse transform of a spectrum that should represent a real field.
///
/// Fails with [`Error::HermitianViolation`] when the imaginary part of the
/// samples exceeds [`HERMITIAN_TOLERANCE`] relative to `max(1, max|u|)`.
pub fn dft_inverse_with(plan: &FourierTransform, spec: &DenseSpectrum) -> Result<SpatialField> {
    let buf = dft_inverse_complex(plan, spec);
    let scale = buf.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
    let residual = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residual > HERMITIAN_TOLERANCE * scale {
        return Err(Error::HermitianViolation { residual });
    }
    Ok(SpatialField {
        grid: spec.grid,
        values: buf.into_iter().map(|z| z.re).collect(),
    })
}

/// Multiplies every coefficient by `i k_axis`. The Nyquist wavenumber along
/// `axis` has no real-valued derivative and is set to zero.
pub fn spectral_derivative(spec: &DenseSpectrum, axis: usize) -> Result<DenseSpectrum> {
    let grid = spec.grid;
    if axis >= grid.dims() {
        return Err(Error::AxisOutOfRange {
            axis,
            dims: grid.dims(),
        });
    }
    let nyquist = -(grid.n_per_dim() as i64) / 2;
    let s = grid.k_scale();
    let coeffs = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let k = grid.wavevector(i)[axis];
            if k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                z * Complex64::new(0.0, s * k as f64)
            }
        })
        .collect();
    Ok(DenseSpectrum { grid, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(grid: GridSpec, seed: u64) -> SpatialField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.total()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SpatialField::new(grid, values).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_field_has_only_mean() {
        for dims in [1, 2] {
            let g = GridSpec::periodic(dims, 16).unwrap();
            let spec = dft_forward(&SpatialField::from_fn(g, |_, _| 3.0));
            assert!((spec.mean() - c(3.0, 0.0)).norm() < 1e-14);
            assert!(spec.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn sine_has_two_modes() {
        let g = GridSpec::periodic(1, 64).unwrap();
        let spec = dft_forward(&SpatialField::from_fn(g, |x, _| x.sin()));
        for (i, z) in spec.coeffs().iter().enumerate() {
            let want = match g.wavenumber_of(i) {
                1 => c(0.0, -0.5),
                -1 => c(0.0, 0.5),
                _ => c(0.0, 0.0),
            };
            assert!((z - want).norm() < 1e-12, "k={} got {z}", g.wavenumber_of(i));
        }
    }

    #[test]
    fn inverse_of_mode_pairs() {
        let g = GridSpec::periodic(1, 64).unwrap();
        let mut spec = DenseSpectrum::zeros(g);
        spec.coeffs_mut()[0] = c(5.0, 0.0);
        let u = dft_inverse(&spec).unwrap();
        assert!(u.values().iter().all(|v| (v - 5.0).abs() < 1e-12));

        let mut spec = DenseSpectrum::zeros(g);
        spec.coeffs_mut()[1] = c(0.0, -0.5);
        spec.coeffs_mut()[63] = c(0.0, 0.5);
        let u = dft_inverse(&spec).unwrap();
        let want = SpatialField::from_fn(g, |x, _| x.sin());
        assert!(max_diff(u.values(), want.values()) < 1e-12);
    }

    #[test]
    fn round_trip_large_grids() {
        for (dims, n) in [(1, 128), (1, 4096), (2, 256)] {
            let g = GridSpec::periodic(dims, n).unwrap();
            let u = random_field(g, n as u64);
            let back = dft_inverse(&dft_forward(&u)).unwrap();
            assert!(max_diff(u.values(), back.values()) < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_spectrum_is_rejected() {
        let g = GridSpec::periodic(1, 16).unwrap();
        let mut spec = DenseSpectrum::zeros(g);
        spec.coeffs_mut()[1] = c(1.0, 0.0);
        assert!(matches!(
            dft_inverse(&spec),
            Err(Error::HermitianViolation { .. })
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let g = GridSpec::periodic(1, 64).unwrap();
        let s = dft_forward(&SpatialField::from_fn(g, |x, _| x.sin()));
        let d1 = spectral_derivative(&s, 0).unwrap();
        let cos = SpatialField::from_fn(g, |x, _| x.cos());
        assert!(max_diff(dft_inverse(&d1).unwrap().values(), cos.values()) < 1e-12);
        let d2 = spectral_derivative(&d1, 0).unwrap();
        let minus_sin = SpatialField::from_fn(g, |x, _| -x.sin());
        assert!(max_diff(dft_inverse(&d2).unwrap().values(), minus_sin.values()) < 1e-12);
    }

    #[test]
    fn derivative_kills_constants_and_nyquist() {
        let g = GridSpec::periodic(1, 8).unwrap();
        let mut spec = DenseSpectrum::zeros(g);
        spec.coeffs_mut()[0] = c(2.0, 0.0);
        spec.coeffs_mut()[4] = c(1.0, 0.0);
        let d = spectral_derivative(&spec, 0).unwrap();
        assert!(d.coeffs().iter().all(|z| z.norm() == 0.0));
        assert!(matches!(
            spectral_derivative(&spec, 1),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_on_rescaled_domain() {
        let g = GridSpec::new(1, 32, 1.0).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let s = dft_forward(&SpatialField::from_fn(g, |x, _| (two_pi * x).sin()));
        let d = dft_inverse(&spectral_derivative(&s, 0).unwrap()).unwrap();
        let want = SpatialField::from_fn(g, |x, _| two_pi * (two_pi * x).cos());
        assert!(max_diff(d.values(), want.values()) < 1e-11);
    }

    #[test]
    fn parseval_and_linearity() {
        for seed in 0..100u64 {
            let dims = 1 + (seed % 2) as usize;
            let g = GridSpec::periodic(dims, if dims == 1 { 128 } else { 16 }).unwrap();
            let u = random_field(g, seed);
            let v = random_field(g, seed + 1000);
            let su = dft_forward(&u);
            let energy_x: f64 =
                u.values().iter().map(|x| x * x).sum::<f64>() / g.total() as f64;
            let energy_k: f64 = su.coeffs().iter().map(|z| z.norm_sqr()).sum();
            assert!((energy_x - energy_k).abs() <= 1e-10 * energy_x);

            let w = SpatialField::new(
                g,
                u.values()
                    .iter()
                    .zip(v.values())
                    .map(|(a, b)| 2.0 * a - 0.5 * b)
                    .collect(),
            )
            .unwrap();
            let sv = dft_forward(&v);
            let sw = dft_forward(&w);
            for i in 0..g.total() {
                let lin = su.coeffs()[i] * 2.0 - sv.coeffs()[i] * 0.5;
                assert!((lin - sw.coeffs()[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_preserves_hermitian_symmetry() {
        for seed in 0..20u64 {
            let g = GridSpec::periodic(2, 16).unwrap();
            let s = dft_forward(&random_field(g, seed));
            assert!(s.hermitian_defect() < 1e-12);
            for axis in 0..2 {
                let d = spectral_derivative(&s, axis).unwrap();
                assert!(d.hermitian_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn resample_pads_and_truncates() {
        let coarse = GridSpec::periodic(1, 16).unwrap();
        let fine = GridSpec::periodic(1, 64).unwrap();
        let s = dft_forward(&SpatialField::from_fn(coarse, |x, _| x.sin() + (3.0 * x).cos()));
        let up = s.resample(fine).unwrap();
        let u = dft_inverse(&up).unwrap();
        let want = SpatialField::from_fn(fine, |x, _| x.sin() + (3.0 * x).cos());
        assert!(max_diff(u.values(), want.values()) < 1e-12);
        let down = up.resample(coarse).unwrap();
        assert!((down.at([3, 0]) - s.at([3, 0])).norm() < 1e-15);
    }
}
