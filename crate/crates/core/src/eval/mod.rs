//! Reference solutions, baselines and error measurement.

pub mod dense;

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::spectral::{dft_inverse_complex, DenseSpectrum, FourierTransform};

pub use dense::{
    dense_advance, low_frequency_advance, low_pass, DenseConvolver, DenseOperators, DenseSolver,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorPair {
    pub l2: f64,
    pub linf: f64,
}

/// Measures spatial differences between spectra on one grid, reusing a plan.
#[derive(Debug, Clone)]
pub struct ErrorMeter {
    grid: GridSpec,
    plan: FourierTransform,
}

impl ErrorMeter {
    pub fn new(grid: &GridSpec) -> Self {
        ErrorMeter {
            grid: *grid,
            plan: FourierTransform::for_grid(grid),
        }
    }

    pub fn samples(&self, spec: &DenseSpectrum) -> Result<Vec<Complex64>> {
        if spec.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(dft_inverse_complex(&self.plan, spec))
    }

    /// `l2 = sqrt(Σ_x |a - b|² dx^d)`, `linf = max_x |a - b|`.
    pub fn between(&self, a: &DenseSpectrum, b: &DenseSpectrum) -> Result<ErrorPair> {
        let diff: Vec<Complex64> = a
            .coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| x - y)
            .collect();
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch);
        }
        let d = DenseSpectrum::new(*a.grid(), diff)?;
        self.norms(&d)
    }

    /// L² and L∞ norms of the represented field.
    pub fn norms(&self, spec: &DenseSpectrum) -> Result<ErrorPair> {
        let samples = self.samples(spec)?;
        Ok(sample_norms(&samples, self.grid.cell_volume()))
    }
}

fn sample_norms(samples: &[Complex64], cell: f64) -> ErrorPair {
    let (sum, max) = samples
        .iter()
        .fold((0.0, 0.0f64), |(s, m), z| (s + z.norm_sqr(), m.max(z.norm())));
    ErrorPair {
        l2: (sum * cell).sqrt(),
        linf: max,
    }
}

pub fn error_metrics(a: &DenseSpectrum, b: &DenseSpectrum) -> Result<ErrorPair> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    ErrorMeter::new(a.grid()).between(a, b)
}

/// Smallest `K` whose low-frequency box `|k_d| <= K` holds at least `n_s`
/// wavevectors, i.e. `(2K + 1)^dims >= n_s`.
pub fn mode_count_cutoff(n_s: usize, dims: usize) -> i64 {
    let mut k = 0i64;
    while ((2 * k + 1) as usize).pow(dims as u32) < n_s {
        k += 1;
    }
    k
}

/// Cutoff matching the final retained-mode count of a sparse run.
pub fn match_mode_count(report: &RunReport) -> i64 {
    let n_s = report.records.last().map_or(0, |r| r.n_s);
    mode_count_cutoff(n_s, report.meta.grid.dims())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub step: usize,
    pub time: f64,
    pub n_s: usize,
    pub sparsity_fraction: f64,
    pub errors: Option<ErrorPair>,
    pub mean: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub equation: String,
    pub grid: GridSpec,
    pub dt: f64,
    pub lambda_rule: String,
    pub lambda: f64,
    /// Mean wall-clock seconds per step of the run that produced the records.
    pub seconds_per_step: f64,
}

/// Per-step time series of a run, initial state included.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub meta: RunMeta,
    pub records: Vec<ReportRecord>,
}

pub const REPORT_HEADER: &str = "step,time,n_s,sparsity_fraction,l2_error,linf_error,mean_re,mean_im";

impl RunReport {
    pub fn new(meta: RunMeta) -> Self {
        RunReport {
            meta,
            records: Vec::new(),
        }
    }

    pub fn final_record(&self) -> Option<&ReportRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        for r in &self.records {
            let (l2, linf) = match r.errors {
                Some(e) => (format!("{:e}", e.l2), format!("{:e}", e.linf)),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:e},{:e}",
                r.step, r.time, r.n_s, r.sparsity_fraction, l2, linf, r.mean.re, r.mean.im
            );
        }
        out
    }
}
