//! Sparse convolution versus the transform-based dense product.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolve::sparse_convolve;
use crate::error::{Error, Result};
use crate::eval::DenseConvolver;
use crate::grid::GridSpec;
use crate::sparse::SparseSpectrum;

/// Largest coefficient difference tolerated between the two paths.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub n_s: usize,
    pub sparse_median_s: f64,
    pub dense_median_s: f64,
    pub max_difference: f64,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.dense_median_s / self.sparse_median_s
    }
}

pub const BENCH_HEADER: &str = "n,n_s,sparse_median_s,dense_median_s,speedup,max_difference";

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{BENCH_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:.3},{:e}",
            r.n,
            r.n_s,
            r.sparse_median_s,
            r.dense_median_s,
            r.speedup(),
            r.max_difference
        );
    }
    out
}

/// `n_s` distinct in-box wavenumbers with random complex amplitudes.
pub fn random_sparse(grid: &GridSpec, n_s: usize, rng: &mut impl Rng) -> Result<SparseSpectrum> {
    let mut candidates: Vec<usize> = (0..grid.total())
        .filter(|&i| grid.in_box(grid.wavevector(i)))
        .collect();
    if n_s > candidates.len() {
        return Err(Error::InvalidParams(format!(
            "n_s = {n_s} exceeds the {} resolved modes",
            candidates.len()
        )));
    }
    candidates.shuffle(rng);
    let entries = candidates[..n_s]
        .iter()
        .map(|&i| (i, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    SparseSpectrum::from_entries(*grid, entries)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn max_difference(sparse: &SparseSpectrum, dense: &crate::spectral::DenseSpectrum) -> f64 {
    let s = sparse.to_dense();
    s.coeffs()
        .iter()
        .zip(dense.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Times both product paths on random `n_s`-sparse 1-D spectra for every
/// `(N, n_s)` pair. The dense path densifies both inputs, transforms to a
/// padded grid, multiplies and transforms back. Results are checked against
/// each other before timing; a disagreement is an error.
pub fn bench_convolution(
    sizes: &[usize],
    sparsities: &[usize],
    repetitions: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidParams("repetitions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(sizes.len() * sparsities.len());
    for &n in sizes {
        let grid = GridSpec::periodic(1, n)?;
        let dense = DenseConvolver::new(&grid);
        for &n_s in sparsities {
            if n_s > n {
                return Err(Error::InvalidParams(format!("n_s = {n_s} exceeds N = {n}")));
            }
            let a = random_sparse(&grid, n_s, &mut rng)?;
            let b = random_sparse(&grid, n_s, &mut rng)?;

            let delta = SparseSpectrum::from_entries(grid, vec![(0, Complex64::new(1.0, 0.0))])?;
            if sparse_convolve(&delta, &a)? != a.restrict_to_box() {
                return Err(Error::InvalidParams(format!(
                    "identity convolution changed its input at N = {n}"
                )));
            }

            let s = sparse_convolve(&a, &b)?;
            let d = dense.convolve(&a.to_dense(), &b.to_dense())?;
            let diff = max_difference(&s, &d);
            if diff > EQUIVALENCE_TOLERANCE {
                return Err(Error::InvalidParams(format!(
                    "sparse and dense products differ by {diff:e} at N = {n}, n_s = {n_s}"
                )));
            }

            let mut sparse_times = Vec::with_capacity(repetitions);
            let mut dense_times = Vec::with_capacity(repetitions);
            for _ in 0..repetitions {
                let t0 = Instant::now();
                let r = sparse_convolve(&a, &b)?;
                sparse_times.push(t0.elapsed().as_secs_f64());
                std::hint::black_box(r);

                let t0 = Instant::now();
                let r = dense.convolve(&a.to_dense(), &b.to_dense())?;
                dense_times.push(t0.elapsed().as_secs_f64());
                std::hint::black_box(r);
            }
            rows.push(BenchRow {
                n,
                n_s,
                sparse_median_s: median(sparse_times),
                dense_median_s: median(dense_times),
                max_difference: diff,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_per_pair() {
        let rows = bench_convolution(&[64, 128], &[1, 4, 16], 3, 1).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[4].n, rows[4].n_s), (128, 4));
        assert!(rows.iter().all(|r| r.max_difference <= EQUIVALENCE_TOLERANCE));
        assert_eq!(bench_csv(&rows).lines().count(), 7);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(bench_convolution(&[16], &[17], 1, 0).is_err());
        assert!(bench_convolution(&[48], &[4], 1, 0).is_err());
        assert!(bench_convolution(&[16], &[4], 0, 0).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
