//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use sparse_spectral::{GridSpec, SparseSpectrum};

pub fn objective(z: Complex64, v: Complex64, lambda: f64) -> f64 {
    lambda * z.norm() + 0.5 * (z - v).norm_sqr()
}

/// Minimizes `λ|z| + ½|z - v|²` by grid search: a 201×201 grid of radius
/// `2|v|` around `v`, then repeated 41×41 zooms around the best point.
pub fn brute_force_prox(v: Complex64, lambda: f64) -> (Complex64, f64) {
    let mut center = v;
    let mut radius = 2.0 * v.norm().max(1e-3);
    let mut points = 201;
    let mut best = (center, objective(center, v, lambda));
    for _ in 0..12 {
        let step = 2.0 * radius / (points - 1) as f64;
        for i in 0..points {
            for j in 0..points {
                let z = center
                    + Complex64::new(-radius + i as f64 * step, -radius + j as f64 * step);
                let f = objective(z, v, lambda);
                if f < best.1 {
                    best = (z, f);
                }
            }
        }
        center = best.0;
        radius = 2.0 * step;
        points = 41;
    }
    best
}

/// Galerkin-truncated convolution by a double loop over every pair of
/// grid indices; products are kept when both factors and the sum lie in
/// the box `|k_d| <= n/2 - 1`.
pub fn dense_truncated_convolution(
    grid: &GridSpec,
    a: &[Complex64],
    b: &[Complex64],
) -> Vec<Complex64> {
    let n = grid.n_per_dim() as i64;
    let m = n / 2 - 1;
    let dims = grid.dims();
    let unflat = |i: usize| -> [i64; 2] {
        let w = |j: i64| if j < n / 2 { j } else { j - n };
        if dims == 1 {
            [w(i as i64), 0]
        } else {
            [w(i as i64 / n), w(i as i64 % n)]
        }
    };
    let flat = |k: [i64; 2]| -> usize {
        let p = |c: i64| c.rem_euclid(n) as usize;
        if dims == 1 {
            p(k[0])
        } else {
            p(k[0]) * n as usize + p(k[1])
        }
    };
    let inside = |k: [i64; 2]| k[0].abs() <= m && k[1].abs() <= m;
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for (i, &x) in a.iter().enumerate() {
        let ki = unflat(i);
        if x == Complex64::new(0.0, 0.0) || !inside(ki) {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let kj = unflat(j);
            if !inside(kj) {
                continue;
            }
            let k = [ki[0] + kj[0], ki[1] + kj[1]];
            if inside(k) {
                out[flat(k)] += x * y;
            }
        }
    }
    out
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Random spectrum with at most `max_n_s` entries anywhere on the grid
/// (Nyquist modes included on purpose).
pub fn random_sparse(grid: &GridSpec, max_n_s: usize, rng: &mut impl Rng) -> SparseSpectrum {
    let n_s = rng.gen_range(0..=max_n_s);
    let entries = (0..n_s)
        .map(|_| (rng.gen_range(0..grid.total()), random_complex(rng, 1.0)))
        .collect();
    SparseSpectrum::from_entries(*grid, entries).unwrap()
}

/// Random real-field spectrum: conjugate pairs with at most `pairs` pairs
/// inside the resolved box, plus a real mean.
pub fn random_hermitian(grid: &GridSpec, pairs: usize, rng: &mut impl Rng) -> SparseSpectrum {
    let m = grid.max_resolved();
    let mut entries = vec![(0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0))];
    for _ in 0..pairs {
        let k = if grid.dims() == 1 {
            [rng.gen_range(1..=m), 0]
        } else {
            [rng.gen_range(-m..=m), rng.gen_range(-m..=m)]
        };
        if k == [0, 0] {
            continue;
        }
        let z = random_complex(rng, 1.0);
        let i = grid.flat_index(k).unwrap();
        let j = grid.flat_index([-k[0], -k[1]]).unwrap();
        entries.retain(|&(e, _)| e != i && e != j);
        entries.push((i, z));
        entries.push((j, z.conj()));
    }
    SparseSpectrum::from_entries(*grid, entries).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
