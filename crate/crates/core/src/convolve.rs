//! Galerkin-truncated convolution of sparse spectra.
//!
//! `(a ∗ b)(k) = Σ_{k1 + k2 = k} a(k1) b(k2)` restricted to the symmetric
//! box `|k_d| <= n/2 - 1`. Products leaving the box are discarded (no
//! periodic wrap) and Nyquist inputs do not take part. Cost is
//! `O(n_s(a) · n_s(b))` plus sorting of the touched outputs.
//!
//! Every output coefficient is summed in the fixed order "entries of `a` by
//! index, then entries of `b` by index", whichever accumulation strategy is
//! picked, so results are bitwise reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::sparse::{SparseSpectrum, UNDERFLOW};

struct BoxEntries {
    k: Vec<[i64; 2]>,
    z: Vec<Complex64>,
}

fn box_entries(s: &SparseSpectrum) -> BoxEntries {
    let g = s.grid();
    let mut k = Vec::with_capacity(s.n_s());
    let mut z = Vec::with_capacity(s.n_s());
    for &(i, v) in s.entries() {
        let kv = g.wavevector(i);
        if g.in_box(kv) {
            k.push(kv);
            z.push(v);
        }
    }
    BoxEntries { k, z }
}

pub fn sparse_convolve(a: &SparseSpectrum, b: &SparseSpectrum) -> Result<SparseSpectrum> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *a.grid();
    let ea = box_entries(a);
    let eb = box_entries(b);
    let pairs = ea.z.len() * eb.z.len();
    if pairs == 0 {
        return Ok(SparseSpectrum::empty(grid));
    }
    let entries = if pairs.saturating_mul(4) <= grid.total() {
        accumulate_sorted(&grid, &ea, &eb)
    } else {
        accumulate_scratch(&grid, &ea, &eb)
    };
    Ok(SparseSpectrum::from_sorted_unchecked(grid, entries))
}

/// Calls `emit(flat_index, product)` for every in-box product, in the
/// canonical order.
#[inline]
fn for_each_product(
    grid: &GridSpec,
    a: &BoxEntries,
    b: &BoxEntries,
    mut emit: impl FnMut(usize, Complex64),
) {
    let n = grid.n_per_dim() as i64;
    let m = grid.max_resolved();
    let wrap = |k: i64| if k < 0 { (k + n) as usize } else { k as usize };
    if grid.dims() == 1 {
        for (ka, &za) in a.k.iter().zip(&a.z) {
            for (kb, &zb) in b.k.iter().zip(&b.z) {
                let k = ka[0] + kb[0];
                if k.abs() <= m {
                    emit(wrap(k), za * zb);
                }
            }
        }
    } else {
        let nu = grid.n_per_dim();
        for (ka, &za) in a.k.iter().zip(&a.z) {
            for (kb, &zb) in b.k.iter().zip(&b.z) {
                let kx = ka[0] + kb[0];
                let ky = ka[1] + kb[1];
                if kx.abs() <= m && ky.abs() <= m {
                    emit(wrap(kx) * nu + wrap(ky), za * zb);
                }
            }
        }
    }
}

fn accumulate_sorted(
    grid: &GridSpec,
    a: &BoxEntries,
    b: &BoxEntries,
) -> Vec<(usize, Complex64)> {
    let mut products = Vec::with_capacity(a.z.len() * b.z.len());
    for_each_product(grid, a, b, |i, z| products.push((i, z)));
    // stable: keeps generation order within each output index
    products.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, Complex64)> = Vec::new();
    for (i, z) in products {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += z,
            _ => out.push((i, z)),
        }
    }
    out.retain(|(_, z)| z.norm() >= UNDERFLOW);
    out
}

fn accumulate_scratch(
    grid: &GridSpec,
    a: &BoxEntries,
    b: &BoxEntries,
) -> Vec<(usize, Complex64)> {
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.total()];
    let mut seen = vec![false; grid.total()];
    let mut touched = Vec::new();
    for_each_product(grid, a, b, |i, z| {
        if !seen[i] {
            seen[i] = true;
            touched.push(i);
            acc[i] = z;
        } else {
            acc[i] += z;
        }
    });
    touched.sort_unstable();
    touched
        .into_iter()
        .map(|i| (i, acc[i]))
        .filter(|(_, z)| z.norm() >= UNDERFLOW)
        .collect()
}
