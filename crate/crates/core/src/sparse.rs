//! Sparse coefficient container and its text dump format.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Wavevector};
use crate::spectral::DenseSpectrum;

/// Magnitudes below this are treated as floating-point underflow and dropped.
pub const UNDERFLOW: f64 = 1e-300;

/// Nonzero Fourier coefficients keyed by flat FFT-order index, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpectrum {
    grid: GridSpec,
    entries: Vec<(usize, Complex64)>,
}

fn negligible(z: Complex64) -> bool {
    z.norm() < UNDERFLOW
}

impl SparseSpectrum {
    pub fn empty(grid: GridSpec) -> Self {
        SparseSpectrum {
            grid,
            entries: Vec::new(),
        }
    }

    /// Builds a spectrum from `(index, value)` pairs. Duplicate indices are
    /// summed in the given order; underflowing values are dropped.
    pub fn from_entries(grid: GridSpec, mut entries: Vec<(usize, Complex64)>) -> Result<Self> {
        if let Some(&(i, _)) = entries.iter().find(|(i, _)| *i >= grid.total()) {
            return Err(Error::InvalidGrid(format!(
                "index {i} out of range for {} coefficients",
                grid.total()
            )));
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(entries.len());
        for (i, z) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += z,
                _ => merged.push((i, z)),
            }
        }
        merged.retain(|&(_, z)| !negligible(z));
        Ok(SparseSpectrum {
            grid,
            entries: merged,
        })
    }

    /// Entries must already be sorted by index, unique and nonzero.
    pub(crate) fn from_sorted_unchecked(grid: GridSpec, entries: Vec<(usize, Complex64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, z)| !negligible(z)));
        SparseSpectrum { grid, entries }
    }

    pub fn from_wavevectors(
        grid: GridSpec,
        entries: impl IntoIterator<Item = (Wavevector, Complex64)>,
    ) -> Result<Self> {
        let mut flat = Vec::new();
        for (k, z) in entries {
            let i = grid.flat_index(k).ok_or_else(|| {
                Error::InvalidGrid(format!("wavevector {k:?} is not on the grid"))
            })?;
            flat.push((i, z));
        }
        Self::from_entries(grid, flat)
    }

    /// Keeps every coefficient that is not an underflow.
    pub fn from_dense(spec: &DenseSpectrum) -> Self {
        let entries = spec
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, z)| !negligible(**z))
            .map(|(i, z)| (i, *z))
            .collect();
        SparseSpectrum {
            grid: *spec.grid(),
            entries,
        }
    }

    pub fn to_dense(&self) -> DenseSpectrum {
        let mut out = DenseSpectrum::zeros(self.grid);
        let coeffs = out.coeffs_mut();
        for &(i, z) in &self.entries {
            coeffs[i] = z;
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn entries(&self) -> &[(usize, Complex64)] {
        &self.entries
    }

    pub fn n_s(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(Complex64::new(0.0, 0.0), |p| self.entries[p].1)
    }

    pub fn at(&self, k: Wavevector) -> Complex64 {
        self.grid
            .flat_index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.get(i))
    }

    pub fn mean(&self) -> Complex64 {
        self.get(0)
    }

    /// Applies a diagonal operator `z -> f(index, z)` entrywise.
    pub fn map_diagonal(&self, f: impl Fn(usize, Complex64) -> Complex64) -> SparseSpectrum {
        let entries = self
            .entries
            .iter()
            .map(|&(i, z)| (i, f(i, z)))
            .filter(|&(_, z)| !negligible(z))
            .collect();
        SparseSpectrum::from_sorted_unchecked(self.grid, entries)
    }

    pub fn scale(&self, s: f64) -> SparseSpectrum {
        self.map_diagonal(|_, z| z * s)
    }

    /// Keeps the entries for which `keep(index)` holds.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> SparseSpectrum {
        let entries = self
            .entries
            .iter()
            .copied()
            .filter(|&(i, _)| keep(i))
            .collect();
        SparseSpectrum::from_sorted_unchecked(self.grid, entries)
    }

    /// Restriction to the symmetric resolved box (drops Nyquist entries).
    pub fn restrict_to_box(&self) -> SparseSpectrum {
        let g = self.grid;
        self.filter(|i| g.in_box(g.wavevector(i)))
    }

    /// `alpha * self + beta * other`, merged in index order.
    pub fn combine(&self, alpha: f64, other: &SparseSpectrum, beta: f64) -> Result<SparseSpectrum> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        while p < a.len() || q < b.len() {
            let (i, z) = match (a.get(p), b.get(q)) {
                (Some(&(i, x)), Some(&(j, y))) if i == j => {
                    p += 1;
                    q += 1;
                    (i, x * alpha + y * beta)
                }
                (Some(&(i, x)), Some(&(j, _))) if i < j => {
                    p += 1;
                    (i, x * alpha)
                }
                (Some(&(i, x)), None) => {
                    p += 1;
                    (i, x * alpha)
                }
                (_, Some(&(j, y))) => {
                    q += 1;
                    (j, y * beta)
                }
                (None, None) => unreachable!(),
            };
            if !negligible(z) {
                out.push((i, z));
            }
        }
        Ok(SparseSpectrum::from_sorted_unchecked(self.grid, out))
    }

    pub fn add(&self, other: &SparseSpectrum) -> Result<SparseSpectrum> {
        self.combine(1.0, other, 1.0)
    }

    /// Multiplies by `i k_axis`; Nyquist entries along the axis vanish.
    pub fn derivative(&self, axis: usize) -> Result<SparseSpectrum> {
        let g = self.grid;
        if axis >= g.dims() {
            return Err(Error::AxisOutOfRange { axis, dims: g.dims() });
        }
        let nyquist = -(g.n_per_dim() as i64) / 2;
        let s = g.k_scale();
        Ok(self.map_diagonal(|i, z| {
            let k = g.wavevector(i)[axis];
            if k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                z * Complex64::new(0.0, s * k as f64)
            }
        }))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max)
    }

    /// Writes the dump format: a `# grid=<n,..> n_s=<count>` header, then one
    /// tab-separated line `k_x [k_y] re im` per entry sorted by wavevector.
    pub fn to_dump(&self) -> String {
        let g = &self.grid;
        let dims = g.dims();
        let mut out = String::new();
        let sizes = vec![g.n_per_dim().to_string(); dims].join(",");
        let _ = writeln!(out, "# grid={sizes} n_s={}", self.n_s());
        let mut rows: Vec<(Wavevector, Complex64)> = self
            .entries
            .iter()
            .map(|&(i, z)| (g.wavevector(i), z))
            .collect();
        rows.sort_by_key(|&(k, _)| k);
        for (k, z) in rows {
            for c in &k[..dims] {
                let _ = write!(out, "{c}\t");
            }
            let _ = writeln!(out, "{:e}\t{:e}", z.re, z.im);
        }
        out
    }

    /// Parses [`SparseSpectrum::to_dump`] output back on the given grid.
    pub fn from_dump(text: &str, grid: GridSpec) -> Result<SparseSpectrum> {
        let dims = grid.dims();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Dump {
            line: 1,
            message: "empty dump".into(),
        })?;
        let expected = vec![grid.n_per_dim().to_string(); dims].join(",");
        let bad_header = |m: &str| Error::Dump {
            line: 1,
            message: m.to_string(),
        };
        let rest = header
            .strip_prefix("# grid=")
            .ok_or_else(|| bad_header("missing `# grid=` header"))?;
        let (sizes, count) = rest
            .split_once(" n_s=")
            .ok_or_else(|| bad_header("missing n_s"))?;
        if sizes != expected {
            return Err(bad_header(&format!("grid {sizes} does not match {expected}")));
        }
        let count: usize = count.trim().parse().map_err(|_| bad_header("bad n_s"))?;
        let mut entries = Vec::with_capacity(count);
        for (ln, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Dump {
                line: ln + 1,
                message: m.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != dims + 2 {
                return Err(bad("wrong column count"));
            }
            let mut k = [0i64; 2];
            for d in 0..dims {
                k[d] = cols[d].parse().map_err(|_| bad("bad wavenumber"))?;
            }
            let re: f64 = cols[dims].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = cols[dims + 1].parse().map_err(|_| bad("bad imaginary part"))?;
            let i = grid
                .flat_index(k)
                .ok_or_else(|| bad("wavevector not on grid"))?;
            entries.push((i, Complex64::new(re, im)));
        }
        if entries.len() != count {
            return Err(bad_header(&format!(
                "header says {count} entries, found {}",
                entries.len()
            )));
        }
        SparseSpectrum::from_entries(grid, entries)
    }
}
