//! Periodic grid geometry and the wavenumber layout shared by every spectrum.
//!
//! Coefficients are stored in FFT order per dimension: index `i < n/2` holds
//! wavenumber `i`, index `i >= n/2` holds `i - n`. The unpaired Nyquist
//! wavenumber `-n/2` sits at index `n/2`. Two-dimensional data is row-major
//! with x (axis 0) as the slow index.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Integer wavevector. One-dimensional grids use `[k, 0]`.
pub type Wavevector = [i64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dims: usize,
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dims: usize, n_per_dim: usize, domain_length: f64) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::InvalidGrid(format!("dims must be 1 or 2, got {dims}")));
        }
        if n_per_dim < 4 || !n_per_dim.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_dim must be a power of two >= 4, got {n_per_dim}"
            )));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain_length must be positive, got {domain_length}"
            )));
        }
        Ok(GridSpec {
            dims,
            n: n_per_dim,
            length: domain_length,
        })
    }

    /// Grid on the 2π-periodic box, where wavenumbers are integers.
    pub fn periodic(dims: usize, n_per_dim: usize) -> Result<Self> {
        Self::new(dims, n_per_dim, 2.0 * PI)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n_per_dim(&self) -> usize {
        self.n
    }

    pub fn domain_length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of grid points (and of coefficients).
    pub fn total(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    /// Measure of the periodic box, `domain_length^dims`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dims as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dims as i32)
    }

    /// Factor turning an integer wavenumber into a physical one.
    pub fn k_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest |k| per dimension that has a conjugate partner on the grid.
    pub fn max_resolved(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    pub fn wavenumber_of(&self, index: usize) -> i64 {
        debug_assert!(index < self.n);
        let n = self.n as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn index_of_wavenumber(&self, k: i64) -> Option<usize> {
        let n = self.n as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + n) as usize })
    }

    pub fn wavevector(&self, flat: usize) -> Wavevector {
        match self.dims {
            1 => [self.wavenumber_of(flat), 0],
            _ => [
                self.wavenumber_of(flat / self.n),
                self.wavenumber_of(flat % self.n),
            ],
        }
    }

    pub fn flat_index(&self, k: Wavevector) -> Option<usize> {
        match self.dims {
            1 => {
                if k[1] != 0 {
                    return None;
                }
                self.index_of_wavenumber(k[0])
            }
            _ => {
                let ix = self.index_of_wavenumber(k[0])?;
                let iy = self.index_of_wavenumber(k[1])?;
                Some(ix * self.n + iy)
            }
        }
    }

    /// True when any component of the wavevector is the Nyquist wavenumber.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = self.n as i64 / 2;
        self.wavevector(flat)[..self.dims].iter().any(|&k| k == -half)
    }

    /// Symmetric resolved box `|k_d| <= n/2 - 1`, the support of all products.
    pub fn in_box(&self, k: Wavevector) -> bool {
        let m = self.max_resolved();
        k[..self.dims].iter().all(|c| c.abs() <= m) && k[self.dims..].iter().all(|&c| c == 0)
    }

    /// Physical squared wavenumber |k|² of a coefficient.
    pub fn k_squared(&self, flat: usize) -> f64 {
        let s = self.k_scale();
        self.wavevector(flat)[..self.dims]
            .iter()
            .map(|&k| (s * k as f64).powi(2))
            .sum()
    }

    /// Spatial coordinates of a grid point.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let dx = self.dx();
        match self.dims {
            1 => [flat as f64 * dx, 0.0],
            _ => [(flat / self.n) as f64 * dx, (flat % self.n) as f64 * dx],
        }
    }

    /// Same grid with a different resolution.
    pub fn with_resolution(&self, n_per_dim: usize) -> Result<Self> {
        Self::new(self.dims, n_per_dim, self.length)
    }
}
