//! Named initial conditions.
//!
//! * `gauss_bump[:w]`: periodized Gaussian of width `w` (default 0.5) and unit
//!   peak centred in the box; radially symmetric on 2-D grids.
//! * `sine_low`: random real trigonometric polynomial on `|k_d| <= 3`,
//!   coefficients uniform in `[-½, ½]²`, drawn from the run seed.
//! * `two_vortices[:A]`: vorticity patches `±A` (default 1) of Gaussian
//!   width 0.4 centred at `(π ∓ π/2, π)`. 2-D only.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::sparse::SparseSpectrum;
use crate::spectral::{dft_forward, SpatialField};

pub const DEFAULT_BUMP_WIDTH: f64 = 0.5;
pub const VORTEX_WIDTH: f64 = 0.4;
const SINE_LOW_MAX_K: i64 = 3;
/// Periodic images summed per direction; Gaussians of width < 1 are below
/// round-off beyond that.
const IMAGES: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    GaussBump { width: f64 },
    SineLow,
    TwoVortices { amplitude: f64 },
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InitialSpec::GaussBump { width } if width == DEFAULT_BUMP_WIDTH => write!(f, "gauss_bump"),
            InitialSpec::GaussBump { width } => write!(f, "gauss_bump:{width}"),
            InitialSpec::SineLow => write!(f, "sine_low"),
            InitialSpec::TwoVortices { amplitude } if amplitude == 1.0 => write!(f, "two_vortices"),
            InitialSpec::TwoVortices { amplitude } => write!(f, "two_vortices:{amplitude}"),
        }
    }
}

impl FromStr for InitialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownInitialSpec(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let positive = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => match a.parse::<f64>() {
                    Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
                    _ => Err(unknown()),
                },
            }
        };
        match name {
            "gauss_bump" => Ok(InitialSpec::GaussBump {
                width: positive(DEFAULT_BUMP_WIDTH)?,
            }),
            "sine_low" if arg.is_none() => Ok(InitialSpec::SineLow),
            "two_vortices" => Ok(InitialSpec::TwoVortices {
                amplitude: positive(1.0)?,
            }),
            _ => Err(unknown()),
        }
    }
}

fn periodic_gaussian(d: f64, width: f64, period: f64) -> f64 {
    (-IMAGES..=IMAGES)
        .map(|m| {
            let s = d + m as f64 * period;
            (-s * s / (2.0 * width * width)).exp()
        })
        .sum()
}

/// Spectrum of the named initial field, restricted to the resolved box.
pub fn initial_condition(spec: &InitialSpec, grid: &GridSpec, seed: u64) -> Result<SparseSpectrum> {
    let l = grid.domain_length();
    let to_domain = l / (2.0 * PI);
    let sampled = match *spec {
        InitialSpec::GaussBump { width } => {
            let w = width * to_domain;
            let c = l / 2.0;
            let dims = grid.dims();
            SpatialField::from_fn(*grid, |x, y| {
                let gx = periodic_gaussian(x - c, w, l);
                if dims == 1 {
                    gx
                } else {
                    gx * periodic_gaussian(y - c, w, l)
                }
            })
        }
        InitialSpec::SineLow => return Ok(sine_low(grid, seed)),
        InitialSpec::TwoVortices { amplitude } => {
            if grid.dims() != 2 {
                return Err(Error::NotTwoDimensional);
            }
            let w = VORTEX_WIDTH * to_domain;
            let (x1, x2, yc) = (l / 4.0, 3.0 * l / 4.0, l / 2.0);
            SpatialField::from_fn(*grid, |x, y| {
                let gy = periodic_gaussian(y - yc, w, l);
                amplitude * gy * (periodic_gaussian(x - x1, w, l) - periodic_gaussian(x - x2, w, l))
            })
        }
    };
    Ok(SparseSpectrum::from_dense(&dft_forward(&sampled)).restrict_to_box())
}

fn sine_low(grid: &GridSpec, seed: u64) -> SparseSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = SINE_LOW_MAX_K;
    let ky_range = if grid.dims() == 2 { -m..=m } else { 0..=0 };
    let mut entries = Vec::new();
    for kx in -m..=m {
        for ky in ky_range.clone() {
            // one representative per conjugate pair
            if (kx, ky) < (0, 0) {
                continue;
            }
            let k = [kx, ky];
            let i = grid.flat_index(k).unwrap();
            if kx == 0 && ky == 0 {
                entries.push((i, Complex64::new(rng.gen_range(-0.5..0.5), 0.0)));
                continue;
            }
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let j = grid.flat_index([-kx, -ky]).unwrap();
            entries.push((i, z));
            entries.push((j, z.conj()));
        }
    }
    SparseSpectrum::from_entries(*grid, entries).expect("indices are on the grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("sine_low".parse::<InitialSpec>().unwrap(), InitialSpec::SineLow);
        assert_eq!(
            "gauss_bump".parse::<InitialSpec>().unwrap(),
            InitialSpec::GaussBump { width: 0.5 }
        );
        assert_eq!(
            "two_vortices:2.5".parse::<InitialSpec>().unwrap(),
            InitialSpec::TwoVortices { amplitude: 2.5 }
        );
        for s in ["gauss_bump:0.25", "two_vortices", "sine_low", "gauss_bump"] {
            assert_eq!(s.parse::<InitialSpec>().unwrap().to_string(), s);
        }
        for bad in ["tophat", "gauss_bump:-1", "sine_low:3"] {
            assert!(matches!(
                bad.parse::<InitialSpec>(),
                Err(Error::UnknownInitialSpec(_))
            ));
        }
    }

    #[test]
    fn sine_low_support() {
        for dims in [1, 2] {
            let g = GridSpec::periodic(dims, 64).unwrap();
            let s = initial_condition(&InitialSpec::SineLow, &g, 42).unwrap();
            assert!(s.n_s() > 0);
            for &(i, _) in s.entries() {
                let k = g.wavevector(i);
                assert!(k[0].abs() <= 3 && k[1].abs() <= 3);
            }
            assert_eq!(s.to_dense().hermitian_defect(), 0.0);
        }
        let g = GridSpec::periodic(1, 64).unwrap();
        let a = initial_condition(&InitialSpec::SineLow, &g, 1).unwrap();
        let b = initial_condition(&InitialSpec::SineLow, &g, 1).unwrap();
        let c = initial_condition(&InitialSpec::SineLow, &g, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn vortices_have_zero_mean() {
        let g = GridSpec::periodic(2, 64).unwrap();
        let s = initial_condition(&InitialSpec::TwoVortices { amplitude: 1.0 }, &g, 0).unwrap();
        assert!(s.mean().norm() < 1e-10);
        assert!(s.to_dense().hermitian_defect() < 1e-12);
        let g1 = GridSpec::periodic(1, 64).unwrap();
        assert!(matches!(
            initial_condition(&InitialSpec::TwoVortices { amplitude: 1.0 }, &g1, 0),
            Err(Error::NotTwoDimensional)
        ));
    }

    #[test]
    fn gauss_bump_spectrum_matches_continuous_transform() {
        let g = GridSpec::periodic(1, 256).unwrap();
        let w = 0.5;
        let s = initial_condition(&InitialSpec::GaussBump { width: w }, &g, 0).unwrap();
        // Fourier coefficient of a periodized Gaussian centred at π:
        // (w / √(2π)) e^{-k² w² / 2} (-1)^k.
        let mut last = f64::INFINITY;
        for k in 0..40i64 {
            let want = w / (2.0 * PI).sqrt() * (-(k * k) as f64 * w * w / 2.0).exp();
            let got = s.at([k, 0]);
            assert!((got.norm() - want).abs() < 1e-15, "k={k}");
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if want > 1e-13 {
                assert!((got.re - sign * want).abs() < 1e-15);
                if k > 2 {
                    assert!(got.norm() < last);
                }
                last = got.norm();
            }
        }
    }
}
