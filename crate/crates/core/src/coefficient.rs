//! Closed-form coefficients and forcings of the model problems.
//!
//! Each oscillatory family takes a base frequency `f`; the default values
//! are the ones used by the bundled recipes, smaller values give desk-scale
//! variants that are resolved on coarse grids. Formulas are written for the
//! 2π-periodic box; on other domains `x` is rescaled to keep them periodic.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::spectral::{dft_forward, DenseSpectrum, SpatialField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientSpec {
    Constant(f64),
    /// `¼ exp((0.6 + 0.2 cos x) / (1 + 0.7 sin(f x)))`, default `f = 64`.
    OscillatoryConvection { freq: usize },
    /// `⅒ exp((0.6 + 0.2 cos x) / (1 + 0.7 sin(f x)))`, default `f = 256`.
    OscillatoryDiffusion { freq: usize },
    /// `0.075 exp((0.65 + 0.2 cos x) / (1 + 0.7 sin(f x)))`, default `f = 128`.
    OscillatoryBurgers { freq: usize },
    /// `0.025 (sin(f x) + sin(f y)) / (1 + ¼ (cos(2f x) + cos(2f y)))`,
    /// default `f = 32`.
    OscillatoryForcing { freq: usize },
}

impl CoefficientSpec {
    pub const CONVECTION: Self = CoefficientSpec::OscillatoryConvection { freq: 64 };
    pub const DIFFUSION: Self = CoefficientSpec::OscillatoryDiffusion { freq: 256 };
    pub const BURGERS: Self = CoefficientSpec::OscillatoryBurgers { freq: 128 };
    pub const FORCING: Self = CoefficientSpec::OscillatoryForcing { freq: 32 };

    /// Highest frequency appearing explicitly in the formula.
    pub fn max_frequency(&self) -> usize {
        match *self {
            CoefficientSpec::Constant(_) => 0,
            CoefficientSpec::OscillatoryConvection { freq }
            | CoefficientSpec::OscillatoryDiffusion { freq }
            | CoefficientSpec::OscillatoryBurgers { freq } => freq,
            CoefficientSpec::OscillatoryForcing { freq } => 2 * freq,
        }
    }

    /// Value at a point of the 2π-periodic box.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let modulated = |scale: f64, base: f64, freq: usize| {
            scale * ((base + 0.2 * x.cos()) / (1.0 + 0.7 * (freq as f64 * x).sin())).exp()
        };
        match *self {
            CoefficientSpec::Constant(c) => c,
            CoefficientSpec::OscillatoryConvection { freq } => modulated(0.25, 0.6, freq),
            CoefficientSpec::OscillatoryDiffusion { freq } => modulated(0.1, 0.6, freq),
            CoefficientSpec::OscillatoryBurgers { freq } => modulated(0.075, 0.65, freq),
            CoefficientSpec::OscillatoryForcing { freq } => {
                let f = freq as f64;
                0.025 * ((f * x).sin() + (f * y).sin())
                    / (1.0 + 0.25 * ((2.0 * f * x).cos() + (2.0 * f * y).cos()))
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CoefficientSpec::Constant(_) => "constant",
            CoefficientSpec::OscillatoryConvection { .. } => "oscillatory_convection",
            CoefficientSpec::OscillatoryDiffusion { .. } => "oscillatory_diffusion",
            CoefficientSpec::OscillatoryBurgers { .. } => "oscillatory_burgers",
            CoefficientSpec::OscillatoryForcing { .. } => "oscillatory_forcing",
        }
    }

    fn default_freq(&self) -> usize {
        match *self {
            CoefficientSpec::Constant(_) => 0,
            CoefficientSpec::OscillatoryConvection { .. } => 64,
            CoefficientSpec::OscillatoryDiffusion { .. } => 256,
            CoefficientSpec::OscillatoryBurgers { .. } => 128,
            CoefficientSpec::OscillatoryForcing { .. } => 32,
        }
    }
}

impl fmt::Display for CoefficientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoefficientSpec::Constant(c) => write!(f, "constant:{c}"),
            _ => {
                let freq = self.max_frequency()
                    / if matches!(self, CoefficientSpec::OscillatoryForcing { .. }) {
                        2
                    } else {
                        1
                    };
                if freq == self.default_freq() {
                    write!(f, "{}", self.name())
                } else {
                    write!(f, "{}:{freq}", self.name())
                }
            }
        }
    }
}

impl FromStr for CoefficientSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let freq = |default: usize| -> std::result::Result<usize, String> {
            match arg {
                None => Ok(default),
                Some(a) => match a.parse::<usize>() {
                    Ok(v) if v > 0 => Ok(v),
                    _ => Err(format!("frequency must be a positive integer, got `{a}`")),
                },
            }
        };
        match name {
            "constant" => {
                let a = arg.ok_or("constant needs a value, e.g. `constant:0.5`")?;
                let c = a
                    .parse::<f64>()
                    .map_err(|_| format!("invalid constant `{a}`"))?;
                if !c.is_finite() {
                    return Err(format!("invalid constant `{a}`"));
                }
                Ok(CoefficientSpec::Constant(c))
            }
            "oscillatory_convection" => Ok(CoefficientSpec::OscillatoryConvection { freq: freq(64)? }),
            "oscillatory_diffusion" => Ok(CoefficientSpec::OscillatoryDiffusion { freq: freq(256)? }),
            "oscillatory_burgers" => Ok(CoefficientSpec::OscillatoryBurgers { freq: freq(128)? }),
            "oscillatory_forcing" => Ok(CoefficientSpec::OscillatoryForcing { freq: freq(32)? }),
            other => Err(format!("unknown coefficient `{other}`")),
        }
    }
}

/// Samples the coefficient on the grid after checking that its explicit
/// frequencies are resolved.
pub fn sample_coefficient(spec: &CoefficientSpec, grid: &GridSpec) -> Result<SpatialField> {
    let frequency = spec.max_frequency();
    if grid.n_per_dim() <= 2 * frequency {
        return Err(Error::UnderResolved {
            n: grid.n_per_dim(),
            frequency,
        });
    }
    let to_box = 2.0 * PI / grid.domain_length();
    Ok(SpatialField::from_fn(*grid, |x, y| {
        spec.eval(x * to_box, y * to_box)
    }))
}

pub fn coefficient_field_of(spec: &CoefficientSpec, grid: &GridSpec) -> Result<DenseSpectrum> {
    if let CoefficientSpec::Constant(c) = *spec {
        let mut out = DenseSpectrum::zeros(*grid);
        out.coeffs_mut()[0].re = c;
        return Ok(out);
    }
    Ok(dft_forward(&sample_coefficient(spec, grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "constant:0.5",
            "constant:-2",
            "oscillatory_convection",
            "oscillatory_convection:8",
            "oscillatory_diffusion",
            "oscillatory_burgers:32",
            "oscillatory_forcing",
            "oscillatory_forcing:4",
        ] {
            let spec: CoefficientSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<CoefficientSpec>().unwrap(), spec);
        }
        assert!("constant".parse::<CoefficientSpec>().is_err());
        assert!("oscillatory_convection:0".parse::<CoefficientSpec>().is_err());
        assert!("bogus".parse::<CoefficientSpec>().is_err());
    }

    #[test]
    fn constant_is_mean_only() {
        let g = GridSpec::periodic(2, 8).unwrap();
        let s = coefficient_field_of(&CoefficientSpec::Constant(1.5), &g).unwrap();
        assert_eq!(s.mean().re, 1.5);
        assert!(s.coeffs()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn under_resolved_grids_are_rejected() {
        let g = GridSpec::periodic(1, 128).unwrap();
        assert!(matches!(
            coefficient_field_of(&CoefficientSpec::CONVECTION, &g),
            Err(Error::UnderResolved { n: 128, frequency: 64 })
        ));
        let g2 = GridSpec::periodic(2, 128).unwrap();
        assert!(coefficient_field_of(&CoefficientSpec::FORCING, &g2).is_err());
    }

    #[test]
    fn convection_coefficient_is_real_and_positive() {
        let g = GridSpec::periodic(1, 512).unwrap();
        let a = sample_coefficient(&CoefficientSpec::CONVECTION, &g).unwrap();
        assert!(a.values().iter().all(|&v| v > 0.0));
        let spec = coefficient_field_of(&CoefficientSpec::CONVECTION, &g).unwrap();
        assert!(spec.hermitian_defect() < 1e-12);
    }

    #[test]
    fn forcing_regression_values() {
        let g = GridSpec::periodic(2, 256).unwrap();
        let f = sample_coefficient(&CoefficientSpec::FORCING, &g).unwrap();
        let max = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Direct sampling of the closed form at 256² (computed independently).
        assert!((max - FORCING_MAX_ABS_256).abs() < 1e-12, "max |f| = {max:.17}");

        let spec = coefficient_field_of(&CoefficientSpec::FORCING, &g).unwrap();
        assert!(spec.mean().norm() < 1e-15);
        // sin(32x) dominates along the x axis.
        assert!(spec.at([32, 0]).norm() > 1e-3);
        assert!(spec.at([1, 0]).norm() < 1e-15);
        // every active x-wavenumber is a multiple of 32
        for (i, z) in spec.coeffs().iter().enumerate() {
            if z.norm() > 1e-12 {
                let k = g.wavevector(i);
                assert_eq!(k[0] % 32, 0);
                assert_eq!(k[1] % 32, 0);
            }
        }
    }

    const FORCING_MAX_ABS_256: f64 = 0.1;
}
