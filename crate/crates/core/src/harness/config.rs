//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment, unknown or repeated keys are
//! errors. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `equation` | `convection`, `parabolic`, `burgers`, `vorticity` | required |
//! | `dims` | 1 or 2 | from the equation |
//! | `n_per_dim` | grid points per dimension | required |
//! | `domain_length` | period per dimension | 2π |
//! | `dt`, `t_end` | time step and final time | required |
//! | `lambda_mode` | `fixed` or `power_law` | inferred |
//! | `lambda` | fixed shrinkage parameter | 0 |
//! | `lambda_c`, `lambda_p` | `λ = c dt^p` | |
//! | `lambda_units` | `amplitude` or `unnormalized` (λ / N_total) | `amplitude` |
//! | `coefficient` | a(x), see [`CoefficientSpec`] | `constant:1` |
//! | `forcing` | vorticity source | `constant:0` |
//! | `gamma` | vorticity viscosity | 0 |
//! | `initial` | see [`InitialSpec`] | required |
//! | `protect_mean` | exempt k = 0 from shrinkage | false |
//! | `baselines` | comma list of `dense`, `low_frequency`, or `none` | none |
//! | `output_dir` | where `run` writes files, `none` for no files | none |
//! | `snapshot_times` | comma list of times for dumps | final time only |
//! | `seed` | RNG seed for randomized initial data | 42 |
//! | `strict_cfl` | stability guard violations are errors | false |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::coefficient::CoefficientSpec;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::shrink::LambdaSchedule;
use crate::solver::{Equation, EquationParams, InitialSpec};

/// Tolerance on `t_end / dt` being an integer.
pub const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaUnits {
    /// λ compares directly with coefficient amplitudes.
    Amplitude,
    /// λ is stated for unnormalized DFT coefficients and is divided by
    /// `N_total` before use.
    Unnormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Baseline {
    Dense,
    LowFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub equation: Equation,
    pub dims: usize,
    pub n_per_dim: usize,
    pub domain_length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub lambda: LambdaSchedule,
    pub lambda_units: LambdaUnits,
    pub coefficient: CoefficientSpec,
    pub forcing: CoefficientSpec,
    pub gamma: f64,
    pub initial: InitialSpec,
    pub protect_mean: bool,
    pub baselines: Vec<Baseline>,
    pub output_dir: Option<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub seed: u64,
    pub strict_cfl: bool,
}

const KEYS: &[&str] = &[
    "equation",
    "dims",
    "n_per_dim",
    "domain_length",
    "dt",
    "t_end",
    "lambda_mode",
    "lambda",
    "lambda_c",
    "lambda_p",
    "lambda_units",
    "coefficient",
    "forcing",
    "gamma",
    "initial",
    "protect_mean",
    "baselines",
    "output_dir",
    "snapshot_times",
    "seed",
    "strict_cfl",
];

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(key, format!("cannot parse `{v}`: {e}"))),
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(key, format!("expected true or false, got `{v}`"))),
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::config(key, format!("cannot parse list item `{s}`")))
        })
        .collect()
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", ln + 1), "expected `key = value`")
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if map.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "key given twice"));
            }
        }
        let mut f = Fields(map);

        let equation: Equation = f
            .required("equation")?
            .parse()
            .map_err(|e: String| Error::config("equation", e))?;
        let dims = f.parsed::<usize>("dims")?.unwrap_or(equation.dims());
        let n_per_dim = f
            .required("n_per_dim")?
            .parse::<usize>()
            .map_err(|_| Error::config("n_per_dim", "expected a positive integer"))?;
        let domain_length = f
            .parsed::<f64>("domain_length")?
            .unwrap_or(2.0 * std::f64::consts::PI);
        let dt = f
            .required("dt")?
            .parse::<f64>()
            .map_err(|_| Error::config("dt", "expected a number"))?;
        let t_end = f
            .required("t_end")?
            .parse::<f64>()
            .map_err(|_| Error::config("t_end", "expected a number"))?;

        let mode = f.take("lambda_mode");
        let fixed = f.parsed::<f64>("lambda")?;
        let c = f.parsed::<f64>("lambda_c")?;
        let p = f.parsed::<f64>("lambda_p")?;
        let mode = mode.unwrap_or_else(|| {
            if c.is_some() || p.is_some() {
                "power_law".into()
            } else {
                "fixed".into()
            }
        });
        let lambda = match mode.as_str() {
            "fixed" => {
                if c.is_some() || p.is_some() {
                    return Err(Error::config("lambda_c", "not used with lambda_mode = fixed"));
                }
                LambdaSchedule::fixed(fixed.unwrap_or(0.0))
                    .map_err(|e| Error::config("lambda", e.to_string()))?
            }
            "power_law" => {
                if fixed.is_some() {
                    return Err(Error::config("lambda", "not used with lambda_mode = power_law"));
                }
                let c = c.ok_or_else(|| Error::config("lambda_c", "required for power_law"))?;
                let p = p.ok_or_else(|| Error::config("lambda_p", "required for power_law"))?;
                LambdaSchedule::power_law(c, p)
                    .map_err(|e| Error::config("lambda_p", e.to_string()))?
            }
            other => {
                return Err(Error::config(
                    "lambda_mode",
                    format!("expected fixed or power_law, got `{other}`"),
                ))
            }
        };
        let lambda_units = match f.take("lambda_units").as_deref() {
            None | Some("amplitude") => LambdaUnits::Amplitude,
            Some("unnormalized") => LambdaUnits::Unnormalized,
            Some(other) => {
                return Err(Error::config(
                    "lambda_units",
                    format!("expected amplitude or unnormalized, got `{other}`"),
                ))
            }
        };

        let coefficient = f
            .parsed::<CoefficientSpec>("coefficient")?
            .unwrap_or(CoefficientSpec::Constant(1.0));
        let forcing = f
            .parsed::<CoefficientSpec>("forcing")?
            .unwrap_or(CoefficientSpec::Constant(0.0));
        let gamma = f.parsed::<f64>("gamma")?.unwrap_or(0.0);
        let initial: InitialSpec = f
            .required("initial")?
            .parse()
            .map_err(|e: Error| Error::config("initial", e.to_string()))?;
        let protect_mean = match f.take("protect_mean") {
            Some(v) => parse_bool("protect_mean", &v)?,
            None => false,
        };
        let baselines = match f.take("baselines") {
            None => Vec::new(),
            Some(v) if v == "none" || v.is_empty() => Vec::new(),
            Some(v) => {
                let mut out = Vec::new();
                for item in v.split(',').map(str::trim) {
                    let b = match item {
                        "dense" => Baseline::Dense,
                        "low_frequency" => Baseline::LowFrequency,
                        other => {
                            return Err(Error::config(
                                "baselines",
                                format!("unknown baseline `{other}`"),
                            ))
                        }
                    };
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
                out.sort();
                out
            }
        };
        let output_dir = match f.take("output_dir") {
            None => None,
            Some(v) if v == "none" || v.is_empty() => None,
            Some(v) => Some(PathBuf::from(v)),
        };
        let snapshot_times = match f.take("snapshot_times") {
            None => Vec::new(),
            Some(v) => parse_list::<f64>("snapshot_times", &v)?,
        };
        let seed = f.parsed::<u64>("seed")?.unwrap_or(42);
        let strict_cfl = match f.take("strict_cfl") {
            Some(v) => parse_bool("strict_cfl", &v)?,
            None => false,
        };
        debug_assert!(f.0.is_empty());

        let config = ExperimentConfig {
            equation,
            dims,
            n_per_dim,
            domain_length,
            dt,
            t_end,
            lambda,
            lambda_units,
            coefficient,
            forcing,
            gamma,
            initial,
            protect_mean,
            baselines,
            output_dir,
            snapshot_times,
            seed,
            strict_cfl,
        };
        config.validate()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims != self.equation.dims() {
            return Err(Error::config(
                "dims",
                format!("{} requires dims = {}", self.equation, self.equation.dims()),
            ));
        }
        GridSpec::new(self.dims, self.n_per_dim, self.domain_length)
            .map_err(|e| Error::config("n_per_dim", e.to_string()))?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", "must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("t_end", "must be >= 0"));
        }
        let ratio = self.t_end / self.dt;
        if (ratio - ratio.round()).abs() > STEP_TOLERANCE * ratio.max(1.0) {
            return Err(Error::config(
                "t_end",
                format!("t_end / dt = {ratio} is not an integer"),
            ));
        }
        if self.equation == Equation::Vorticity2D && !(self.gamma > 0.0) {
            return Err(Error::config("gamma", "must be positive for vorticity"));
        }
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_end * (1.0 + STEP_TOLERANCE)).contains(&t) {
                return Err(Error::config(
                    "snapshot_times",
                    format!("{t} is outside [0, t_end]"),
                ));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dims, self.n_per_dim, self.domain_length)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn params(&self) -> EquationParams {
        EquationParams {
            equation: self.equation,
            coeff: self.coefficient,
            gamma: self.gamma,
            forcing: self.forcing,
        }
    }

    /// Shrinkage schedule in amplitude units for a grid with `total` points.
    pub fn amplitude_schedule(&self, total: usize) -> LambdaSchedule {
        match self.lambda_units {
            LambdaUnits::Amplitude => self.lambda,
            LambdaUnits::Unnormalized => self.lambda.scaled(1.0 / total as f64),
        }
    }

    pub fn wants(&self, b: Baseline) -> bool {
        self.baselines.contains(&b)
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("equation", self.equation.to_string());
        kv("dims", self.dims.to_string());
        kv("n_per_dim", self.n_per_dim.to_string());
        kv("domain_length", self.domain_length.to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        match self.lambda {
            LambdaSchedule::Fixed(l) => {
                kv("lambda_mode", "fixed".into());
                kv("lambda", l.to_string());
            }
            LambdaSchedule::PowerLaw { c, p } => {
                kv("lambda_mode", "power_law".into());
                kv("lambda_c", c.to_string());
                kv("lambda_p", p.to_string());
            }
        }
        kv(
            "lambda_units",
            match self.lambda_units {
                LambdaUnits::Amplitude => "amplitude",
                LambdaUnits::Unnormalized => "unnormalized",
            }
            .into(),
        );
        kv("coefficient", self.coefficient.to_string());
        kv("forcing", self.forcing.to_string());
        kv("gamma", self.gamma.to_string());
        kv("initial", self.initial.to_string());
        kv("protect_mean", self.protect_mean.to_string());
        let baselines: Vec<&str> = self
            .baselines
            .iter()
            .map(|b| match b {
                Baseline::Dense => "dense",
                Baseline::LowFrequency => "low_frequency",
            })
            .collect();
        kv(
            "baselines",
            if baselines.is_empty() {
                "none".into()
            } else {
                baselines.join(",")
            },
        );
        kv(
            "output_dir",
            self.output_dir
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
        );
        let snaps: Vec<String> = self.snapshot_times.iter().map(|t| t.to_string()).collect();
        kv("snapshot_times", snaps.join(","));
        kv("seed", self.seed.to_string());
        kv("strict_cfl", self.strict_cfl.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# heat equation
equation = parabolic
n_per_dim = 64
dt = 1e-4
t_end = 0.01   # 100 steps
initial = sine_low
";

    #[test]
    fn minimal_config_defaults() {
        let c: ExperimentConfig = MINIMAL.parse().unwrap();
        assert_eq!(c.equation, Equation::Parabolic);
        assert_eq!(c.dims, 1);
        assert_eq!(c.n_steps(), 100);
        assert_eq!(c.lambda, LambdaSchedule::Fixed(0.0));
        assert_eq!(c.seed, 42);
        assert!(c.baselines.is_empty());
        assert_eq!(c.output_dir, None);
    }

    #[test]
    fn serialization_is_a_fixpoint() {
        let c: ExperimentConfig = MINIMAL.parse().unwrap();
        let text = c.to_config_string();
        let back: ExperimentConfig = text.parse().unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_config_string(), text);
    }

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        let bad_eq = MINIMAL.replace("parabolic", "wave");
        assert_eq!(field_of(bad_eq.parse::<ExperimentConfig>().unwrap_err()), "equation");
        let unknown = format!("{MINIMAL}colour = blue\n");
        assert_eq!(field_of(unknown.parse::<ExperimentConfig>().unwrap_err()), "colour");
        let twice = format!("{MINIMAL}dt = 1e-4\n");
        assert_eq!(field_of(twice.parse::<ExperimentConfig>().unwrap_err()), "dt");
        let ragged = MINIMAL.replace("t_end = 0.01", "t_end = 0.01005");
        assert_eq!(field_of(ragged.parse::<ExperimentConfig>().unwrap_err()), "t_end");
        let missing = MINIMAL.replace("initial = sine_low\n", "");
        assert_eq!(field_of(missing.parse::<ExperimentConfig>().unwrap_err()), "initial");
        let bad_init = MINIMAL.replace("sine_low", "square");
        assert_eq!(field_of(bad_init.parse::<ExperimentConfig>().unwrap_err()), "initial");
        let mixed = format!("{MINIMAL}lambda = 1e-3\nlambda_c = 1\nlambda_p = 2\n");
        assert!(mixed.parse::<ExperimentConfig>().is_err());
        let grid = MINIMAL.replace("64", "48");
        assert_eq!(field_of(grid.parse::<ExperimentConfig>().unwrap_err()), "n_per_dim");
        let vort = "equation = vorticity\nn_per_dim = 32\ndt = 0.1\nt_end = 1\ninitial = two_vortices\n";
        assert_eq!(field_of(vort.parse::<ExperimentConfig>().unwrap_err()), "gamma");
    }

    #[test]
    fn power_law_and_units() {
        let text = format!("{MINIMAL}lambda_c = 2\nlambda_p = 2\nlambda_units = unnormalized\n");
        let c: ExperimentConfig = text.parse().unwrap();
        assert_eq!(c.lambda, LambdaSchedule::PowerLaw { c: 2.0, p: 2.0 });
        let s = c.amplitude_schedule(64);
        assert_eq!(s, LambdaSchedule::PowerLaw { c: 2.0 / 64.0, p: 2.0 });
    }

    #[test]
    fn zero_end_time_is_allowed() {
        let c: ExperimentConfig = MINIMAL.replace("t_end = 0.01", "t_end = 0").parse().unwrap();
        assert_eq!(c.n_steps(), 0);
    }
}
