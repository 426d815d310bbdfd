//! Error-versus-resolution studies.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{DenseOperators, DenseSolver, ErrorMeter, ErrorPair};
use crate::grid::GridSpec;
use crate::solver::{initial_condition, step_once, Equation, Operators, SolverState};
use crate::spectral::DenseSpectrum;
use crate::CoefficientSpec;

use super::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Dense run on the finest grid; coarse results are injected into it.
    FinestDense,
    /// Closed-form solution, available for constant-coefficient convection
    /// and parabolic problems.
    Analytic,
}

impl std::str::FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finest_dense" | "finest-dense" => Ok(Reference::FinestDense),
            "analytic" => Ok(Reference::Analytic),
            other => Err(Error::config("reference", format!("unknown reference `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_per_dim: usize,
    pub dx: f64,
    pub dt: f64,
    pub lambda: f64,
    pub n_s: usize,
    pub errors: ErrorPair,
}

pub const CONVERGENCE_HEADER: &str = "n_per_dim,dx,dt,lambda,n_s,l2_error,linf_error";

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CONVERGENCE_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{},{:e},{:e}",
            r.n_per_dim, r.dx, r.dt, r.lambda, r.n_s, r.errors.l2, r.errors.linf
        );
    }
    out
}

/// Observed orders `log(e_i / e_{i+1}) / log(dx_i / dx_{i+1})` for consecutive
/// rows, as `(l2, linf)` pairs.
pub fn observed_orders(rows: &[ConvergenceRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .map(|w| {
            let h = (w[0].dx / w[1].dx).ln();
            (
                (w[0].errors.l2 / w[1].errors.l2).ln() / h,
                (w[0].errors.linf / w[1].errors.linf).ln() / h,
            )
        })
        .collect()
}

/// Time-step exponent: transport-limited problems scale `dt ∝ dx`,
/// diffusion-limited ones `dt ∝ dx²`.
fn dt_exponent(eq: Equation) -> i32 {
    if eq.diffusion_limited() {
        2
    } else {
        1
    }
}

/// The config at resolution `n`: `dt` rescaled from the config's own grid by
/// the equation's stability rule, output and baselines dropped.
pub fn config_at(config: &ExperimentConfig, n: usize) -> Result<ExperimentConfig> {
    let ratio = config.n_per_dim as f64 / n as f64;
    let mut c = config.clone();
    c.n_per_dim = n;
    c.dt = config.dt * ratio.powi(dt_exponent(config.equation));
    c.baselines.clear();
    c.output_dir = None;
    c.snapshot_times.clear();
    c.validate()
        .map_err(|e| Error::config("resolutions", format!("at n_per_dim = {n}: {e}")))?;
    Ok(c)
}

struct Level {
    config: ExperimentConfig,
    grid: GridSpec,
    lambda: f64,
    n_s: usize,
    sparse: DenseSpectrum,
    dense: Option<DenseSpectrum>,
}

fn run_level(config: ExperimentConfig, with_dense: bool) -> Result<Level> {
    let grid = config.grid()?;
    let ops = Operators::assemble(&config.params(), &grid)?;
    let lambda = config.amplitude_schedule(grid.total()).lambda_at(config.dt)?;
    let n_steps = config.n_steps();
    if n_steps > 0 {
        ops.check_stability(config.dt, config.strict_cfl)?;
    }
    let u0 = initial_condition(&config.initial, &grid, config.seed)?;
    let mut dense = if with_dense {
        Some(DenseSolver::new(DenseOperators::new(&ops), u0.to_dense(), config.dt)?)
    } else {
        None
    };
    let mut state = SolverState::new(u0, config.dt)?;
    for _ in 0..n_steps {
        step_once(&mut state, &ops, lambda, config.protect_mean)?;
        if let Some(d) = dense.as_mut() {
            d.step()?;
        }
    }
    Ok(Level {
        grid,
        lambda,
        n_s: state.current.n_s(),
        sparse: state.current.to_dense(),
        dense: dense.map(|d| d.current().clone()),
        config,
    })
}

/// Closed-form final state for constant-coefficient convection
/// (`u_t = c u_x`, translation) and heat (`u_t = ν u_xx`) problems.
fn analytic_final(config: &ExperimentConfig, grid: &GridSpec) -> Result<DenseSpectrum> {
    let c = match config.coefficient {
        CoefficientSpec::Constant(c) => c,
        other => {
            return Err(Error::config(
                "coefficient",
                format!("analytic reference needs a constant coefficient, got {other}"),
            ))
        }
    };
    let t = config.t_end;
    let u0 = initial_condition(&config.initial, grid, config.seed)?.to_dense();
    let factor = |i: usize| -> Complex64 {
        let k = grid.wavevector(i)[0] as f64 * grid.k_scale();
        match config.equation {
            Equation::Convection => Complex64::new(0.0, c * k * t).exp(),
            _ => Complex64::new((-c * k * k * t).exp(), 0.0),
        }
    };
    match config.equation {
        Equation::Convection | Equation::Parabolic => {
            let coeffs = u0.coeffs().iter().enumerate().map(|(i, z)| z * factor(i)).collect();
            DenseSpectrum::new(*grid, coeffs)
        }
        other => Err(Error::config(
            "equation",
            format!("no analytic reference for {other}"),
        )),
    }
}

/// Runs the config at every resolution (ascending, at least three) and
/// measures the final-time error of the sparse solution on the finest grid.
/// Resolutions run concurrently; the rows do not depend on scheduling.
pub fn convergence_study(
    config: &ExperimentConfig,
    resolutions: &[usize],
    reference: Reference,
) -> Result<Vec<ConvergenceRow>> {
    if resolutions.len() < 3 {
        return Err(Error::config(
            "resolutions",
            format!("need at least 3 resolutions, got {}", resolutions.len()),
        ));
    }
    if resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("resolutions", "must be strictly ascending"));
    }
    let configs = resolutions
        .iter()
        .map(|&n| config_at(config, n))
        .collect::<Result<Vec<_>>>()?;
    let last = configs.len() - 1;
    let levels: Vec<Result<Level>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let with_dense = i == last && reference == Reference::FinestDense;
                scope.spawn(move || run_level(c, with_dense))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("resolution worker panicked"))
            .collect()
    });
    let levels = levels.into_iter().collect::<Result<Vec<_>>>()?;

    let fine = &levels[last];
    let truth = match reference {
        Reference::FinestDense => fine.dense.clone().expect("finest level runs dense"),
        Reference::Analytic => analytic_final(&fine.config, &fine.grid)?,
    };
    let meter = ErrorMeter::new(&fine.grid);
    levels
        .iter()
        .map(|l| {
            let injected = l.sparse.resample(fine.grid)?;
            Ok(ConvergenceRow {
                n_per_dim: l.config.n_per_dim,
                dx: l.grid.dx(),
                dt: l.config.dt,
                lambda: l.lambda,
                n_s: l.n_s,
                errors: meter.between(&injected, &truth)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat() -> ExperimentConfig {
        "equation = parabolic\nn_per_dim = 64\ndt = 1e-3\nt_end = 0.064\ninitial = sine_low\n\
         coefficient = constant:0.5\nlambda_c = 1e-3\nlambda_p = 2\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn dt_follows_the_stability_rule() {
        let c = heat();
        let half = config_at(&c, 32).unwrap();
        assert!((half.dt - 4e-3).abs() < 1e-15);
        assert_eq!(half.n_steps(), 16);
        let mut t = c.clone();
        t.equation = Equation::Convection;
        assert!((config_at(&t, 32).unwrap().dt - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn needs_three_ascending_resolutions() {
        let c = heat();
        for bad in [&[64][..], &[32, 64], &[64, 32, 128], &[32, 32, 64]] {
            let e = convergence_study(&c, bad, Reference::Analytic).unwrap_err();
            assert!(e.is_config(), "{bad:?}: {e}");
        }
    }

    #[test]
    fn analytic_reference_needs_constant_coefficient() {
        let mut c = heat();
        c.coefficient = CoefficientSpec::OscillatoryDiffusion { freq: 4 };
        assert!(convergence_study(&c, &[16, 32, 64], Reference::Analytic).is_err());
    }

    #[test]
    fn csv_has_one_row_per_resolution() {
        let rows = convergence_study(&heat(), &[16, 32, 64], Reference::Analytic).unwrap();
        let csv = convergence_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(CONVERGENCE_HEADER));
        assert_eq!(observed_orders(&rows).len(), 2);
    }
}
