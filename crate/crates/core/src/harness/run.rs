//! Single-experiment orchestration and file output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::eval::{
    match_mode_count, DenseOperators, DenseSolver, ErrorMeter, ErrorPair, ReportRecord, RunMeta,
    RunReport,
};
use crate::grid::GridSpec;
use crate::shrink::sparsity_fraction;
use crate::solver::{initial_condition, step_once, Operators, SolverState};
use crate::sparse::SparseSpectrum;
use crate::spectral::{dft_inverse, DenseSpectrum, SpatialField};

use super::config::{Baseline, ExperimentConfig};

/// Headline numbers of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_steps: usize,
    pub lambda: f64,
    pub final_n_s: usize,
    pub final_sparsity: f64,
    /// Final sparse-vs-dense errors divided by the dense solution's norms.
    pub relative_error: Option<ErrorPair>,
    pub low_frequency_cutoff: Option<i64>,
    pub low_frequency_relative_error: Option<ErrorPair>,
    pub sparse_seconds_per_step: f64,
    pub dense_seconds_per_step: Option<f64>,
}

impl RunSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |e: Option<ErrorPair>| e.map_or(("none".into(), "none".into()), |e| {
            (format!("{:e}", e.l2), format!("{:e}", e.linf))
        });
        let (rl2, rlinf) = opt(self.relative_error);
        let (ll2, llinf) = opt(self.low_frequency_relative_error);
        let _ = writeln!(s, "n_steps = {}", self.n_steps);
        let _ = writeln!(s, "lambda = {:e}", self.lambda);
        let _ = writeln!(s, "final_n_s = {}", self.final_n_s);
        let _ = writeln!(s, "final_sparsity_fraction = {}", self.final_sparsity);
        let _ = writeln!(s, "relative_l2_error = {rl2}");
        let _ = writeln!(s, "relative_linf_error = {rlinf}");
        match self.low_frequency_cutoff {
            Some(k) => {
                let _ = writeln!(s, "low_frequency_cutoff = {k}");
            }
            None => {
                let _ = writeln!(s, "low_frequency_cutoff = none");
            }
        }
        let _ = writeln!(s, "low_frequency_relative_l2_error = {ll2}");
        let _ = writeln!(s, "low_frequency_relative_linf_error = {llinf}");
        let _ = writeln!(s, "sparse_seconds_per_step = {:e}", self.sparse_seconds_per_step);
        if let Some(d) = self.dense_seconds_per_step {
            let _ = writeln!(s, "dense_seconds_per_step = {d:e}");
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub low_frequency: Option<RunReport>,
    pub final_state: SparseSpectrum,
    pub summary: RunSummary,
}

fn relative(e: ErrorPair, norm: ErrorPair) -> ErrorPair {
    let div = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    ErrorPair {
        l2: div(e.l2, norm.l2),
        linf: div(e.linf, norm.linf),
    }
}

fn per_step(total: Duration, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total.as_secs_f64() / n as f64
    }
}

fn dense_record(step: usize, dt: f64, spec: &DenseSpectrum, errors: Option<ErrorPair>) -> ReportRecord {
    let n_s = spec.coeffs().iter().filter(|z| z.norm() > 0.0).count();
    ReportRecord {
        step,
        time: step as f64 * dt,
        n_s,
        sparsity_fraction: n_s as f64 / spec.grid().total() as f64,
        errors,
        mean: spec.mean(),
    }
}

/// Spatial samples as `x,u` or `x,y,u` rows in grid order.
pub fn spatial_dump(field: &SpatialField) -> String {
    let g = field.grid();
    let mut out = String::new();
    out.push_str(if g.dims() == 1 { "x,u\n" } else { "x,y,u\n" });
    for (i, u) in field.values().iter().enumerate() {
        let p = g.point(i);
        if g.dims() == 1 {
            let _ = writeln!(out, "{},{u:e}", p[0]);
        } else {
            let _ = writeln!(out, "{},{},{u:e}", p[0], p[1]);
        }
    }
    out
}

struct Writer<'a> {
    dir: Option<&'a Path>,
}

impl Writer<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(d) = self.dir {
            fs::write(d.join(name), contents)?;
        }
        Ok(())
    }

    fn active(&self) -> bool {
        self.dir.is_some()
    }
}

fn snapshot_steps(config: &ExperimentConfig) -> BTreeSet<usize> {
    let n = config.n_steps();
    let mut steps: BTreeSet<usize> = config
        .snapshot_times
        .iter()
        .map(|t| ((t / config.dt).round() as usize).min(n))
        .collect();
    steps.insert(n);
    steps
}

/// Runs the sparse solver with the requested baselines. Files go to
/// `config.output_dir` when it is set.
///
/// Requesting `low_frequency` implies the dense reference as well, since its
/// errors are measured against it. Everything written except `summary.txt`
/// (which carries timings) is a deterministic function of the config.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let dir = config.output_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let out = Writer { dir };
    let mut stored = config.clone();
    stored.output_dir = None;
    out.write("config.conf", &stored.to_config_string())?;

    let grid = config.grid()?;
    let ops = Operators::assemble(&config.params(), &grid)?;
    let n_steps = config.n_steps();
    let schedule = config.amplitude_schedule(grid.total());
    let lambda = schedule.lambda_at(config.dt)?;
    if n_steps > 0 {
        ops.check_stability(config.dt, config.strict_cfl)?;
    }
    let snapshots = snapshot_steps(config);
    let want_dense = config.wants(Baseline::Dense) || config.wants(Baseline::LowFrequency);

    let raw = initial_condition(&config.initial, &grid, config.seed)?;
    let initial_dense = raw.to_dense();
    let mut state = SolverState::new(raw, config.dt)?;
    let mut dense = if want_dense {
        Some(DenseSolver::new(DenseOperators::new(&ops), initial_dense.clone(), config.dt)?)
    } else {
        None
    };
    let meter = ErrorMeter::new(&grid);

    let mut report = RunReport::new(RunMeta {
        equation: config.equation.to_string(),
        grid,
        dt: config.dt,
        lambda_rule: schedule.to_string(),
        lambda,
        seconds_per_step: 0.0,
    });
    let mut sparse_time = Duration::ZERO;
    let mut dense_time = Duration::ZERO;
    let mut last_norm = ErrorPair::default();
    let mut last_error = None;

    let mut observe = |state: &SolverState, dense: Option<&DenseSolver>, report: &mut RunReport| -> Result<()> {
        let step = state.step_index;
        let errors = match dense {
            Some(d) => {
                let e = meter.between(&state.current.to_dense(), d.current())?;
                if step == n_steps {
                    last_norm = meter.norms(d.current())?;
                    last_error = Some(e);
                }
                Some(e)
            }
            None => None,
        };
        report.records.push(ReportRecord {
            step,
            time: state.time(),
            n_s: state.current.n_s(),
            sparsity_fraction: sparsity_fraction(&state.current),
            errors,
            mean: state.current.mean(),
        });
        if out.active() && snapshots.contains(&step) {
            write_snapshot(&out, "sparse", step, &state.current.to_dense(), Some(&state.current))?;
            if let Some(d) = dense {
                write_snapshot(&out, "dense", step, d.current(), None)?;
            }
        }
        Ok(())
    };

    observe(&state, dense.as_ref(), &mut report)?;
    for _ in 0..n_steps {
        let t0 = Instant::now();
        step_once(&mut state, &ops, lambda, config.protect_mean)?;
        sparse_time += t0.elapsed();
        if let Some(d) = dense.as_mut() {
            let t0 = Instant::now();
            d.step()?;
            dense_time += t0.elapsed();
        }
        observe(&state, dense.as_ref(), &mut report)?;
    }
    report.meta.seconds_per_step = per_step(sparse_time, n_steps);
    out.write("report.csv", &report.to_csv())?;

    let mut summary = RunSummary {
        n_steps,
        lambda,
        final_n_s: state.current.n_s(),
        final_sparsity: sparsity_fraction(&state.current),
        relative_error: last_error.map(|e| relative(e, last_norm)),
        low_frequency_cutoff: None,
        low_frequency_relative_error: None,
        sparse_seconds_per_step: report.meta.seconds_per_step,
        dense_seconds_per_step: want_dense.then(|| per_step(dense_time, n_steps)),
    };

    let low_frequency = if config.wants(Baseline::LowFrequency) {
        let cutoff = match_mode_count(&report);
        let (lf, rel) = run_low_frequency(config, &ops, &grid, &initial_dense, cutoff, &out)?;
        summary.low_frequency_cutoff = Some(cutoff);
        summary.low_frequency_relative_error = rel;
        out.write("low_frequency_report.csv", &lf.to_csv())?;
        Some(lf)
    } else {
        None
    };
    out.write("summary.txt", &summary.to_text())?;

    Ok(RunOutcome {
        report,
        low_frequency,
        final_state: state.current,
        summary,
    })
}

fn run_low_frequency(
    config: &ExperimentConfig,
    ops: &Operators,
    grid: &GridSpec,
    initial: &DenseSpectrum,
    cutoff: i64,
    out: &Writer<'_>,
) -> Result<(RunReport, Option<ErrorPair>)> {
    let n_steps = config.n_steps();
    let meter = ErrorMeter::new(grid);
    let dense_ops = DenseOperators::new(ops);
    let mut dense = DenseSolver::new(dense_ops.clone(), initial.clone(), config.dt)?;
    let mut lf = DenseSolver::low_frequency(dense_ops, initial.clone(), config.dt, cutoff)?;
    let mut report = RunReport::new(RunMeta {
        equation: config.equation.to_string(),
        grid: *grid,
        dt: config.dt,
        lambda_rule: format!("low_frequency(K={cutoff})"),
        lambda: 0.0,
        seconds_per_step: 0.0,
    });
    let mut elapsed = Duration::ZERO;
    let e = meter.between(lf.current(), dense.current())?;
    report.records.push(dense_record(0, config.dt, lf.current(), Some(e)));
    for step in 1..=n_steps {
        let t0 = Instant::now();
        lf.step()?;
        elapsed += t0.elapsed();
        dense.step()?;
        let e = meter.between(lf.current(), dense.current())?;
        report.records.push(dense_record(step, config.dt, lf.current(), Some(e)));
    }
    report.meta.seconds_per_step = per_step(elapsed, n_steps);
    if out.active() {
        write_snapshot(out, "low_frequency", n_steps, lf.current(), None)?;
    }
    let rel = report
        .records
        .last()
        .and_then(|r| r.errors)
        .map(|e| meter.norms(dense.current()).map(|n| relative(e, n)))
        .transpose()?;
    Ok((report, rel))
}

fn write_snapshot(
    out: &Writer<'_>,
    tag: &str,
    step: usize,
    spec: &DenseSpectrum,
    sparse: Option<&SparseSpectrum>,
) -> Result<()> {
    if let Some(s) = sparse {
        out.write(&format!("{tag}_spectrum_{step:06}.txt"), &s.to_dump())?;
    }
    let field = dft_inverse(spec).map_err(|e| e.at_step(step))?;
    out.write(&format!("{tag}_field_{step:06}.csv"), &spatial_dump(&field))
}

/// Reads a config file, overrides the output directory if asked, and runs it.
pub fn run_file(path: &Path, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let mut config = ExperimentConfig::from_file(path)?;
    if let Some(d) = out_dir {
        config.output_dir = Some(d.to_path_buf());
    }
    run(&config)
}
