//! Experiment configuration, orchestration and file output.

pub mod bench;
pub mod config;
pub mod converge;
pub mod recipes;
pub mod run;

pub use bench::{bench_convolution, bench_csv, BenchRow};
pub use config::{Baseline, ExperimentConfig, LambdaUnits};
pub use converge::{convergence_csv, convergence_study, observed_orders, ConvergenceRow, Reference};
pub use recipes::{recipe, recipe_text, RECIPES};
pub use run::{run, run_file, spatial_dump, RunOutcome, RunSummary};
