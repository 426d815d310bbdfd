use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sparse_spectral::harness::{
    bench_convolution, bench_csv, convergence_csv, convergence_study, observed_orders, recipe,
    recipe_text, run, ExperimentConfig, Reference, RECIPES,
};
use sparse_spectral::Error;

#[derive(Parser)]
#[command(name = "sparsedyn", version, about = "Sparse spectral dynamics with soft thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report and dumps.
    Run {
        /// Config file.
        #[arg(long, conflicts_with = "recipe", required_unless_present = "recipe")]
        config: Option<PathBuf>,
        /// Bundled recipe name instead of a config file.
        #[arg(long)]
        recipe: Option<String>,
        /// Output directory, overriding `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error versus resolution for one config.
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Ascending grid sizes, e.g. 32,64,128.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
        /// `finest_dense` or `analytic`.
        #[arg(long, default_value = "finest_dense")]
        reference: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time sparse convolution against the FFT product.
    BenchConv {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        sparsities: Vec<usize>,
        #[arg(long, default_value_t = 21)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled recipes, or print one.
    Recipes { name: Option<String> },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, recipe: name, out } => {
            let mut cfg = match (config, name) {
                (Some(path), _) => ExperimentConfig::from_file(&path)?,
                (None, Some(name)) => recipe(&name)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(dir) = out {
                cfg.output_dir = Some(dir);
            }
            let outcome = run(&cfg)?;
            print!("{}", outcome.summary.to_text());
        }
        Command::Converge { config, resolutions, reference, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let reference: Reference = reference.parse()?;
            let rows = convergence_study(&cfg, &resolutions, reference)?;
            for (w, (o2, oinf)) in rows.windows(2).zip(observed_orders(&rows)) {
                log::info!("order {} -> {}: l2 {o2:.3}, linf {oinf:.3}", w[0].n_per_dim, w[1].n_per_dim);
            }
            emit(&convergence_csv(&rows), out.as_ref())?;
        }
        Command::BenchConv { sizes, sparsities, reps, seed, out } => {
            let rows = bench_convolution(&sizes, &sparsities, reps, seed)?;
            emit(&bench_csv(&rows), out.as_ref())?;
        }
        Command::Recipes { name } => match name {
            Some(n) => match recipe_text(&n) {
                Some(t) => print!("{t}"),
                None => return Err(Error::config("recipe", format!("no bundled recipe named `{n}`"))),
            },
            None => {
                for (n, _) in RECIPES {
                    println!("{n}");
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
