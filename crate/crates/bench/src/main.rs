use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rab_core::beamforming::Method;
use rab_core::harness::oracle::{run_suite, SUITES};
use rab_core::harness::{aggregate, emit_results, sweep_snapshots, sweep_snr, ExperimentConfig};

#[derive(Parser)]
#[command(name = "rab-bench", version, about = "Monte-Carlo SINR benchmark for robust adaptive beamformers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    /// Output SINR against input SNR.
    Snr,
    /// Output SINR against the number of snapshots.
    Snapshots,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write trials.csv, aggregate.csv and a plot script.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated list, e.g. optimal,proposed,smi
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Load and validate a config file, then print it with defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print reference values computed directly from the model.
    Oracle {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(config: Option<&PathBuf>) -> Result<ExperimentConfig> {
    match config {
        Some(p) => ExperimentConfig::from_path(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(ExperimentConfig::default()),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, experiment, out, trials, seed, methods } => {
            let mut cfg = load(config.as_ref())?;
            if let Some(t) = trials {
                cfg.num_trials = t;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(ms) = methods {
                cfg.methods = ms.iter().map(|m| m.parse::<Method>()).collect::<Result<_, _>>()?;
            }
            cfg.validate()?;

            let start = Instant::now();
            let table = match experiment {
                Experiment::Snr => sweep_snr(&cfg)?,
                Experiment::Snapshots => sweep_snapshots(&cfg)?,
            };
            let files = emit_results(&table, &out)?;
            eprintln!("{} rows in {:.1}s", table.rows.len(), start.elapsed().as_secs_f64());
            println!("{:<12} {:>8} {:>12} {:>12} {:>8}", "method", "x", "mean_db", "db_of_mean", "std_db");
            for a in aggregate(&table) {
                println!(
                    "{:<12} {:>8} {:>12.3} {:>12.3} {:>8.3}",
                    a.method.as_str(),
                    a.x,
                    a.mean_sinr_db,
                    a.db_of_mean,
                    a.std_db
                );
            }
            eprintln!("wrote {}, {}, {}", files.trials.display(), files.aggregate.display(), files.plot_script.display());
        }
        Command::Validate { config } => {
            let cfg = load(Some(&config))?;
            println!("{}", cfg.to_json_string()?);
        }
        Command::Oracle { suite, config } => {
            let cfg = load(config.as_ref())?;
            let values = run_suite(&suite, &cfg).with_context(|| format!("suites: {}", SUITES.join(", ")))?;
            for v in values {
                println!("{:<52} {:>14.6e}", v.name, v.value);
            }
        }
    }
    Ok(())
}
