//! `power`: run regret experiments on linear-mixture MDPs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use power_mixture::format::load_instance;
use power_mixture::harness::{print_summary, run_experiment, ExperimentConfig};
use power_mixture::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "power", version, about = "Regret experiments for POWER on linear-mixture MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (seed, variant) pair of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use seeds 0..N instead of the configured list.
        #[arg(long)]
        seed_count: Option<usize>,
        /// Restrict to these variants (repeatable).
        #[arg(long = "variant")]
        variants: Vec<String>,
    },
    /// Print final regret per variant for a finished experiment.
    Summary {
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that an instance file defines a valid mixture MDP.
    ValidateInstance {
        #[arg(long)]
        file: PathBuf,
    },
}

fn fail(code: u8, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn run(config: PathBuf, out: Option<PathBuf>, seed_count: Option<usize>, variants: Vec<String>) -> ExitCode {
    let mut cfg = match ExperimentConfig::from_file(&config) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Err(e) = cfg.apply_overrides(out, seed_count, &variants) {
        return fail(EXIT_CONFIG, e);
    }
    match run_experiment(&cfg) {
        Ok(outcome) => {
            for run in outcome.manifest.runs.iter().filter(|r| !r.ok) {
                eprintln!(
                    "run {} seed {} failed: {}",
                    run.variant,
                    run.seed,
                    run.error.as_deref().unwrap_or("unknown error")
                );
            }
            println!(
                "wrote {} files to {}",
                outcome.files.len(),
                outcome.output_dir.display()
            );
            if outcome.failed_runs > 0 {
                return ExitCode::from(EXIT_RUNTIME);
            }
            match print_summary(&outcome.output_dir) {
                Ok(table) => print!("{table}"),
                Err(e) => return fail(EXIT_RUNTIME, e),
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config { .. }) => fail(EXIT_CONFIG, e),
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

fn validate(file: PathBuf) -> ExitCode {
    let (mdp, _) = match load_instance(&file) {
        Ok(parts) => parts,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = mdp.validate();
    if report.is_valid() {
        println!(
            "{}: valid (S={}, A={}, H={}, d={}, B={})",
            file.display(),
            mdp.num_states(),
            mdp.num_actions(),
            mdp.horizon(),
            mdp.dim(),
            mdp.bound()
        );
        ExitCode::SUCCESS
    } else {
        print!("{}: {report}", file.display());
        ExitCode::from(EXIT_RUNTIME)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            seed_count,
            variants,
        } => run(config, out, seed_count, variants),
        Command::Summary { out } => match print_summary(&out) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_CONFIG, e),
        },
        Command::ValidateInstance { file } => validate(file),
    }
}
