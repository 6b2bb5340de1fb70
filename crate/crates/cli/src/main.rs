mod error;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::experiment::{Outcome, Overrides};

/// Finite-scale experiments on measure-theoretic equicontinuity.
#[derive(Parser)]
#[command(name = "equidyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit-ball density ratio curves for points drawn from the measure.
    Density(RunArgs),
    /// mu-LP / mu-LEP classification over several resolutions.
    Classify(RunArgs),
    /// Period and preperiod statistics keyed by (m, eps).
    Lep(RunArgs),
    /// Koopman eigenfunctions of a locally periodic base point.
    Spectral(RunArgs),
    /// Pairwise sensitivity estimates.
    Sensitivity(RunArgs),
    /// Sensitivity against equicontinuity, with a verdict.
    Dichotomy(RunArgs),
    /// A disjoint ball cover of a union of cylinders.
    Vitali(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; overrides the config. CSV goes alongside.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "EQUIDYN_THREADS")]
    threads: Option<usize>,
}

type Runner = fn(&str, &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError>;

fn run(kind: &str, runner: Runner, args: RunArgs) -> Result<Vec<PathBuf>, CliError> {
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", args.config.display())))?;
    let overrides = Overrides {
        seed: args.seed,
        out: args.out,
    };
    let (mut outcome, out) = runner(&text, &overrides)?;
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{kind}.json")));

    output::round_floats(&mut outcome.report);
    let mut json = serde_json::to_vec_pretty(&outcome.report).map_err(CliError::internal)?;
    json.push(b'\n');
    output::write_atomic(&path, &json)?;
    let mut written = vec![path.clone()];
    if let Some(table) = &outcome.table {
        let csv = output::csv_path(&path);
        output::write_atomic(&csv, &output::csv_bytes(table)?)?;
        written.push(csv);
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, runner, args): (&str, Runner, RunArgs) = match cli.command {
        Command::Density(a) => ("density", experiment::density, a),
        Command::Classify(a) => ("classify", experiment::classify, a),
        Command::Lep(a) => ("lep", experiment::lep, a),
        Command::Spectral(a) => ("spectral", experiment::spectral, a),
        Command::Sensitivity(a) => ("sensitivity", experiment::sensitivity, a),
        Command::Dichotomy(a) => ("dichotomy", experiment::dichotomy, a),
        Command::Vitali(a) => ("vitali", experiment::vitali, a),
    };
    match run(kind, runner, args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("equidyn {kind}: {e}");
            e.exit_code()
        }
    }
}
