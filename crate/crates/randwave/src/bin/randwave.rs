use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use randwave::io::{parse_config, run_with_workers, ExperimentKind, WORKERS_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Randomize,
    Expand,
    Solve,
    Tail,
    SmoothFit,
    Counterexample,
    Dispersive,
    Bilinear,
    Gain,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Self::Randomize => ExperimentKind::Randomize,
            Self::Expand => ExperimentKind::Expand,
            Self::Solve => ExperimentKind::Solve,
            Self::Tail => ExperimentKind::Tail,
            Self::SmoothFit => ExperimentKind::SmoothFit,
            Self::Counterexample => ExperimentKind::Counterexample,
            Self::Dispersive => ExperimentKind::Dispersive,
            Self::Bilinear => ExperimentKind::Bilinear,
            Self::Gain => ExperimentKind::Gain,
        }
    }
}

/// Run a randomized-data Schrödinger experiment described by a config file.
#[derive(Debug, Parser)]
#[command(name = "randwave", version)]
struct Cli {
    /// Experiment to run; must match the `experiment` key of the config.
    #[arg(value_enum)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("randwave: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("randwave: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if cfg.experiment != cli.command.kind() {
        eprintln!("randwave: subcommand `{}` does not match experiment `{}` of the config", cli.command.kind(), cfg.experiment);
        return ExitCode::from(2);
    }
    if let Some(seed) = cli.seed {
        cfg.random.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output = out;
    }
    for w in &cfg.warnings {
        eprintln!("randwave: warning: {w}");
    }
    match run_with_workers(&cfg, cli.workers) {
        Ok(manifest) => {
            for e in &manifest.experiments {
                let status = match (&e.error, e.passed) {
                    (Some(err), _) => format!("error: {err}"),
                    (None, Some(true)) => "pass".into(),
                    (None, Some(false)) => "fail".into(),
                    (None, None) => "done".into(),
                };
                println!("{}: {status}", e.name);
            }
            println!("{} files written to {}", manifest.files.len(), cfg.output.display());
            if manifest.has_hard_error() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("randwave: {e}");
            ExitCode::FAILURE
        }
    }
}
