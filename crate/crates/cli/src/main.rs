use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use twomem::harness::{self, ExperimentConfig};
use twomem::Error;

/// Seeded runs, reports and ablations for the two-memory agent.
#[derive(Debug, Parser)]
#[command(name = "twomem", version)]
struct Cli {
    /// Replace the config's seed list with this single seed.
    #[arg(long, global = true, value_name = "SEED")]
    seed_override: Option<u64>,
    /// Print nothing but errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train and evaluate every seed of a config, one metrics CSV per seed.
    Run { config: PathBuf },
    /// Aggregate metrics CSVs into aggregate.csv and SVG plots.
    Report {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run the data-sharing by schedule grid plus both pure baselines.
    Ablate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    error: Error,
}

fn invalid(error: Error) -> Failure {
    Failure { code: 1, error }
}

fn classify(error: Error) -> Failure {
    let code = if error.is_validation() { 1 } else { 2 };
    Failure { code, error }
}

/// Anything wrong with the config file itself, including failing to read
/// it, is a validation error.
fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::load(path).map_err(invalid)?;
    if let Some(seed) = cli.seed_override {
        config.seeds = vec![seed];
    }
    config.validate().map_err(invalid)?;
    twomem::env::make_env(&config.env_name, config.env_file.as_deref()).map_err(invalid)?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let say = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Run { config } => {
            let config = load(cli, config)?;
            say(format!(
                "{}: {} on {}, {} steps, seeds {:?}",
                config.label,
                harness::mode_name(config.agent.mode),
                config.env_name,
                config.total_steps,
                config.seeds
            ));
            for path in harness::run(&config).map_err(classify)? {
                say(format!("wrote {}", path.display()));
            }
        }
        Command::Report { csv, out } => {
            // Unreadable or inconsistent inputs are the caller's fault; only
            // failing to write the outputs is a runtime failure.
            let written = harness::report(csv, out).map_err(|e| match &e {
                Error::Io { path, .. } if path.starts_with(out) => classify(e),
                _ => invalid(e),
            })?;
            for path in written {
                say(format!("wrote {}", path.display()));
            }
        }
        Command::Ablate { config } => {
            let config = load(cli, config)?;
            let variants = harness::ablation_variants(&config);
            say(format!(
                "{} variants x {} seeds into {}",
                variants.len(),
                config.seeds.len(),
                config.output_dir.display()
            ));
            let summary = harness::ablation_suite(&config).map_err(classify)?;
            let last = summary
                .rows
                .iter()
                .map(|r| r.global_step)
                .max()
                .unwrap_or(0);
            for label in summary.labels() {
                if let Some(row) = summary.get(label, last) {
                    say(format!(
                        "{label:>22}  final return {:8.2} +- {:.2}",
                        row.eval_return_mean, row.eval_return_std
                    ));
                }
            }
            say(format!(
                "wrote {}",
                config.output_dir.join(harness::SUMMARY_FILE).display()
            ));
        }
    }
    Ok(())
}
