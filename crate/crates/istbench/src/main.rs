use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use istbench::config::{resolve_output, Overrides};
use istbench::{emit_table, run_experiment, ExperimentConfig, ExperimentKind, Format, HarnessError, OUT_DIR_ENV};

/// Seeded simulation testbench for photonic W-state networks, discretized
/// entanglement models and the two-mass gravity witness.
#[derive(Parser, Debug)]
#[command(name = "istbench", version)]
struct Cli {
    experiment: ExperimentKind,
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when neither this nor `output` in the config is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let overrides =
        Overrides { experiment: Some(cli.experiment), seed: cli.seed, output: cli.out, format: cli.format };
    let config = ExperimentConfig::load(&cli.config, &overrides)?;
    let table = run_experiment(&config)?;
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let path = config.output.as_deref().map(|p| resolve_output(p, out_dir.as_deref()));
    emit_table(&table, config.format, path.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("istbench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
