use std::path::PathBuf;
use std::process::ExitCode;

use ablab_cli::{run, CliError, Command, ExperimentConfig};
use clap::Parser;

/// Numerical laboratory for the one-dimensional Anderson–Bernoulli model.
#[derive(Parser, Debug)]
#[command(name = "ablab", version)]
struct Args {
    /// JSON experiment configuration (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, overriding the config.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(value_enum)]
    command: Command,
}

fn load(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = &args.outdir {
        config.outdir = o.clone();
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.threads {
        config.threads = t;
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = load(&args).and_then(|config| run(args.command, &config));
    match result {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report.metrics).expect("metrics serialize")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
