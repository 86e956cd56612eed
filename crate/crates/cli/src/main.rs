use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use translie_cli::{parse_config, run, Command};

#[derive(Parser)]
#[command(name = "translie", version, about = "Exact checks for ternary brackets, one-third derivations and transposed Poisson products")]
struct Cli {
    /// What to run. Must agree with `command` in the config.
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Suppress the per-entry summary.
    #[arg(long)]
    quiet: bool,

    /// Record wall-clock time in the report (makes reports differ run to run).
    #[arg(long)]
    timing: bool,
}

fn execute(cli: &Cli) -> Result<i32> {
    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("reading {}", cli.config.display()))?;
    let mut config = parse_config(&text)?;
    if config.command != cli.command {
        anyhow::bail!(
            "config is for `{}` but `{}` was requested",
            config.command.name(),
            cli.command.name()
        );
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let start = Instant::now();
    let mut report = run(&config)?;
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    match &cli.out {
        Some(path) => {
            std::fs::write(path, report.to_json())
                .with_context(|| format!("writing {}", path.display()))?;
            if !cli.quiet {
                print!("{}", report.summary());
            }
        }
        None => {
            if !cli.quiet {
                eprint!("{}", report.summary());
            }
            print!("{}", report.to_json());
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
