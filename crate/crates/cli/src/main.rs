use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use tpeqw_cli::config::{LoadedConfig, CONFIG_ENV};
use tpeqw_cli::{run, write_atomic, Command};

/// Two-photon-emission pair source calculator.
#[derive(Parser)]
#[command(name = "tpeqw", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Configuration file. Falls back to $TPEQW_CONFIG, then the shipped default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for the result document and CSV artifacts.
    #[arg(long, global = true, default_value = "tpeqw-out")]
    out: PathBuf,

    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Format of the summary on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Absolute pair rate at the configured operating point.
    Rate,
    /// Pair rate versus signal wavelength, written to sweep.csv.
    Sweep,
    /// CHSH value of the emitted state, analytic and Monte Carlo.
    Bell,
    /// Poisson emission trace, written to events.csv.
    Events,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let command = match cli.command {
        Cmd::Rate => Command::Rate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Bell => Command::Bell,
        Cmd::Events => Command::Events,
    };
    let mut loaded = LoadedConfig::discover(cli.config.as_deref())
        .with_context(|| format!("loading configuration (--config or ${CONFIG_ENV})"))?;
    if let Some(seed) = cli.seed {
        loaded.config.run.seed = seed;
    }
    let outcome = run(command, &loaded)?;
    for w in &outcome.document.warnings {
        eprintln!("warning: {w}");
    }

    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("creating output directory {}", cli.out.display()))?;
    if let Some(artifact) = &outcome.artifact {
        let path = cli.out.join(&artifact.file_name);
        write_atomic(&path, artifact.contents.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let json = outcome.document.to_json();
    let path = cli.out.join(format!("{}.json", command.name()));
    write_atomic(&path, json.as_bytes()).with_context(|| format!("writing {}", path.display()))?;

    match cli.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", outcome.document.to_text()),
    }
    Ok(())
}
