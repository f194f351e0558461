use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use uniqlab_cli::{emit, run, CliError, Command, ExperimentConfig, Format};

/// Numerical probes of discrete Fourier uniqueness and decay transfer.
///
/// Parameters come from `--config` (a JSON experiment file) or `--params`
/// (an inline JSON object); omitted fields take their defaults.
#[derive(Debug, Parser)]
#[command(name = "uniqlab", version)]
struct Cli {
    /// Experiment to run.
    command: Command,
    /// JSON experiment config `{command, params, output_path, seed}`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline params object, e.g. '{"p": 3}'.
    #[arg(long, conflicts_with = "config")]
    params: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from a `.json` output path otherwise csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for randomized grids; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("UNIQLAB_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim()
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| CliError::Validation {
                command: "environment".into(),
                message: format!("UNIQLAB_THREADS must be a positive integer, got {v:?}"),
            })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io {
            path: "thread pool".into(),
            message: e.to_string(),
        })
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match (&cli.config, &cli.params) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let c = ExperimentConfig::from_json(&text)?;
            if c.command != cli.command {
                return Err(CliError::Validation {
                    command: cli.command.name().into(),
                    message: format!("config file is for `{}`", c.command.name()),
                });
            }
            c
        }
        (None, Some(inline)) => {
            let params = serde_json::from_str(inline).map_err(|e| CliError::Validation {
                command: cli.command.name().into(),
                message: format!("--params: {e}"),
            })?;
            ExperimentConfig::new(cli.command, params, 0)
        }
        (None, None) => ExperimentConfig::new(cli.command, serde_json::json!({}), 0),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = load(&cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_path.clone().map(PathBuf::from));
    let format = cli.format.unwrap_or_else(|| match &out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    });
    let table = run(&config)?;
    match out {
        Some(path) => emit(&table, &path, format),
        None => {
            let bytes = table.to_bytes(format)?;
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
