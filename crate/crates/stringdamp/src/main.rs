// `!(x > 0.0)` rejects NaN where `x <= 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stringdamp::cli::{self, CliError, ConfigFile, ScenarioConfig};

/// Simulator and analysis toolkit for time-optimal damping of a closed
/// string driven by a bounded point load.
#[derive(Parser)]
#[command(name = "stringdamp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dry-friction flow for a scenario config; writes flow.csv,
    /// energy.csv and optional snapshots.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace stride (overrides [scenario] stride).
        #[arg(long)]
        stride: Option<f64>,
        /// Export a snapshot of the field, e.g. --snapshot t=6.2831853.
        #[arg(long, value_name = "t=<value>")]
        snapshot: Vec<String>,
    },
    /// Scan support functions of the reachable sets; writes support_scan.csv.
    Reachable {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncation eigenvalue scan (secular.csv) and singular-arc reports.
    Spectral {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: decay, duality, shape, spectral, energy, all.
    Verify {
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_snapshots(args: &[String]) -> Result<Vec<f64>, CliError> {
    args.iter()
        .map(|s| {
            s.strip_prefix("t=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| CliError::Config(format!("bad snapshot spec {s:?}, want t=<value>")))
        })
        .collect()
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Simulate { config, out, stride, snapshot } => {
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let file = ConfigFile::load(&config)?;
            let mut scenario = ScenarioConfig::from_file(&file, &base)?;
            if let Some(dir) = out {
                scenario.out_dir = dir;
            }
            if let Some(dt) = stride {
                if !(dt > 0.0) {
                    return Err(CliError::Config(format!("stride must be positive, got {dt}")));
                }
                scenario.stride = dt;
            }
            let snapshots = parse_snapshots(&snapshot)?;
            cli::run_simulate(&scenario, &snapshots)
        }
        Command::Reachable { config, out } => {
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let mut file = ConfigFile::load(&config)?;
            if let Some(dir) = out {
                file = override_out(file, &dir);
            }
            cli::run_reachable(&file, &base)
        }
        Command::Spectral { config, out } => {
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let mut file = ConfigFile::load(&config)?;
            if let Some(dir) = out {
                file = override_out(file, &dir);
            }
            cli::run_spectral(&file, &base)
        }
        Command::Verify { suite, seed, out } => cli::run_verify(&suite, seed, &out),
    }
}

fn override_out(file: ConfigFile, dir: &std::path::Path) -> ConfigFile {
    let mut text = String::new();
    text.push_str(&format!("[output]\ndir = {}\n", dir.display()));
    let patched = ConfigFile::parse(&text).expect("static text parses");
    file.merged_with(patched)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stringdamp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
