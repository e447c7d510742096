//! Command-line interface: single-point computation, config-driven sweeps,
//! and the built-in figure presets.
//!
//! Exit codes: 0 on success, 2 on validation errors, 3 when a sweep
//! completed but some grid points failed (their rows carry the reason).

use clap::{Args, Parser, Subcommand};
use dampcap::emit::{emit, OutputFormat};
use dampcap::families::{ChannelSpec, Family, Params};
use dampcap::sweep::{
    figure_preset, parse_config, parse_param_assignment, run_sweep, SweepSpec, PRESET_IDS,
};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "dampcap",
    about = "Detected classical-capacity lower bounds for multilevel damping channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single channel given family, dimension and parameters.
    Compute {
        /// Channel family (bosonic, hypergeometric, negative_hypergeometric,
        /// beta_binomial, geometric, constant_ratio, two_jump, lambda, v)
        #[arg(long)]
        family: String,
        /// System dimension d
        #[arg(long)]
        d: usize,
        /// Parameter assignment KEY=VALUE; repeat per parameter. Values may
        /// be integers, reals, or comma-separated per-level lists.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a sweep described by a JSON configuration file.
    Sweep {
        /// Path to the JSON sweep configuration
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run one of the built-in figure presets.
    Figure {
        /// Preset identifier (fig1..fig4, fig6..fig15)
        #[arg(long)]
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Convergence tolerance of the Blahut-Arimoto bracket, in bits
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration budget per grid point
    #[arg(long = "max-iter", default_value_t = 100_000)]
    max_iter: u64,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sweep_spec, common) = match build_sweep(cli.command) {
        Ok(pair) => pair,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };

    let format = match OutputFormat::from_str(&common.format) {
        Ok(f) => f,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    if common.tol.is_nan() || common.tol <= 0.0 || common.max_iter == 0 {
        eprintln!("error: --tol must be positive and --max-iter nonzero");
        return ExitCode::from(2);
    }

    let rows = run_sweep(&sweep_spec, common.tol, common.max_iter);
    let failures = rows.iter().filter(|r| r.is_skipped()).count();

    let result = match &common.out {
        Some(path) => fs::File::create(path)
            .and_then(|mut file| emit(&rows, format, &mut file))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(&rows, format, &mut lock)
                .and_then(|()| lock.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    };
    if let Err(message) = result {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }

    if failures > 0 {
        eprintln!(
            "warning: {failures} of {} grid points failed; see the error column",
            rows.len()
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn build_sweep(command: Command) -> Result<(SweepSpec, Common), String> {
    match command {
        Command::Compute {
            family,
            d,
            params,
            common,
        } => {
            let family = Family::from_str(&family).map_err(|e| e.to_string())?;
            let mut map = Params::new();
            for assignment in &params {
                let (key, value) = parse_param_assignment(assignment).map_err(|e| e.to_string())?;
                if !family.param_names().contains(&key.as_str()) {
                    return Err(format!(
                        "family {family} does not take a parameter named \"{key}\" \
                         (expected one of: {})",
                        family.param_names().join(", ")
                    ));
                }
                map.insert(key, value);
            }
            let spec = ChannelSpec::new(family, d, map);
            // surface bad parameters now rather than as a skipped row
            spec.transition().map_err(|e| e.to_string())?;
            Ok((SweepSpec::point(spec), common))
        }
        Command::Sweep { config, common } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let spec = parse_config(&text).map_err(|e| e.to_string())?;
            Ok((spec, common))
        }
        Command::Figure { id, common } => {
            let spec = figure_preset(&id)
                .map_err(|e| format!("{e}; known presets: {}", PRESET_IDS.join(", ")))?;
            Ok((spec, common))
        }
    }
}
