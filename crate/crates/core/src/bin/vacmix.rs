//! Command-line front end: config ingestion, sweep subcommands, file
//! emission. Exit codes: 0 success, 2 configuration error, 3 numeric
//! failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use vacmix::config::{load_config, RunConfig};
use vacmix::runner;
use vacmix::{Error, Result};

#[derive(Parser)]
#[command(
    name = "vacmix",
    version,
    about = "Vacuum pair emission spectra from temporally modulated dispersive media"
)]
struct Cli {
    /// Config file path, or "-" for stdin; omitted runs the built-in
    /// reference scenario.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,

    /// Directory for emitted files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for the sweep (0 keeps the pool default).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Mixing-integral route.
    #[arg(long, global = true, value_parser = ["analytic", "quadrature"])]
    mixing_mode: Option<String>,

    /// Include the subleading interbranch correction.
    #[arg(long, global = true)]
    include_subleading: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bulk polariton branch table as CSV.
    Branches,
    /// Run the pair emission sweep and write the spectrum CSV, the peak
    /// report and the resolved config into the output directory.
    Spectrum,
    /// Print the exact-vs-perturbative propagator residual table.
    Oracle,
    /// Print the fiber branch table with transverse orders as CSV.
    Fiber,
    /// Per-mode state diagnostics.
    States {
        #[command(subcommand)]
        command: StatesCommand,
    },
    /// Estimate the emitted pair rate at a repetition rate.
    Rate {
        /// Transverse spot scale (um).
        #[arg(long, default_value_t = 250.0)]
        area: f64,
        /// Wavelength the estimate is taken at (um).
        #[arg(long, default_value_t = 0.65)]
        lambda_mix: f64,
        /// Pulse repetition rate (Hz).
        #[arg(long, default_value_t = 1e6)]
        repetition_rate: f64,
    },
}

#[derive(Subcommand)]
enum StatesCommand {
    /// Check state identities; exits 3 on any failed identity.
    SelfTest,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let text = match cli.config.as_deref() {
        None => String::new(),
        Some("-") => io::read_to_string(io::stdin())?,
        Some(path) => fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config {path}: {e}"))
        })?,
    };
    let mut config = load_config(&text)?;
    if let Some(threads) = cli.threads {
        config.run.threads = threads;
    }
    if let Some(mode) = &cli.mixing_mode {
        config.run.mixing_mode = mode.clone();
    }
    if cli.include_subleading {
        config.run.include_subleading = true;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<i32> {
    let config = load(&cli)?;
    let stdout = io::stdout();
    match &cli.command {
        Command::Branches => {
            print!("{}", runner::run_branches(&config)?);
        }
        Command::Spectrum => {
            let mut log = io::stderr();
            let artifacts = runner::run_spectrum(&config, &mut log)?;
            let paths = runner::write_spectrum_files(&config, &artifacts, &cli.out)?;
            let mut out = stdout.lock();
            for path in paths {
                writeln!(out, "wrote {}", path.display())?;
            }
        }
        Command::Oracle => {
            print!("{}", runner::run_oracle(&config)?);
        }
        Command::Fiber => {
            let (table, warnings) = runner::run_fiber(&config)?;
            for warning in warnings {
                eprintln!("warning: {warning}");
            }
            print!("{table}");
        }
        Command::States {
            command: StatesCommand::SelfTest,
        } => {
            let report = runner::states_self_test()?;
            print!("{}", report.text);
            if !report.passed {
                return Ok(3);
            }
        }
        Command::Rate {
            area,
            lambda_mix,
            repetition_rate,
        } => {
            print!(
                "{}",
                runner::run_rate(&config, *area, *lambda_mix, *repetition_rate)?
            );
        }
    }
    Ok(0)
}
