mod analysis;
mod args;
mod output;
mod spec;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use itc_core::{Error, SpinNetwork};

/// Invalid arguments or spec; exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Core errors carry 0-based node indices; the command line speaks 1-based.
fn describe(e: &Error) -> String {
    match *e {
        Error::Asymmetric { i, j, upper, lower } => format!(
            "couplings are not symmetric: entry ({}, {}) = {upper} but ({}, {}) = {lower}",
            i + 1,
            j + 1,
            j + 1,
            i + 1
        ),
        Error::InvalidCoupling { i, j, value } if i == j => {
            format!("coupling diagonal must be zero: entry ({}, {}) = {value}", i + 1, j + 1)
        }
        Error::InvalidCoupling { i, j, value } => format!(
            "couplings must be finite and nonnegative: entry ({}, {}) = {value}",
            i + 1,
            j + 1
        ),
        Error::DegenerateGeometry { i, j } => {
            format!("positions {} and {} coincide", i + 1, j + 1)
        }
        Error::IndexOutOfRange { index, n } => format!("node {} out of range 1..={n}", index + 1),
        ref other => other.to_string(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        Some(_) => EXIT_USAGE,
        None => EXIT_IO,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ITC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Usage(format!("ITC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (net, source, a) = match cli.command {
        Command::Chain { kind, n, j, analysis } => {
            (SpinNetwork::chain(n, kind.into(), j)?, spec::Source::Chain, analysis)
        }
        Command::Network { spec: path, analysis } => {
            let (net, source) = spec::load(&path)?;
            (net, source, analysis)
        }
    };

    let outcome = analysis::run(&net, source, &a)?;
    let mut text = serde_json::to_string_pretty(&outcome.report)?;
    text.push('\n');
    match &a.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }

    if let Some(prefix) = &a.csv {
        for t in &outcome.tables {
            let path = output::csv_path(prefix, t.suffix);
            output::write_rows(&path, t.header.as_deref(), t.rows.iter().cloned())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = match err.downcast_ref::<Error>() {
                Some(e) => describe(e),
                None => format!("{err:#}"),
            };
            eprintln!("error: {message}");
            ExitCode::from(exit_code(&err))
        }
    }
}
