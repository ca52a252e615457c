//! Batch front end. Every run writes one JSON or CSV report document that
//! echoes its resolved configuration; see the schema chapter of the guide.

pub mod commands;
pub mod config;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use commands::{execute, parse_function, Outcome};
pub use config::{Flags, Format, RunConfig};
pub use output::render;
pub use sweep::{run_sweep, Axis};

use crate::error::Error;

pub const SCHEMA_VERSION: &str = "prolate-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "prolate", version, about = "Prolate spectra, commutation certificates and entropy reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prolate eigenfunctions: eigenvalues, concentration values, samples.
    Pswf(Flags),
    /// Low spectra of the `−W` and `−L` forms of one sector.
    Spectrum(Flags),
    /// Alignment of prolate eigenvectors with the truncated Fourier transform.
    Commutator(Flags),
    /// Born, parabolic, Legendre and prolate entropies of one function.
    Entropy(Flags),
    /// Entropy of a free wave with Cauchy data (fn, momentum).
    Wave(Flags),
    /// Modular identities, cutting projections and entropy positivity.
    Modular(Flags),
    /// Block structure of the field/momentum duality model.
    Duality(Flags),
    /// Runs another command over a grid of at most two axes.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Command run at every grid point.
    #[arg(long)]
    pub over: String,
    /// `name=v1,v2,...`, `name=a..b` or `name=a..=b`; at most two.
    #[arg(long = "axis")]
    pub axes: Vec<String>,
    #[command(flatten)]
    pub flags: Flags,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        Error::Conditioning(_) | Error::DegenerateSpectrum(_) => EXIT_TOLERANCE,
        Error::Parameter(_) | Error::Data(_) | Error::Validation(_) => EXIT_INVALID,
    }
}

/// Runs one resolved configuration into a report document.
///
/// Errors also produce a document (status `error`), which is what sweeps
/// record; single runs only print the diagnostic.
pub fn run_document(cfg: &RunConfig) -> (Value, i32) {
    match execute(cfg) {
        Ok(outcome) => document(cfg, outcome),
        Err(e) => {
            let code = exit_code(&e);
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": cfg.command,
                "config": cfg,
                "status": "error",
                "exit_code": code,
                "error": e.to_string(),
            });
            (doc, code)
        }
    }
}

fn document(cfg: &RunConfig, outcome: Outcome) -> (Value, i32) {
    let code = if outcome.passed() { EXIT_OK } else { EXIT_TOLERANCE };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg,
        "status": if code == EXIT_OK { "ok" } else { "tolerance_failure" },
        "failures": outcome.failures,
        "result": outcome.result,
    });
    (doc, code)
}

fn command_name(cmd: &Command) -> (&'static str, &Flags) {
    match cmd {
        Command::Pswf(f) => ("pswf", f),
        Command::Spectrum(f) => ("spectrum", f),
        Command::Commutator(f) => ("commutator", f),
        Command::Entropy(f) => ("entropy", f),
        Command::Wave(f) => ("wave", f),
        Command::Modular(f) => ("modular", f),
        Command::Duality(f) => ("duality", f),
        Command::Sweep(s) => ("sweep", &s.flags),
    }
}

/// Full CLI run: parse, resolve, execute, write. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, flags) = command_name(&cli.command);
    let result = match &cli.command {
        Command::Sweep(s) => RunConfig::resolve(&s.over, flags).and_then(|cfg| {
            let axes = s.axes.iter().map(|a| Axis::parse(a)).collect::<Result<Vec<_>, _>>()?;
            let (doc, code) = run_sweep(&cfg, &axes)?;
            Ok((cfg, doc, code))
        }),
        _ => RunConfig::resolve(name, flags).and_then(|cfg| {
            let (doc, code) = document(&cfg, execute(&cfg)?);
            Ok((cfg, doc, code))
        }),
    };
    let (cfg, doc, code) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(fails) = doc.get("failures").and_then(Value::as_array) {
        for f in fails.iter().filter_map(Value::as_str) {
            eprintln!("tolerance failure: {f}");
        }
    }
    if name == "sweep" && code != EXIT_OK {
        eprintln!("sweep finished with status {}", doc["status"]);
    }
    let text = match render(&doc, cfg.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_INVALID;
    }
    code
}
