//! `lorenz-acim`: classification, invariant densities, rotation and
//! parameter scans for piecewise linear Lorenz maps.

mod commands;
mod output;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Analyse piecewise linear Lorenz maps f_{a,b,c} on [0, 1].
#[derive(Debug, Parser)]
#[command(name = "lorenz-acim", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Use exact rational arithmetic (implied by any `p/q` parameter).
    #[arg(long, global = true)]
    pub exact: bool,
    /// Convergence tolerance of iterative methods.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ulam,
    Parry,
    Markov,
    Renorm,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Existence and character of the absolutely continuous invariant measure.
    Classify { a: String, b: String, c: String },
    /// Invariant density as a step function.
    Density {
        a: String,
        b: String,
        c: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Number of Ulam cells.
        #[arg(long, default_value_t = 4096)]
        cells: usize,
        /// Number of series terms.
        #[arg(long, default_value_t = 60)]
        terms: usize,
    },
    /// Sweep a parameter grid.
    Scan {
        /// Range of a as `lo:hi:step`.
        #[arg(long)]
        a: String,
        /// Range or value of b; locked to a when omitted.
        #[arg(long)]
        b: Option<String>,
        /// Range or value of c.
        #[arg(long, default_value = "0.5")]
        c: String,
        /// Comma-separated analyses: classify, equivalence, kappa, rho.
        #[arg(long, default_value = "classify,equivalence,kappa,rho")]
        fields: String,
        /// Worker threads; output order never depends on it.
        #[arg(long)]
        jobs: Option<usize>,
        /// Iterations of the rotation estimate.
        #[arg(long, default_value_t = 1000)]
        rho_steps: usize,
    },
    /// Forward orbit of a point.
    Orbit {
        a: String,
        b: String,
        c: String,
        x: String,
        n: usize,
        /// Side of the starting point when it equals c.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        /// How to continue when the orbit meets c.
        #[arg(long, value_enum)]
        critical: Option<SideArg>,
    },
    /// Empirical rotation interval and, for homeomorphisms, the closed form.
    Rotation {
        a: String,
        b: String,
        c: String,
        n: usize,
    },
    /// Equivalence of the invariant measure with Lebesgue measure.
    Equivalence { a: String, b: String, c: String },
}

/// Input errors raised by the front end itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code(err: &anyhow::Error) -> (u8, String) {
    if let Some(e) = err.downcast_ref::<lorenz_acim::Error>() {
        let code = if e.is_input_error() { 2 } else { 3 };
        return (code, format!("{}: {e}", e.name()));
    }
    if err.downcast_ref::<InputError>().is_some() {
        return (2, format!("InvalidInput: {err}"));
    }
    (3, format!("{err:#}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, msg) = exit_code(&err);
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
