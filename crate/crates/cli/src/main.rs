//! `paircorr`: batch runs over zero tables with CSV/JSON output.
//!
//! Exit codes: 0 ok, 1 I/O or network failure, 2 usage, 3 integrity
//! (checksum or parse), 4 validation or failed check, 5 coverage,
//! 6 numerical non-convergence.

// `!(a > b)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTEGRITY: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;
pub const EXIT_COVERAGE: u8 = 5;
pub const EXIT_NONCONVERGENCE: u8 = 6;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "paircorr",
    version,
    about = "Pair correlation of zeta zeros: batch computations and checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Flat `key = value` file; keys mirror the long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Zero table: local path (optionally gzipped) or http(s):// / file:// URL.
    #[arg(long, global = true)]
    pub zeros: Option<String>,
    /// ordinates-only or delta-gamma-csv.
    #[arg(long = "zeros-format", global = true)]
    pub zeros_format: Option<String>,
    /// Expected SHA-256 of the zero file.
    #[arg(long, global = true)]
    pub checksum: Option<String>,
    /// Height up to which the table is complete (default: its last ordinate).
    #[arg(long, global = true)]
    pub coverage: Option<f64>,
    /// Download cache; PAIRCORR_CACHE overrides the config file.
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// csv or json for tabular commands.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads, or `auto`.
    #[arg(long, global = true)]
    pub threads: Option<String>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Omit the generated_at field from JSON output.
    #[arg(long = "no-timestamp", global = true)]
    pub no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Download (or reuse the cached copy of) a zero table and validate it.
    Fetch(ValidateArgs),
    /// Check a zero table against the Riemann-von Mangoldt main terms.
    Validate(ValidateArgs),
    /// Empirical F(alpha) against its main terms.
    Fcurve(FcurveArgs),
    /// Evaluate a Tsang kernel or check its properties on a grid.
    Kernel(KernelArgs),
    /// Simple-zero proportion bound for a kernel.
    SimpleBound(SimpleBoundArgs),
    /// Kernel-weighted pair sum over close zero pairs.
    PairKernelSum(PairKernelSumArgs),
    /// Explicit-formula residuals against an error budget.
    ExplicitCheck(ExplicitArgs),
    /// Zero counts N(sigma, T) beside T^{2(1 - sigma)}.
    DensityPlot(DensityArgs),
    /// Run the identity and property checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct ValidateArgs {
    /// Allowed deviation as a multiple of log t.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Heights to check (list or start:stop:step).
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct FcurveArgs {
    /// Height T (default: table coverage).
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Alpha grid (list or start:stop:step).
    #[arg(long)]
    pub alpha: Option<String>,
    /// exact or banded.
    #[arg(long)]
    pub mode: Option<String>,
    /// Band half-width in ordinate units (banded mode).
    #[arg(long)]
    pub band: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct KernelArgs {
    /// fejer, mt, or a CSV file of `alpha,j` rows.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Real parts to evaluate (list or start:stop:step).
    #[arg(long)]
    pub x: Option<String>,
    /// Imaginary parts to evaluate (list).
    #[arg(long)]
    pub y: Option<String>,
    /// Run the property checks instead of evaluating.
    #[arg(long)]
    pub check: bool,
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Constant C in |K(z)| <= C e^{|Im z|} / |z|^2.
    #[arg(long = "bound-c")]
    pub bound_c: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct SimpleBoundArgs {
    /// fejer, mt, all, or a CSV kernel file.
    #[arg(long)]
    pub kernel: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct PairKernelSumArgs {
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Largest |gamma - gamma'| evaluated (default: automatic).
    #[arg(long)]
    pub band: Option<f64>,
    /// Close-pair cut on |beta - beta'| (default 1/log T).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Interpolate real kernel values on a grid of this step.
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct ExplicitArgs {
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// C1,C2,C3.
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long = "sieve-limit")]
    pub sieve_limit: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct DensityArgs {
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Constant of the zero-free region used for the edge column.
    #[arg(long = "kv-c")]
    pub kv_c: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    /// Comma-separated subset of checks.
    #[arg(long)]
    pub only: Option<String>,
    /// Configurations sampled by banded-oracle.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub explicit: ExplicitArgs,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long = "bound-c")]
    pub bound_c: Option<f64>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use paircorr::Error as E;
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<E>() {
        Some(E::Io { .. } | E::Network { .. }) => EXIT_IO,
        Some(E::Parse { .. } | E::DeltaOutOfRange { .. } | E::ChecksumMismatch { .. }) => EXIT_INTEGRITY,
        Some(E::RvmViolation { .. }) => EXIT_VALIDATION,
        Some(E::Coverage { .. } | E::EmptyRange(_)) => EXIT_COVERAGE,
        Some(E::NotConverged { .. } | E::NonFinite { .. }) => EXIT_NONCONVERGENCE,
        Some(E::Domain(_) | E::DegenerateKernel(_) | E::KernelTable(_)) => EXIT_USAGE,
        None => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("paircorr: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
