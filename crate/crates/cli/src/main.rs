//! Command-line front end: theory constants, shape-parameter selection,
//! MN-curve export, scattered-data interpolation, and bound-vs-error
//! experiments.
//!
//! Exit codes are a stable scripting contract: `0` success, `2` input or
//! validation error, `3` numerical failure (degenerate system, residual
//! rejection). Set `SSSPLINE_LOG=1` for progress lines on stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(
    name = "sspline",
    version,
    about = "Shifted surface spline interpolation and shape-parameter selection",
    after_help = "Numbers in JSON documents may be written either as plain floats or as \
{\"log\": L} objects carrying the natural log; the latter is required for \
magnitudes beyond f64 range (the theory constants involve e^(2 n gamma_n)).\n\
Set SSSPLINE_LOG=1 for progress output on stderr."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the theory constants for a kernel family (n, lambda)
    Constants(ConstantsArgs),
    /// Recommend a shape parameter c for a selection problem
    Select(SelectArgs),
    /// Export ln MN(c) over a log-uniform c grid as CSV
    MnCurve(MnCurveArgs),
    /// Build a scattered-data interpolant (and optionally evaluate probes)
    Interp(InterpArgs),
    /// Run interpolation experiments and report bound vs. empirical error
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Space dimension (even, >= 2)
    #[arg(long)]
    n: usize,
    /// Kernel order parameter (even, >= 2)
    #[arg(long)]
    lambda: u32,
}

/// A selection problem, either as a JSON document or inline. Magnitudes may
/// be given as plain values (`--sigma`) or natural logs (`--sigma-log`).
#[derive(Args)]
struct ProblemInput {
    /// Problem JSON file ("-" for stdin); alternative to the inline flags
    #[arg(long)]
    input: Option<String>,
    /// Space dimension (even)
    #[arg(long)]
    n: Option<usize>,
    /// Kernel order parameter (even)
    #[arg(long)]
    lambda: Option<u32>,
    /// Band limit sigma
    #[arg(long)]
    sigma: Option<f64>,
    /// ln(sigma), for out-of-range magnitudes
    #[arg(long, conflicts_with = "sigma", allow_negative_numbers = true)]
    sigma_log: Option<f64>,
    /// Fill distance d
    #[arg(long)]
    d: Option<f64>,
    /// ln(d), for out-of-range magnitudes
    #[arg(long, conflicts_with = "d", allow_negative_numbers = true)]
    d_log: Option<f64>,
    /// Fixed evaluation-cube side b0
    #[arg(long)]
    b0: Option<f64>,
    /// ln(b0), for out-of-range magnitudes
    #[arg(long, conflicts_with = "b0", allow_negative_numbers = true)]
    b0_log: Option<f64>,
    /// Dilation-invariant mode (b0 scales with c; no fixed side)
    #[arg(long, conflicts_with_all = ["b0", "b0_log"])]
    dilation_invariant: bool,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    problem: ProblemInput,
    /// Write the recommendation JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MnCurveArgs {
    #[command(flatten)]
    problem: ProblemInput,
    /// Lower end of the c range (default: the floor c0)
    #[arg(long)]
    c_min: Option<f64>,
    /// ln of the lower end
    #[arg(long, conflicts_with = "c_min", allow_negative_numbers = true)]
    c_min_log: Option<f64>,
    /// Upper end of the c range (default: 10 c1 fixed-mode, 1e6 c0 dilation)
    #[arg(long)]
    c_max: Option<f64>,
    /// ln of the upper end
    #[arg(long, conflicts_with = "c_max", allow_negative_numbers = true)]
    c_max_log: Option<f64>,
    /// Number of log-uniform samples
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InterpArgs {
    /// Scattered data JSON: {"n": .., "points": [[..]..], "values": [..]}
    #[arg(long)]
    data: PathBuf,
    /// Kernel order parameter (even)
    #[arg(long)]
    lambda: u32,
    /// Shape parameter c > 0
    #[arg(long)]
    c: f64,
    /// Optional probe points JSON: [[..], [..], ..]
    #[arg(long)]
    probe: Option<PathBuf>,
    /// Write the interpolant JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write probe evaluations CSV here instead of stdout
    #[arg(long)]
    probe_out: Option<PathBuf>,
    /// Residual acceptance tolerance (default 1e-8)
    #[arg(long)]
    tol_residual: Option<f64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration JSON
    #[arg(long)]
    config: PathBuf,
    /// Write the report CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full reports as a JSON array
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Override the config's jitter seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's center grids with a single per-axis count
    #[arg(long)]
    grid: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants(args) => commands::cmd_constants(args),
        Command::Select(args) => commands::cmd_select(args),
        Command::MnCurve(args) => commands::cmd_mn_curve(args),
        Command::Interp(args) => commands::cmd_interp(args),
        Command::Experiment(args) => commands::cmd_experiment(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
