//! Subcommand implementations.
//!
//! Every command reads JSON (numbers or `{"log": L}` objects), writes JSON or
//! CSV, and maps failures onto the stable exit-code contract via [`CliError`]:
//! input and validation problems exit `2`, numerical failures exit `3`.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use sspline::harness::{
    grid_centers, jitter_centers_seeded, make_sinc_product, run_bound_experiment,
    ExperimentOptions, ExperimentReport,
};
use sspline::interp::{
    build_interpolant, eval_interpolant, fill_distance, poly_space_dim, BuildOptions, CubeDomain,
    ScatteredData,
};
use sspline::select::{log_mn_extended, select_c, B0Mode, SelectionProblem};
use sspline::theory::{KernelParams, TheoryContext};
use sspline::{Error, LogScalar};

use crate::{ConstantsArgs, ExperimentArgs, InterpArgs, MnCurveArgs, ProblemInput, SelectArgs};

/// CLI-level error: wraps the library error (exit 2 or 3 by its
/// classification) or a front-end problem (always exit 2).
pub enum CliError {
    Core(Error),
    Io(String),
    Parse(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => {
                if e.is_validation() {
                    2
                } else {
                    3
                }
            }
            CliError::Io(_) | CliError::Parse(_) | CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) | CliError::Parse(msg) | CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CmdResult = Result<(), CliError>;

/// `SSSPLINE_LOG` gates progress output on stderr (any nonempty value except
/// "0" enables it).
fn verbose() -> bool {
    std::env::var("SSSPLINE_LOG").map(|v| !v.is_empty() && v != "0").unwrap_or(false)
}

fn progress(msg: &str) {
    if verbose() {
        eprintln!("sspline: {msg}");
    }
}

fn read_source(src: &str) -> Result<String, CliError> {
    if src == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(src).map_err(|e| CliError::Io(format!("reading {src}: {e}")))
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

/// Write to the given path, or stdout when absent.
fn write_output(out: &Option<PathBuf>, content: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// One positive scalar from a value flag / log flag pair.
fn scalar_flag(name: &str, value: Option<f64>, log: Option<f64>) -> Result<Option<LogScalar>, CliError> {
    match (value, log) {
        (None, None) => Ok(None),
        (Some(v), None) => LogScalar::from_value(v)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("--{name}: {e}"))),
        (None, Some(l)) => LogScalar::from_ln(l)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("--{name}-log: {e}"))),
        (Some(_), Some(_)) => Err(CliError::Usage(format!(
            "--{name} and --{name}-log are mutually exclusive"
        ))),
    }
}

impl ProblemInput {
    fn has_inline_flags(&self) -> bool {
        self.n.is_some()
            || self.lambda.is_some()
            || self.sigma.is_some()
            || self.sigma_log.is_some()
            || self.d.is_some()
            || self.d_log.is_some()
            || self.b0.is_some()
            || self.b0_log.is_some()
            || self.dilation_invariant
    }

    /// Build the selection problem from `--input` JSON or the inline flags.
    pub fn build(&self) -> Result<SelectionProblem, CliError> {
        if let Some(src) = &self.input {
            if self.has_inline_flags() {
                return Err(CliError::Usage(
                    "--input conflicts with the inline problem flags (--n, --sigma, ...)".into(),
                ));
            }
            let text = read_source(src)?;
            return serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("problem document: {e}")));
        }
        let n = self
            .n
            .ok_or_else(|| CliError::Usage("missing --n (or use --input)".into()))?;
        let lambda = self
            .lambda
            .ok_or_else(|| CliError::Usage("missing --lambda (or use --input)".into()))?;
        let sigma = scalar_flag("sigma", self.sigma, self.sigma_log)?
            .ok_or_else(|| CliError::Usage("missing --sigma or --sigma-log".into()))?;
        let d = scalar_flag("d", self.d, self.d_log)?
            .ok_or_else(|| CliError::Usage("missing --d or --d-log".into()))?;
        let b0 = scalar_flag("b0", self.b0, self.b0_log)?;
        let b0_mode = match (b0, self.dilation_invariant) {
            (Some(_), true) => {
                return Err(CliError::Usage(
                    "--b0/--b0-log and --dilation-invariant are mutually exclusive".into(),
                ))
            }
            (Some(b0), false) => B0Mode::Fixed(b0),
            (None, true) => B0Mode::DilationInvariant,
            (None, false) => {
                return Err(CliError::Usage(
                    "choose --b0 <value> (or --b0-log) or --dilation-invariant".into(),
                ))
            }
        };
        SelectionProblem::new(n, lambda, sigma, d, b0_mode).map_err(CliError::Core)
    }
}

/// Format a log-scale value for the table: plain float when in range,
/// `exp(L)` otherwise.
fn fmt_log_value(v: &LogScalar) -> String {
    if v.is_zero() {
        "0".into()
    } else if v.representable() {
        format!("{}", v.value())
    } else {
        format!("exp({})", v.ln())
    }
}

pub fn cmd_constants(args: ConstantsArgs) -> CmdResult {
    let ctx = TheoryContext::new(KernelParams::new(args.n, args.lambda, 1.0)?)?;
    let rd = &ctx.rho_delta;
    let mut table = String::new();
    let rows = [
        ("n", ctx.n().to_string()),
        ("lambda", ctx.lambda().to_string()),
        ("m", ctx.m().to_string()),
        ("gamma_n", ctx.gamma_n.to_string()),
        ("ln gamma_n", format!("{}", ctx.ln_gamma_n)),
        ("2 n gamma_n", format!("{}", ctx.big_exp)),
        ("rho", format!("{} ({}/{})", rd.rho, rd.rho_frac.0, rd.rho_frac.1)),
        ("delta0", fmt_log_value(&rd.delta0)),
        ("l(lambda,n)", fmt_log_value(&ctx.l_const)),
        ("C0(m,n)", fmt_log_value(&ctx.c0_const)),
        ("alpha_n", format!("{}", ctx.alpha_n)),
    ];
    for (label, value) in rows {
        table.push_str(&format!("{label:<12} {value}\n"));
    }
    print!("{table}");
    Ok(())
}

pub fn cmd_select(args: SelectArgs) -> CmdResult {
    let problem = args.problem.build()?;
    progress(&format!(
        "selecting c for n = {}, lambda = {}",
        problem.ctx().n(),
        problem.ctx().lambda()
    ));
    let rec = select_c(&problem)?;
    let mut json = serde_json::to_string_pretty(&rec)
        .map_err(|e| CliError::Parse(format!("serializing recommendation: {e}")))?;
    json.push('\n');
    write_output(&args.out, &json)
}

pub fn cmd_mn_curve(args: MnCurveArgs) -> CmdResult {
    let problem = args.problem.build()?;
    if args.points < 2 {
        return Err(CliError::Usage(format!(
            "--points must be at least 2, got {}",
            args.points
        )));
    }
    let derived = problem.derived();
    let ln_c0 = derived.c0.ln();
    let ln_c1 = derived.c1.as_ref().map(|c1| c1.ln());
    let ln_min = match scalar_flag("c-min", args.c_min, args.c_min_log)? {
        Some(c) => c.ln(),
        None => ln_c0,
    };
    let ln_max = match scalar_flag("c-max", args.c_max, args.c_max_log)? {
        Some(c) => c.ln(),
        None => match ln_c1 {
            Some(l) => l + 10f64.ln(),
            None => ln_c0 + 1e6f64.ln(),
        },
    };
    if ln_min < ln_c0 {
        return Err(CliError::Usage(format!(
            "c range starts below the floor c0: ln c_min = {ln_min} < ln c0 = {ln_c0}"
        )));
    }
    if !(ln_min < ln_max) {
        return Err(CliError::Usage(format!(
            "empty c range: ln c_min = {ln_min}, ln c_max = {ln_max}"
        )));
    }
    progress(&format!(
        "sampling ln MN over ln c in [{ln_min}, {ln_max}] at {} points",
        args.points
    ));
    let mut csv = String::from("c_log,log_mn,branch\n");
    let step = (ln_max - ln_min) / (args.points - 1) as f64;
    for i in 0..args.points {
        let t = if i + 1 == args.points { ln_max } else { ln_min + i as f64 * step };
        let c = LogScalar::from_ln(t)?;
        let value = log_mn_extended(&problem, &c)?;
        let branch = match ln_c1 {
            Some(l) => {
                if t < l {
                    "below-c1"
                } else {
                    "above-c1"
                }
            }
            None => "dilation",
        };
        csv.push_str(&format!("{t},{},{branch}\n", value.to_f64()));
    }
    write_output(&args.out, &csv)
}

pub fn cmd_interp(args: InterpArgs) -> CmdResult {
    let data: ScatteredData = serde_json::from_str(&read_file(&args.data)?)
        .map_err(|e| CliError::Parse(format!("data document: {e}")))?;
    data.validate()?;
    let params = KernelParams::new(data.n, args.lambda, args.c)?;
    let mut opts = BuildOptions::default();
    if let Some(tol) = args.tol_residual {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::Usage(format!(
                "--tol-residual must be a positive real, got {tol}"
            )));
        }
        opts.residual_tol = tol;
    }
    let q = poly_space_dim(data.n, params.m() - 1);
    progress(&format!(
        "solving saddle system: {} centers, {} polynomial conditions",
        data.len(),
        q
    ));
    let interp = build_interpolant(&data, &params, &opts)?;
    let mut json = serde_json::to_string_pretty(&interp)
        .map_err(|e| CliError::Parse(format!("serializing interpolant: {e}")))?;
    json.push('\n');
    write_output(&args.out, &json)?;
    if let Some(probe_path) = &args.probe {
        let probes: Vec<Vec<f64>> = serde_json::from_str(&read_file(probe_path)?)
            .map_err(|e| CliError::Parse(format!("probe document: {e}")))?;
        let mut csv = String::new();
        for i in 0..data.n {
            csv.push_str(&format!("x{i},"));
        }
        csv.push_str("s\n");
        for (idx, x) in probes.iter().enumerate() {
            if x.len() != data.n {
                return Err(CliError::Usage(format!(
                    "probe {idx} has dimension {}, expected {}",
                    x.len(),
                    data.n
                )));
            }
            let s = eval_interpolant(&interp, x)?;
            for v in x {
                csv.push_str(&format!("{v},"));
            }
            csv.push_str(&format!("{s}\n"));
        }
        // When both artifacts go to stdout, a blank line separates them.
        if args.out.is_none() && args.probe_out.is_none() {
            println!();
        }
        write_output(&args.probe_out, &csv)?;
    }
    Ok(())
}

/// Experiment configuration document.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    n: usize,
    lambda: u32,
    sigma: LogScalar,
    domain: CubeDomainSpec,
    c_values: Vec<f64>,
    center_grids: Vec<usize>,
    /// Relative jitter in [0, 1]: centers move by up to `jitter * spacing/2`.
    #[serde(default)]
    jitter: f64,
    #[serde(default)]
    seed: u64,
    /// Defaults to dilation-invariant (fixed b0 constrains d at desk scales).
    #[serde(default)]
    b0_mode: Option<B0Mode>,
    /// Probe lattice points per axis (error sweep and fill distance).
    #[serde(default)]
    probe_resolution: Option<usize>,
    /// Band-limited target as `[weight, center]` pairs; defaults to a single
    /// unit-weight term at the domain center.
    #[serde(default)]
    f_terms: Option<Vec<(f64, Vec<f64>)>>,
}

/// Domain as written in config files; revalidated through [`CubeDomain::new`]
/// because serde alone does not enforce the invariants.
#[derive(Deserialize)]
struct CubeDomainSpec {
    lower: Vec<f64>,
    side: f64,
}

pub fn cmd_experiment(args: ExperimentArgs) -> CmdResult {
    let mut cfg: ExperimentConfig = serde_json::from_str(&read_file(&args.config)?)
        .map_err(|e| CliError::Parse(format!("config document: {e}")))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = args.grid {
        cfg.center_grids = vec![grid];
    }
    let domain = CubeDomain::new(cfg.domain.lower.clone(), cfg.domain.side)?;
    if domain.dim() != cfg.n {
        return Err(CliError::Usage(format!(
            "domain dimension {} does not match n = {}",
            domain.dim(),
            cfg.n
        )));
    }
    if cfg.c_values.is_empty() {
        return Err(CliError::Usage("c_values must be nonempty".into()));
    }
    if cfg.center_grids.is_empty() {
        return Err(CliError::Usage("center_grids must be nonempty".into()));
    }
    if !(0.0..=1.0).contains(&cfg.jitter) {
        return Err(CliError::Usage(format!(
            "jitter must lie in [0, 1] (relative to half the grid spacing), got {}",
            cfg.jitter
        )));
    }
    if !cfg.sigma.representable() || cfg.sigma.is_zero() {
        return Err(CliError::Usage(
            "experiments need a float-representable sigma > 0".into(),
        ));
    }
    let sigma_f = cfg.sigma.value();
    let b0_mode = cfg.b0_mode.unwrap_or(B0Mode::DilationInvariant);
    let mut opts = ExperimentOptions::default();
    if let Some(res) = cfg.probe_resolution {
        opts.probe_resolution = res;
    }

    let terms = cfg.f_terms.clone().unwrap_or_else(|| {
        let center: Vec<f64> =
            domain.lower.iter().map(|lo| lo + domain.side / 2.0).collect();
        vec![(1.0, center)]
    });
    let f = make_sinc_product(sigma_f, cfg.n, &terms)?;

    // Deterministic job order: grids ascending, then c ascending.
    let mut grids = cfg.center_grids.clone();
    grids.sort_unstable();
    grids.dedup();
    let mut c_values = cfg.c_values.clone();
    for c in &c_values {
        if !(*c > 0.0) || !c.is_finite() {
            return Err(CliError::Usage(format!(
                "c_values entries must be positive reals, got {c}"
            )));
        }
    }
    c_values.sort_by(|a, b| a.partial_cmp(b).expect("finite c values"));
    c_values.dedup();

    let mut reports: Vec<ExperimentReport> = Vec::new();
    for (gi, &grid) in grids.iter().enumerate() {
        let mut centers = grid_centers(&domain, grid)?;
        if cfg.jitter > 0.0 {
            let spacing = domain.side / (grid - 1) as f64;
            let amplitude = cfg.jitter * spacing / 2.0;
            jitter_centers_seeded(&domain, &mut centers, amplitude, cfg.seed.wrapping_add(gi as u64))?;
        }
        let d = fill_distance(&domain, &centers, opts.probe_resolution)?;
        let problem = SelectionProblem::new(
            cfg.n,
            cfg.lambda,
            cfg.sigma,
            LogScalar::from_value(d)?,
            b0_mode,
        )?;
        for &c in &c_values {
            progress(&format!(
                "experiment: grid {grid}^{} ({} centers), c = {c}",
                cfg.n,
                centers.len()
            ));
            let params = KernelParams::new(cfg.n, cfg.lambda, c)?;
            let report = run_bound_experiment(&f, &domain, &centers, &params, &problem, &opts)?;
            reports.push(report);
        }
    }

    let mut csv = String::from(ExperimentReport::csv_header());
    csv.push('\n');
    for r in &reports {
        csv.push_str(&r.to_csv_row());
        csv.push('\n');
    }
    write_output(&args.out, &csv)?;
    if let Some(json_path) = &args.json_out {
        let mut json = serde_json::to_string_pretty(&reports)
            .map_err(|e| CliError::Parse(format!("serializing reports: {e}")))?;
        json.push('\n');
        fs::write(json_path, json)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", json_path.display())))?;
    }
    Ok(())
}
