//! `qcrb-kit`: point reports, weight and spectrum sweeps, the invariant
//! suite and Monte Carlo runs, emitted as versioned CSV or JSON tables.
//!
//! Exit codes: 0 when every check passes, 1 for configuration errors,
//! 2 for numerical check failures.

pub mod grid;
pub mod table;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use qcrb_core::classical::{bound_check, Povm};
use qcrb_core::config::{ModelConfig, PovmConfig};
use qcrb_core::models::{
    builtin, builtin_names, DerivOptions, PureFamily, QubitMixtureModel, SmoothFrame,
    SpectralMixtureModel, Spectrum, StateModel, WeightFunction, DEFAULT_FD_STEP,
};
use qcrb_core::quantum::{relation_report, QuantumInfoResult, Tolerances};
use qcrb_core::sim::{run_sim, EstimatorKind, SimConfig};
use qcrb_core::verify::{run_suite, Mutation, SuiteTolerances, VerifyOptions};
use qcrb_core::QcrbError;

pub use grid::Grid;
pub use table::{num, opt, OutputFormat, Table, FORMAT_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "qcrb-kit",
    version,
    about = "Quantum Fisher information toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information report at one theta or on a theta grid.
    Compute(ComputeArgs),
    /// Constant-weight qubit mixtures on a grid of weights.
    SweepW(SweepWArgs),
    /// Spectrum interpolated from a start vector to uniform.
    SweepSpectrum(SweepSpectrumArgs),
    /// Invariant suite over the builtin catalog.
    Verify(VerifyArgs),
    /// Monte Carlo run of the one-step estimator.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Output file; stdout when omitted or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Central-difference step.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Gate for residuals computed from analytic derivatives.
    #[arg(long)]
    pub tol_analytic: Option<f64>,
    /// Gate for residuals with a finite-difference ingredient.
    #[arg(long)]
    pub tol_fd: Option<f64>,
    /// Sets every gate at once; the specific flags take precedence.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model config (JSON).
    #[arg(long, conflicts_with = "builtin")]
    pub model: Option<PathBuf>,
    /// Builtin catalog model, e.g. `qubit-rotation` or `spectral-random(1, 3)`.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// POVM config (JSON); adds the classical Fisher columns.
    #[arg(long)]
    pub povm: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "theta_grid")]
    pub theta: Option<f64>,
    /// `lo:hi:steps`, inclusive, `steps` points.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_grid: Option<Grid>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepWArgs {
    /// Mixture config whose `psi1` family is used; the rotation family
    /// when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, default_value = "0.5:0.9:5")]
    pub w_grid: Grid,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.3)]
    pub theta: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FrameKind {
    /// Rotation in the first coordinate plane.
    Rotation,
    /// Seeded random smooth frame.
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SweepSpectrumArgs {
    /// Starting eigenvalues, comma separated.
    #[arg(long, default_value = "0.7,0.2,0.1")]
    pub start: String,
    /// Interpolation parameter grid: 0 is the start spectrum, 1 uniform.
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:11")]
    pub t_grid: Grid,
    #[arg(long, value_enum, default_value = "random")]
    pub frame: FrameKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.3)]
    pub theta: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Offsets one invariant's residual: `id` or `id=offset`.
    #[arg(long, hide = true)]
    pub mutate: Vec<String>,
    /// Adds a model whose density matrix has this trace.
    #[arg(long, hide = true)]
    pub inject_corrupt_trace: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// POVM config (JSON); computational basis when omitted.
    #[arg(long)]
    pub povm: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Message of a core error without the generic `configuration error` prefix.
fn core_msg(e: QcrbError) -> String {
    match e {
        QcrbError::Config(m) => m,
        other => other.to_string(),
    }
}

fn numerical(e: QcrbError) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Result of a command: rendered output and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl NumericArgs {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(config_err(format!(
                "--fd-step must be > 0, got {}",
                self.fd_step
            )));
        }
        for (flag, v) in [
            ("--tol", self.tol),
            ("--tol-analytic", self.tol_analytic),
            ("--tol-fd", self.tol_fd),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(config_err(format!("{flag} must be > 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    fn deriv(&self) -> DerivOptions {
        DerivOptions {
            step: self.fd_step,
            force_finite_difference: false,
        }
    }

    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            analytic: self.tol_analytic.or(self.tol).unwrap_or(d.analytic),
            finite_difference: self.tol_fd.or(self.tol).unwrap_or(d.finite_difference),
        }
    }

    fn suite_tolerances(&self) -> SuiteTolerances {
        let mut t = self
            .tol
            .map_or_else(SuiteTolerances::default, SuiteTolerances::uniform);
        let rel = self.tolerances();
        t.analytic = rel.analytic;
        t.finite_difference = rel.finite_difference;
        t
    }

    fn tolerance_map(&self) -> BTreeMap<String, f64> {
        let t = self.tolerances();
        BTreeMap::from([
            ("analytic".to_string(), t.analytic),
            ("fd_step".to_string(), self.fd_step),
            ("finite_difference".to_string(), t.finite_difference),
        ])
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn load_model(args: &ModelArgs) -> Result<StateModel, CliError> {
    match (&args.model, &args.builtin) {
        (Some(path), _) => {
            let text = read_file(path)?;
            ModelConfig::from_json(&text)
                .and_then(|c| c.build())
                .map_err(|e| config_err(format!("{}: {}", path.display(), core_msg(e))))
        }
        (None, Some(name)) => builtin(name).ok_or_else(|| {
            config_err(format!(
                "unknown builtin model `{name}`; available: {}",
                builtin_names().join(", ")
            ))
        }),
        (None, None) => Err(config_err("one of --model or --builtin is required")),
    }
}

fn load_povm(path: Option<&Path>, dim: usize) -> Result<Option<Povm>, CliError> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = read_file(path)?;
    let povm = PovmConfig::from_json(&text)
        .and_then(|c| c.build())
        .map_err(|e| config_err(format!("{}: {}", path.display(), core_msg(e))))?;
    if povm.dim() != dim {
        return Err(config_err(format!(
            "{}: POVM dimension {} does not match model dimension {dim}",
            path.display(),
            povm.dim()
        )));
    }
    Ok(Some(povm))
}

fn max_gated(r: &QuantumInfoResult, tols: &Tolerances) -> f64 {
    r.residuals
        .iter()
        .filter(|(k, _)| r.residual_tolerance(k, tols).is_some())
        .map(|(_, v)| *v)
        .fold(0.0, f64::max)
}

const COMPUTE_COLUMNS: &[&str] = &[
    "theta",
    "i_h",
    "i_wy",
    "ratio",
    "gap",
    "i_h_closed",
    "i_h_spectral",
    "i_wy_closed",
    "i_wy_spectral",
    "i_wy_fd",
    "alpha",
    "beta",
    "gamma",
    "score_mean",
    "sharp_bound",
    "approx_bound",
    "i_classical",
    "bound_gap",
    "bound_ok",
    "crb",
    "max_residual",
    "pass",
    "error",
];

fn compute_row(
    model: &StateModel,
    povm: Option<&Povm>,
    theta: f64,
    opts: &DerivOptions,
    tols: &Tolerances,
) -> (Vec<Value>, bool) {
    let n = COMPUTE_COLUMNS.len();
    let mut row = vec![Value::Null; n];
    row[0] = num(theta);
    let r = match relation_report(model, theta, opts) {
        Ok(r) => r,
        Err(e) => {
            row[n - 2] = Value::Bool(false);
            row[n - 1] = Value::String(e.to_string());
            return (row, false);
        }
    };
    let mut pass = r.failures(tols).is_empty();
    let mut error = None;
    let (mut ic, mut bg, mut bok, mut crb) = (Value::Null, Value::Null, Value::Null, Value::Null);
    if let Some(p) = povm {
        match bound_check(model, theta, p, opts) {
            Ok(b) => {
                pass &= b.ok;
                ic = num(b.i);
                bg = num(b.gap);
                bok = Value::Bool(b.ok);
                crb = opt(b.inv_i);
            }
            Err(e) => {
                pass = false;
                error = Some(e.to_string());
            }
        }
    }
    if error.is_none() && !r.errors.is_empty() {
        let notes: Vec<String> = r.errors.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        error = Some(notes.join("; "));
    }
    row = vec![
        num(theta),
        num(r.i_h()),
        num(r.i_wy()),
        opt(r.ratio()),
        num(r.gap()),
        opt(r.i_h_closed),
        opt(r.i_h_spectral),
        opt(r.i_wy_closed),
        opt(r.i_wy_spectral),
        opt(r.i_wy_fd),
        opt(r.alpha),
        opt(r.beta),
        opt(r.gamma),
        num(r.score_mean),
        opt(r.sharp_bound),
        opt(r.approx_bound),
        ic,
        bg,
        bok,
        crb,
        num(max_gated(&r, tols)),
        Value::Bool(pass),
        error.map_or(Value::Null, Value::String),
    ];
    (row, pass)
}

pub fn cmd_compute(args: &ComputeArgs) -> Result<Outcome, CliError> {
    args.numeric.validate()?;
    let model = load_model(&args.model)?;
    let povm = load_povm(args.povm.as_deref(), model.dim())?;
    let thetas = match (args.theta, args.theta_grid) {
        (Some(t), _) => vec![t],
        (None, Some(g)) => g.points(),
        (None, None) => return Err(config_err("one of --theta or --theta-grid is required")),
    };
    let (lo, hi) = model.domain();
    if let Some(t) = thetas.iter().find(|t| !(**t >= lo && **t <= hi)) {
        return Err(config_err(format!(
            "theta = {t} outside the model domain [{lo}, {hi}]"
        )));
    }
    let opts = args.numeric.deriv();
    let tols = args.numeric.tolerances();
    let rows: Vec<(Vec<Value>, bool)> = thetas
        .par_iter()
        .map(|&t| compute_row(&model, povm.as_ref(), t, &opts, &tols))
        .collect();
    let mut table = Table::new("compute", COMPUTE_COLUMNS, args.numeric.tolerance_map());
    let mut pass = true;
    for (row, ok) in rows {
        pass &= ok;
        table.push(row);
    }
    render(&table, args.output.format, pass)
}

const SWEEP_W_COLUMNS: &[&str] = &[
    "w",
    "theta",
    "i_h",
    "i_wy",
    "ratio",
    "gap",
    "gap_closed",
    "alpha",
    "beta",
    "gamma",
    "max_residual",
    "pass",
    "error",
];

pub fn cmd_sweep_w(args: &SweepWArgs) -> Result<Outcome, CliError> {
    args.numeric.validate()?;
    let family = match &args.model {
        Some(path) => {
            let text = read_file(path)?;
            ModelConfig::from_json(&text)
                .and_then(|c| c.pure_family(2))
                .map_err(|e| config_err(format!("{}: {}", path.display(), core_msg(e))))?
        }
        None => PureFamily::rotation(),
    };
    let ws = args.w_grid.points();
    if let Some(w) = ws.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return Err(config_err(QcrbError::Domain(format!(
            "weight grid point {w} is not in (0, 1)"
        ))));
    }
    let opts = args.numeric.deriv();
    let tols = args.numeric.tolerances();
    let theta = args.theta;
    let i_h1 = qcrb_core::quantum::helstrom_info_pure(&family, theta, &opts).map_err(numerical)?;
    let rows: Vec<(Vec<Value>, bool)> = ws
        .par_iter()
        .map(|&w| {
            let closed = (1.0 - 2.0 * (w * (1.0 - w)).sqrt()).powi(2) * i_h1;
            let fail = |e: QcrbError| {
                let mut row = vec![Value::Null; SWEEP_W_COLUMNS.len()];
                row[0] = num(w);
                row[1] = num(theta);
                row[6] = num(closed);
                row[11] = Value::Bool(false);
                row[12] = Value::String(e.to_string());
                (row, false)
            };
            let q = match QubitMixtureModel::canonical(family.clone(), WeightFunction::Constant(w))
            {
                Ok(q) => q,
                Err(e) => return fail(e),
            };
            let model = StateModel::qubit_mixture(format!("constant w={w}"), q);
            let r = match relation_report(&model, theta, &opts) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let pass = r.failures(&tols).is_empty();
            let row = vec![
                num(w),
                num(theta),
                num(r.i_h()),
                num(r.i_wy()),
                opt(r.ratio()),
                num(r.gap()),
                num(closed),
                opt(r.alpha),
                opt(r.beta),
                opt(r.gamma),
                num(max_gated(&r, &tols)),
                Value::Bool(pass),
                Value::Null,
            ];
            (row, pass)
        })
        .collect();
    let mut table = Table::new("sweep-w", SWEEP_W_COLUMNS, args.numeric.tolerance_map());
    let mut pass = true;
    for (row, ok) in rows {
        pass &= ok;
        table.push(row);
    }
    render(&table, args.output.format, pass)
}

fn parse_spectrum(text: &str) -> Result<Vec<f64>, CliError> {
    let l: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| config_err(format!("--start `{text}`: {e}")))?;
    if l.len() < 2 {
        return Err(config_err("--start needs at least two eigenvalues"));
    }
    Spectrum::constant(l.clone()).map_err(config_err)?;
    Ok(l)
}

/// `(1 - t) start + t / n`.
pub fn interpolate_spectrum(start: &[f64], t: f64) -> Vec<f64> {
    let n = start.len() as f64;
    start.iter().map(|l| (1.0 - t) * l + t / n).collect()
}

pub fn cmd_sweep_spectrum(args: &SweepSpectrumArgs) -> Result<Outcome, CliError> {
    args.numeric.validate()?;
    let start = parse_spectrum(&args.start)?;
    let n = start.len();
    let ts = args.t_grid.points();
    if let Some(t) = ts.iter().find(|t| !(**t >= 0.0 && **t <= 1.0)) {
        return Err(config_err(format!("t grid point {t} is not in [0, 1]")));
    }
    let frame = match args.frame {
        FrameKind::Rotation => SmoothFrame::plane_rotation(n),
        FrameKind::Random => SmoothFrame::random(n, 0.5, &mut ChaCha8Rng::seed_from_u64(args.seed)),
    };
    let mut columns: Vec<String> = vec!["t".into(), "theta".into()];
    columns.extend((1..=n).map(|l| format!("lambda_{l}")));
    columns.extend(
        [
            "i_h",
            "i_wy",
            "ratio",
            "gap",
            "gamma",
            "gamma_gap",
            "max_residual",
            "pass",
            "error",
        ]
        .map(String::from),
    );
    let width = columns.len();
    let opts = args.numeric.deriv();
    let tols = args.numeric.tolerances();
    let theta = args.theta;
    let rows: Vec<(Vec<Value>, bool)> = ts
        .par_iter()
        .map(|&t| {
            let lambdas = interpolate_spectrum(&start, t);
            let mut row = vec![num(t), num(theta)];
            row.extend(lambdas.iter().map(|&l| num(l)));
            let report = Spectrum::constant(lambdas)
                .and_then(|s| SpectralMixtureModel::new(s, frame.clone()))
                .and_then(|m| {
                    relation_report(
                        &StateModel::spectral(format!("interpolated t={t}"), m),
                        theta,
                        &opts,
                    )
                });
            match report {
                Ok(r) => {
                    let pass = r.failures(&tols).is_empty();
                    row.extend([
                        num(r.i_h()),
                        num(r.i_wy()),
                        opt(r.ratio()),
                        num(r.gap()),
                        opt(r.gamma),
                        opt(r.residuals.get("gamma_gap").copied()),
                        num(max_gated(&r, &tols)),
                        Value::Bool(pass),
                        Value::Null,
                    ]);
                    (row, pass)
                }
                Err(e) => {
                    row.resize(width - 2, Value::Null);
                    row.push(Value::Bool(false));
                    row.push(Value::String(e.to_string()));
                    (row, false)
                }
            }
        })
        .collect();
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("sweep-spectrum", &cols, args.numeric.tolerance_map());
    let mut pass = true;
    for (row, ok) in rows {
        pass &= ok;
        table.push(row);
    }
    render(&table, args.output.format, pass)
}

fn parse_mutation(text: &str) -> Result<Mutation, CliError> {
    let (id, offset) = match text.split_once('=') {
        Some((id, v)) => (
            id,
            v.parse::<f64>()
                .map_err(|e| config_err(format!("--mutate `{text}`: {e}")))?,
        ),
        None => (text, 1e-3),
    };
    Ok(Mutation {
        invariant: id.to_string(),
        offset,
    })
}

const VERIFY_COLUMNS: &[&str] = &[
    "invariant",
    "class",
    "tolerance",
    "residual",
    "checks",
    "pass",
    "worst_case",
    "failures",
];

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    args.numeric.validate()?;
    let mutations = args
        .mutate
        .iter()
        .map(|m| parse_mutation(m))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = VerifyOptions {
        tolerances: args.numeric.suite_tolerances(),
        deriv: args.numeric.deriv(),
        mutations,
        corrupt_trace: args.inject_corrupt_trace,
        ..Default::default()
    };
    let report = run_suite(&opts);
    let t = report.tolerances;
    let tolerances = BTreeMap::from([
        ("analytic".to_string(), t.analytic),
        ("fd_step".to_string(), args.numeric.fd_step),
        ("finite_difference".to_string(), t.finite_difference),
        ("identity".to_string(), t.identity),
        ("structural".to_string(), t.structural),
    ]);
    let mut table = Table::new("verify", VERIFY_COLUMNS, tolerances);
    for inv in &report.invariants {
        let class = serde_json::to_value(inv.class).unwrap_or(Value::Null);
        table.push(vec![
            Value::String(inv.id.clone()),
            class,
            num(inv.tolerance),
            num(inv.residual),
            Value::from(inv.checks as u64),
            Value::Bool(inv.pass),
            Value::String(inv.worst_case.clone()),
            if inv.failures.is_empty() {
                Value::Null
            } else {
                Value::String(inv.failures.join(" | "))
            },
        ]);
    }
    render(&table, args.output.format, report.all_pass())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    args.numeric.validate()?;
    let model = load_model(&args.model)?;
    let povm =
        load_povm(args.povm.as_deref(), model.dim())?.unwrap_or_else(|| Povm::basis(model.dim()));
    let (lo, hi) = model.domain();
    if !(args.theta >= lo && args.theta <= hi) {
        return Err(config_err(format!(
            "theta = {} outside the model domain [{lo}, {hi}]",
            args.theta
        )));
    }
    if args.samples < qcrb_core::sim::MIN_SAMPLES {
        return Err(config_err(format!(
            "--samples must be at least {}",
            qcrb_core::sim::MIN_SAMPLES
        )));
    }
    let cfg = SimConfig {
        theta0: args.theta,
        n_samples: args.samples,
        seed: args.seed,
        estimator: EstimatorKind::OneStep,
    };
    let result = run_sim(&model, &povm, &cfg, &args.numeric.deriv()).map_err(numerical)?;
    let tolerances = args.numeric.tolerance_map();
    let text = match args.output.format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "format": FORMAT_VERSION,
                "command": "simulate",
                "tolerances": tolerances,
                "result": result,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(config_err)?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let value = serde_json::to_value(&result).map_err(config_err)?;
            let mut table = Table::new(
                "simulate",
                &qcrb_core::sim::SimResult::CSV_COLUMNS,
                tolerances,
            );
            table.push(
                qcrb_core::sim::SimResult::CSV_COLUMNS
                    .iter()
                    .map(|c| value.get(*c).cloned().unwrap_or(Value::Null))
                    .collect(),
            );
            table.to_csv().map_err(config_err)?
        }
    };
    Ok(Outcome {
        text,
        pass: result.bound_chain_ok,
    })
}

fn render(table: &Table, format: OutputFormat, pass: bool) -> Result<Outcome, CliError> {
    Ok(Outcome {
        text: table.render(format).map_err(config_err)?,
        pass,
    })
}

fn output_target(cmd: &Command) -> Option<&Path> {
    let out = match cmd {
        Command::Compute(a) => &a.output,
        Command::SweepW(a) => &a.output,
        Command::SweepSpectrum(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Simulate(a) => &a.output,
    };
    out.out.as_deref().filter(|p| *p != Path::new("-"))
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Compute(a) => cmd_compute(a),
        Command::SweepW(a) => cmd_sweep_w(a),
        Command::SweepSpectrum(a) => cmd_sweep_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "qcrb-kit: {e}");
            return e.exit_code();
        }
    };
    let written = match output_target(&cli.command) {
        Some(path) => {
            std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => stdout
            .write_all(outcome.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "qcrb-kit: cannot write output: {e}");
        return 1;
    }
    if outcome.pass {
        0
    } else {
        let _ = writeln!(stderr, "qcrb-kit: one or more checks failed");
        2
    }
}
