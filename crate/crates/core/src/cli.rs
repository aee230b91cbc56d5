//! Command-line front end: configuration, sweeps, CSV and SVG output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 computation error, 4 I/O error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

use crate::dynamics::{plan_truncation, AnalyticEvolution, TruncationPlan};
use crate::measures::{Measure, MeasureSample};
use crate::model::{scenario_preset, validate, DeformationFunction, ModelParams, ScenarioLabel};
use crate::oracle;
use crate::pipeline::{self, time_grid};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Mean photon number above which the oracle check is capped.
pub const ORACLE_ALPHA_SQ_CAP: f64 = 5.0;
/// Minimum closed-form vs oracle fidelity accepted by `--oracle-check`.
pub const ORACLE_MIN_FIDELITY: f64 = 1.0 - 1e-8;

pub const CSV_HEADER: &str = "gt,entropy,tangle,concurrence,trace_tail";

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
    fn compute(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_COMPUTE,
            message: message.into(),
        }
    }
    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Entanglement dynamics of two atoms in a deformed multi-photon Kerr cavity.
#[derive(Parser, Debug, Default)]
#[command(name = "cavity-entangle", version)]
struct Flags {
    /// Parameter preset: a, b, c, d or e.
    #[arg(long)]
    scenario: Option<String>,
    /// Photon multiplicity (each atomic flip exchanges 2k photons).
    #[arg(long)]
    k: Option<usize>,
    /// Initial atomic angle: cos(theta/2)|ee> + sin(theta/2)|gg>.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Mean photon number of the initial coherent field.
    #[arg(long = "alpha-sq", allow_hyphen_values = true)]
    alpha_sq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<f64>,
    /// unity or sqrt-n
    #[arg(long)]
    deformation: Option<String>,
    /// Final scaled time g t.
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<f64>,
    /// Number of grid points including both ends.
    #[arg(long)]
    steps: Option<usize>,
    /// Neglected coherent-state mass.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Comma-separated subset of entropy,tangle,concurrence.
    #[arg(long)]
    measures: Option<String>,
    /// Compare every grid point against the dense Fock-space evolution.
    #[arg(long = "oracle-check")]
    oracle_check: bool,
    /// Also write one SVG chart per measure.
    #[arg(long)]
    svg: bool,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value configuration file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: ScenarioLabel,
    pub params: ModelParams,
    /// Final scaled time `g t`.
    pub t_max: f64,
    pub steps: usize,
    pub measures: Vec<Measure>,
    pub truncation_tol: f64,
    pub oracle_check: bool,
    pub svg: bool,
    pub out: Option<PathBuf>,
    pub warnings: Vec<String>,
}

const FILE_KEYS: [&str; 16] = [
    "scenario",
    "k",
    "theta",
    "alpha-sq",
    "chi",
    "delta",
    "beta1",
    "beta2",
    "deformation",
    "tmax",
    "steps",
    "tol",
    "measures",
    "oracle-check",
    "svg",
    "out",
];

/// Parses a flat `key = value` file. `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("invalid value for {key}: `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::config(format!("invalid value for {key}: `{value}`"))),
    }
}

fn parse_measures(value: &str) -> Result<Vec<Measure>, CliError> {
    let mut out = Vec::new();
    for item in value.split(',').filter(|s| !s.trim().is_empty()) {
        let m = Measure::parse(item).ok_or_else(|| CliError::config(format!("unknown measure `{}`", item.trim())))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::config("at least one measure is required"));
    }
    Ok(out)
}

fn parse_deformation(value: &str) -> Result<DeformationFunction, CliError> {
    match value {
        "unity" => Ok(DeformationFunction::Unity),
        "sqrt-n" => Ok(DeformationFunction::SqrtN),
        other => Err(CliError::config(format!(
            "unknown deformation `{other}` (expected unity or sqrt-n)"
        ))),
    }
}

/// Builds a configuration from command-line arguments (without the program name).
pub fn parse_config<I, S>(args: I) -> Result<SweepConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("cavity-entangle".to_string()).chain(args.into_iter().map(Into::into));
    let flags = Flags::try_parse_from(argv).map_err(|e| CliError {
        code: if e.use_stderr() { EXIT_CONFIG } else { 0 },
        message: e.to_string(),
    })?;

    let mut file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut take = |key: &str| file.remove(key);

    macro_rules! merged {
        ($flag:expr, $key:literal) => {
            match $flag {
                Some(v) => Some(v),
                None => take($key).map(|s| parse_value($key, &s)).transpose()?,
            }
        };
    }

    let scenario_name: Option<String> = merged!(flags.scenario.clone(), "scenario");
    let k: Option<usize> = merged!(flags.k, "k");
    let theta: Option<f64> = merged!(flags.theta, "theta");
    let alpha_sq: Option<f64> = merged!(flags.alpha_sq, "alpha-sq");
    let chi: Option<f64> = merged!(flags.chi, "chi");
    let delta: Option<f64> = merged!(flags.delta, "delta");
    let beta1: Option<f64> = merged!(flags.beta1, "beta1");
    let beta2: Option<f64> = merged!(flags.beta2, "beta2");
    let deformation: Option<String> = merged!(flags.deformation.clone(), "deformation");
    let t_max: Option<f64> = merged!(flags.tmax, "tmax");
    let steps: Option<usize> = merged!(flags.steps, "steps");
    let tol: Option<f64> = merged!(flags.tol, "tol");
    let measures: Option<String> = merged!(flags.measures.clone(), "measures");
    let out: Option<PathBuf> = merged!(flags.out.clone(), "out");
    let oracle_check = flags.oracle_check
        || take("oracle-check")
            .map(|v| parse_bool("oracle-check", &v))
            .transpose()?
            .unwrap_or(false);
    let svg = flags.svg || take("svg").map(|v| parse_bool("svg", &v)).transpose()?.unwrap_or(false);

    let scenario =
        ScenarioLabel::parse(scenario_name.as_deref().unwrap_or("a")).map_err(|e| CliError::config(e.to_string()))?;
    let k = k.unwrap_or(1);
    let mut params = scenario_preset(scenario).params(k);
    if let Some(v) = theta {
        params.theta = v;
    }
    if let Some(v) = alpha_sq {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::config(format!("alpha-sq must be finite and ≥ 0 (got {v})")));
        }
        params = params.with_alpha_sq(v);
    }
    if let Some(v) = chi {
        params.chi = v;
    }
    if let Some(v) = delta {
        params.delta = v;
    }
    if let Some(v) = beta1 {
        params.beta1 = v;
    }
    if let Some(v) = beta2 {
        params.beta2 = v;
    }
    if let Some(v) = deformation {
        params.deformation = parse_deformation(&v)?;
    }

    let mut warnings = Vec::new();
    if oracle_check && params.mean_photon_number() > ORACLE_ALPHA_SQ_CAP {
        warnings.push(format!(
            "oracle check: |alpha|^2 = {} capped at {ORACLE_ALPHA_SQ_CAP}",
            params.mean_photon_number()
        ));
        params = params.with_alpha_sq(ORACLE_ALPHA_SQ_CAP);
    }
    let params = validate(params).map_err(|e| CliError::config(e.to_string()))?;
    warnings.extend(params.elimination_warning());

    let t_max = t_max.unwrap_or(25.0);
    let steps = steps.unwrap_or(500);
    let truncation_tol = tol.unwrap_or(1e-12);
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CliError::config(format!("tmax must be > 0 (got {t_max})")));
    }
    if steps < 2 {
        return Err(CliError::config(format!("steps must be ≥ 2 (got {steps})")));
    }
    if !(truncation_tol > 0.0 && truncation_tol <= 1e-3) {
        return Err(CliError::config(format!(
            "tol must lie in (0, 1e-3] (got {truncation_tol})"
        )));
    }
    let measures = match measures {
        Some(list) => parse_measures(&list)?,
        None => Measure::ALL.to_vec(),
    };

    Ok(SweepConfig {
        scenario,
        params,
        t_max,
        steps,
        measures,
        truncation_tol,
        oracle_check,
        svg,
        out,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub samples: Vec<MeasureSample>,
    pub plan: TruncationPlan,
    /// Degenerate manifolds that were skipped.
    pub reports: Vec<String>,
    /// Smallest closed-form vs oracle fidelity over the grid, when checked.
    pub oracle_min_fidelity: Option<f64>,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, CliError> {
    let params = &config.params;
    let plan = plan_truncation(params.alpha, config.truncation_tol, params.k);
    let times = time_grid(params.g, config.t_max, config.steps);
    let outcome =
        pipeline::run(params, &plan, &times, &config.measures).map_err(|e| CliError::compute(e.to_string()))?;

    let oracle_min_fidelity = if config.oracle_check {
        Some(oracle_min_fidelity(params, &plan, &times)?)
    } else {
        None
    };
    if let Some(f) = oracle_min_fidelity {
        if f < ORACLE_MIN_FIDELITY {
            return Err(CliError::compute(format!(
                "oracle check failed: fidelity {f} < {ORACLE_MIN_FIDELITY}"
            )));
        }
    }

    Ok(SweepReport {
        samples: outcome.samples,
        plan,
        reports: outcome.reports,
        oracle_min_fidelity,
    })
}

fn oracle_min_fidelity(params: &ModelParams, plan: &TruncationPlan, times: &[f64]) -> Result<f64, CliError> {
    let compute = |e: crate::Error| CliError::compute(e.to_string());
    let analytic = AnalyticEvolution::new(params, plan).map_err(compute)?;
    let hamiltonian = oracle::build_hamiltonian(params, plan.n_max).map_err(compute)?;
    let propagator = oracle::Propagator::new(&hamiltonian).map_err(compute)?;
    let psi0 = oracle::initial_state(params, plan);
    let prepared = propagator.prepare(&psi0);
    let fidelities: Vec<_> = times
        .par_iter()
        .map(|&t| {
            let mut state = analytic.state_at(t);
            if let crate::Picture::IncludeFreePhase { .. } = params.picture {
                // the oracle runs in the interaction picture
                state = AnalyticEvolution {
                    params: ModelParams {
                        picture: crate::Picture::Interaction,
                        ..params.clone()
                    },
                    ..analytic.clone()
                }
                .state_at(t);
            }
            oracle::state_fidelity(&state, &prepared.at(t))
        })
        .collect();
    fidelities
        .into_iter()
        .try_fold(1.0f64, |acc, f| f.map(|f| acc.min(f)))
        .map_err(compute)
}

fn format_number(x: f64) -> String {
    format!("{x:?}")
}

/// CSV text with LF line endings; absent measures are empty fields.
pub fn csv_string(samples: &[MeasureSample], g: f64) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let field = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_number(g * s.t),
            field(s.entropy),
            field(s.tangle),
            field(s.concurrence),
            format_number(s.trace_tail)
        );
    }
    out
}

pub fn emit_csv(samples: &[MeasureSample], g: f64, path: &Path) -> Result<(), CliError> {
    if samples.is_empty() {
        return Err(CliError::compute("no samples to write"));
    }
    fs::write(path, csv_string(samples, g)).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn measure_value(s: &MeasureSample, measure: Measure) -> Option<f64> {
    match measure {
        Measure::Entropy => s.entropy,
        Measure::Tangle => s.tangle,
        Measure::Concurrence => s.concurrence,
    }
}

/// Static polyline chart of one measure against `g t`.
pub fn svg_string(samples: &[MeasureSample], g: f64, measure: Measure) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| measure_value(s, measure).map(|v| (g * s.t, v)))
        .collect();
    let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let y_max = points.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let sx = |x: f64| PAD + (W - 2.0 * PAD) * x / x_max;
    let sy = |y: f64| H - PAD - (H - 2.0 * PAD) * y / y_max;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" points="{PAD},{top} {PAD},{bottom} {right},{bottom}"/>"#,
        top = PAD,
        bottom = H - PAD,
        right = W - PAD
    );
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="14" text-anchor="middle">gt (0 to {x_max})</text>"#,
        x = W / 2.0,
        y = H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{y}" font-family="sans-serif" font-size="14" transform="rotate(-90 14 {y})" text-anchor="middle">{name} (max {y_max:.4})</text>"#,
        y = H / 2.0,
        name = measure.name()
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg(samples: &[MeasureSample], g: f64, measure: Measure, path: &Path) -> Result<(), CliError> {
    if samples.is_empty() {
        return Err(CliError::compute("no samples to plot"));
    }
    fs::write(path, svg_string(samples, g, measure))
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn svg_path(out: Option<&Path>, measure: Measure) -> PathBuf {
    match out {
        Some(path) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
            path.with_file_name(format!("{stem}_{}.svg", measure.name()))
        }
        None => PathBuf::from(format!("sweep_{}.svg", measure.name())),
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match run_cli(args) {
        Ok(()) => 0,
        Err(e) => {
            if e.code == 0 {
                print!("{e}");
            } else {
                eprintln!("error: {e}");
            }
            e.code
        }
    }
}

fn run_cli<I, S>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let config = parse_config(args)?;
    for warning in &config.warnings {
        eprintln!("warning: {warning}");
    }
    let report = run_sweep(&config)?;
    for line in &report.reports {
        eprintln!("skipped: {line}");
    }
    if let Some(f) = report.oracle_min_fidelity {
        eprintln!("oracle check: minimum fidelity {f}");
    }
    let g = config.params.g;
    match &config.out {
        Some(path) => emit_csv(&report.samples, g, path)?,
        None => print!("{}", csv_string(&report.samples, g)),
    }
    if config.svg {
        for &measure in &config.measures {
            emit_svg(&report.samples, g, measure, &svg_path(config.out.as_deref(), measure))?;
        }
    }
    Ok(())
}
