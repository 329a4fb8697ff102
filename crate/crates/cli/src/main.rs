//! `coherent-shor`: batch driver for channel, oracle, Ramsey, fringe, sweep,
//! fit and verification runs.
//!
//! Exit status: 0 on success, 2 for usage or validation errors, 1 for I/O
//! failures and failed verification.

mod config;
mod grid;
mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coherent_shor::channels::{repetition_channel, shor_variant_channel, ChannelReport, LogicalChannel};
use coherent_shor::codes::{build_repetition_code, build_shor_code, CodeDocument, CodeSpec, IonMapping, ShorVariant};
use coherent_shor::experiments::{fig3_times, ghz_fringe, ghz_ramsey, logical_ramsey, single_round_sweep, RunOptions};
use coherent_shor::fitting::{fit_cosine_weighted, fit_exp_decay_weighted, weights_from_stderr, FitResult};
use coherent_shor::noise::{shot_rng, NoiseModel};
use coherent_shor::oracle::Oracle;
use coherent_shor::quantum::{GhzOrder, MAX_QUBITS};
use coherent_shor::SyndromeBranch64;
use rand::Rng;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::grid::{parse_grid, parse_list};
use crate::output::{curves_to_csv, emit, to_json};

#[derive(Parser, Debug)]
#[command(name = "coherent-shor", version, about = "Logical channels of repetition and Shor codes under coherent dephasing")]
struct Cli {
    /// Worker threads for shot and sweep parallelism.
    #[arg(long, global = true, env = "COHERENT_SHOR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form logical channel and infidelity (JSON).
    Channel(ChannelArgs),
    /// Per-syndrome branches from the state-vector simulator (JSON).
    Oracle(OracleArgs),
    /// GHZ or logical Ramsey decay curves (CSV).
    Ramsey(RamseyArgs),
    /// Per-row GHZ fringes of a Shor code (CSV).
    Fringe(FringeArgs),
    /// Single-round infidelity of the distance-3 variants versus θ (CSV).
    Sweep(SweepArgs),
    /// Fit `A·exp(−Γt)` or `A·cos(kφ + φ₀)` to a CSV produced by this tool (JSON).
    Fit(FitArgs),
    /// Compare closed-form channels against the simulator on random angles (JSON).
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeChoice {
    Repetition,
    Fm,
    Afm,
    SwappedPlus,
    SwappedMinus,
}

impl CodeChoice {
    fn variant(self) -> Option<ShorVariant> {
        match self {
            CodeChoice::Repetition => None,
            CodeChoice::Fm => Some(ShorVariant::Fm),
            CodeChoice::Afm => Some(ShorVariant::Afm),
            CodeChoice::SwappedPlus => Some(ShorVariant::SwappedPlus),
            CodeChoice::SwappedMinus => Some(ShorVariant::SwappedMinus),
        }
    }

    fn name(self) -> &'static str {
        self.variant().map_or("repetition", ShorVariant::name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Fm,
    Afm,
    SwappedPlus,
    SwappedMinus,
}

impl From<VariantArg> for ShorVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Fm => ShorVariant::Fm,
            VariantArg::Afm => ShorVariant::Afm,
            VariantArg::SwappedPlus => ShorVariant::SwappedPlus,
            VariantArg::SwappedMinus => ShorVariant::SwappedMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MappingArg {
    Standard,
    #[value(name = "center-0-m2-p2")]
    Center0M2P2,
}

impl From<MappingArg> for IonMapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::Standard => IonMapping::Standard,
            MappingArg::Center0M2P2 => IonMapping::Center0M2P2,
        }
    }
}

#[derive(Args, Debug)]
struct OutputArg {
    /// Output file (written atomically); stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    #[arg(long, value_enum)]
    variant: CodeChoice,
    #[arg(long, default_value_t = 3)]
    distance: usize,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "fm")]
    code: CodeChoice,
    #[arg(long, default_value_t = 3)]
    distance: usize,
    #[arg(long, value_enum, default_value = "standard")]
    mapping: MappingArg,
    /// Comma-separated per-qubit angles.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta")]
    angles: Option<String>,
    /// Same angle on every qubit.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[command(flatten)]
    out: OutputArg,
}

/// Settings shared by the stochastic experiments.
#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Noise model as inline JSON, e.g. '{"kind":"quasi_static","sigma":0.002}'.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    /// Reduce each shot to single ±1 readouts.
    #[arg(long)]
    sample: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RamseyKind {
    Ghz,
    Logical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Fm,
    Afm,
}

#[derive(Args, Debug)]
struct RamseyArgs {
    #[arg(long, value_enum, default_value = "logical")]
    kind: RamseyKind,
    /// Code variant for logical runs.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long)]
    distance: Option<usize>,
    #[arg(long, value_enum)]
    mapping: Option<MappingArg>,
    /// GHZ ordering for `--kind ghz`.
    #[arg(long, value_enum, default_value = "fm")]
    order: OrderArg,
    /// GHZ size for `--kind ghz`.
    #[arg(long, default_value_t = 3)]
    qubits: usize,
    /// Wait times in ms: `start:stop:step` or a comma list.
    #[arg(long)]
    times: Option<String>,
    #[command(flatten)]
    exp: ExperimentArgs,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct FringeArgs {
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    mapping: Option<MappingArg>,
    /// Wait before the analysis pulse, ms.
    #[arg(long)]
    wait: Option<f64>,
    /// Analysis phases in rad: `start:stop:step` or a comma list.
    #[arg(long)]
    phases: Option<String>,
    /// Per-row amplitude scale factors, comma-separated.
    #[arg(long)]
    amplitudes: Option<String>,
    #[command(flatten)]
    exp: ExperimentArgs,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// θ grid in rad: `start:stop:step` or a comma list.
    #[arg(long, default_value = "0:0.4:0.01", allow_hyphen_values = true)]
    thetas: String,
    #[arg(long, value_enum, value_delimiter = ',')]
    variants: Vec<VariantArg>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Exp,
    Cos,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Harmonic of the cosine model.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Fit only this series.
    #[arg(long)]
    series: Option<String>,
    /// Weight points by 1/stderr².
    #[arg(long)]
    weighted: bool,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    distance: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(flatten)]
    out: OutputArg,
}

/// Marks errors caused by bad input rather than the environment.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(UsageError(e.to_string()))
}

fn usage_err(e: anyhow::Error) -> anyhow::Error {
    usage(format!("{e:#}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<coherent_shor::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    match cli.command {
        Command::Channel(a) => channel(a),
        Command::Oracle(a) => oracle(a),
        Command::Ramsey(a) => ramsey(a),
        Command::Fringe(a) => fringe(a),
        Command::Sweep(a) => sweep(a),
        Command::Fit(a) => fit(a),
        Command::Verify(a) => verify(a),
    }
}

fn build_code(choice: CodeChoice, distance: usize, mapping: IonMapping) -> Result<CodeSpec<f64>> {
    Ok(match choice.variant() {
        None => build_repetition_code(distance)?,
        Some(v) => build_shor_code(distance, v, mapping)?,
    })
}

fn channel(a: ChannelArgs) -> Result<ExitCode> {
    let ch = match a.variant.variant() {
        None => repetition_channel(a.distance, a.theta)?,
        Some(v) => shor_variant_channel(v, a.distance, a.theta)?,
    };
    let report = ChannelReport::new(a.variant.name(), a.distance, a.theta, ch);
    emit(a.out.output.as_deref(), &to_json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleReport {
    code: CodeDocument,
    angles: Vec<f64>,
    branches: Vec<SyndromeBranch64>,
    channel: LogicalChannel<f64>,
    infidelity: f64,
}

fn oracle(a: OracleArgs) -> Result<ExitCode> {
    let code = build_code(a.code, a.distance, a.mapping.into())?;
    let angles = match (&a.angles, a.theta) {
        (Some(list), _) => parse_list(list).map_err(usage_err)?,
        (None, Some(t)) => vec![t; code.n_qubits],
        (None, None) => return Err(usage("one of --angles or --theta is required")),
    };
    let oracle = Oracle::new(&code);
    let branches = oracle.simulate_round(&angles)?;
    let channel = coherent_shor::oracle::channel_from_branches(&branches)?;
    let report = OracleReport {
        code: code.document(),
        infidelity: channel.infidelity(),
        channel,
        angles,
        branches,
    };
    emit(a.out.output.as_deref(), &to_json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

/// Experiment settings after merging config file and flags.
struct Resolved {
    config: ExperimentConfig,
    noise: NoiseModel,
    opts: RunOptions,
}

fn resolve(exp: &ExperimentArgs) -> Result<Resolved> {
    let config = match &exp.config {
        Some(path) => match config::load(path) {
            Ok(c) => c,
            Err(ConfigError::Unreadable(e)) => return Err(e),
            Err(ConfigError::Invalid(e)) => return Err(usage_err(e)),
        },
        None => ExperimentConfig::default(),
    };
    let mut noise = match &exp.noise {
        Some(text) => serde_json::from_str::<NoiseModel>(text).map_err(|e| usage(format!("--noise: {e}")))?,
        None => config.noise.unwrap_or_else(|| NoiseModel::default_logical(0)),
    };
    if let Some(seed) = exp.seed.or(config.seed) {
        noise.seed = seed;
    }
    noise.validate()?;
    let opts = RunOptions {
        shots: exp.shots.or(config.shots).unwrap_or(500),
        sample_readout: exp.sample || config.sample_readout.unwrap_or(false),
    };
    Ok(Resolved { config, noise, opts })
}

fn grid_or(flag: &Option<String>, from_config: &Option<Vec<f64>>, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>> {
    match (flag, from_config) {
        (Some(s), _) => parse_grid(s).map_err(usage_err),
        (None, Some(v)) => Ok(v.clone()),
        (None, None) => Ok(default()),
    }
}

fn ramsey(a: RamseyArgs) -> Result<ExitCode> {
    let r = resolve(&a.exp)?;
    let times = grid_or(&a.times, &r.config.times, fig3_times)?;
    let bytes = match a.kind {
        RamseyKind::Ghz => {
            let order = match a.order {
                OrderArg::Fm => GhzOrder::Fm,
                OrderArg::Afm => GhzOrder::Afm,
            };
            let curve = ghz_ramsey(a.qubits, order, &r.noise, &times, r.opts)?;
            curves_to_csv(&[&curve])?
        }
        RamseyKind::Logical => {
            let variant = a.variant.map(ShorVariant::from).or(r.config.variant).unwrap_or(ShorVariant::Fm);
            let distance = a.distance.or(r.config.distance).unwrap_or(3);
            let mapping = a.mapping.map(IonMapping::from).or(r.config.mapping).unwrap_or_default();
            let code = build_shor_code(distance, variant, mapping)?;
            let result = logical_ramsey(&code, &r.noise, &times, r.opts)?;
            curves_to_csv(&result.curves())?
        }
    };
    emit(a.out.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn default_phases() -> Vec<f64> {
    (0..=48).map(|i| f64::from(i) * std::f64::consts::PI / 24.0).collect()
}

fn fringe(a: FringeArgs) -> Result<ExitCode> {
    let r = resolve(&a.exp)?;
    let variant = a.variant.map(ShorVariant::from).or(r.config.variant).unwrap_or(ShorVariant::Fm);
    let mapping = a.mapping.map(IonMapping::from).or(r.config.mapping).unwrap_or_default();
    let wait = a.wait.or(r.config.wait).unwrap_or(20.0);
    let phases = grid_or(&a.phases, &r.config.phases, default_phases)?;
    let amplitudes = match &a.amplitudes {
        Some(s) => Some(parse_list(s).map_err(usage_err)?),
        None => r.config.amplitudes.clone(),
    };
    let code = build_shor_code(3, variant, mapping)?;
    let curves = ghz_fringe(&code, &r.noise, wait, &phases, r.opts, amplitudes.as_deref())?;
    emit(a.out.output.as_deref(), &curves_to_csv(&curves.iter().collect::<Vec<_>>())?)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let thetas = parse_grid(&a.thetas).map_err(usage_err)?;
    let variants: Vec<ShorVariant> = if a.variants.is_empty() {
        ShorVariant::ALL.to_vec()
    } else {
        a.variants.iter().copied().map(ShorVariant::from).collect()
    };
    let table = single_round_sweep(&variants, &thetas)?;
    eprintln!(
        "oracle cross-check: {} points, max deviation {:e}",
        table.oracle_points, table.max_oracle_deviation
    );
    let curves = table.curves();
    emit(a.out.output.as_deref(), &curves_to_csv(&curves.iter().collect::<Vec<_>>())?)?;
    Ok(ExitCode::SUCCESS)
}

struct Series {
    name: String,
    x: Vec<f64>,
    y: Vec<f64>,
    stderr: Vec<f64>,
}

fn read_series(path: &Path) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let value_col = col("value").ok_or_else(|| usage("input CSV has no `value` column"))?;
    let (stderr_col, series_col) = (col("stderr"), col("series"));
    let mut out: Vec<Series> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let num = |i: usize| -> Result<f64> {
            let field = record.get(i).unwrap_or("");
            field.trim().parse::<f64>().map_err(|_| usage(format!("row {}: bad number `{field}`", line + 2)))
        };
        let name = series_col.and_then(|i| record.get(i)).unwrap_or("").to_string();
        let idx = match out.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                out.push(Series { name, x: vec![], y: vec![], stderr: vec![] });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.x.push(num(0)?);
        s.y.push(num(value_col)?);
        s.stderr.push(match stderr_col {
            Some(i) => num(i)?,
            None => 0.0,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct SeriesFit {
    series: String,
    points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    t2_star_ms: Option<f64>,
    result: FitResult,
}

fn fit(a: FitArgs) -> Result<ExitCode> {
    let mut all = read_series(&a.input)?;
    if let Some(name) = &a.series {
        all.retain(|s| &s.name == name);
        if all.is_empty() {
            return Err(usage(format!("series `{name}` not found in {}", a.input.display())));
        }
    }
    if all.is_empty() {
        return Err(usage("input CSV has no data rows"));
    }
    let mut fits = Vec::with_capacity(all.len());
    for s in all {
        let weights = if a.weighted { Some(weights_from_stderr(&s.stderr)) } else { None };
        let result = match a.model {
            ModelArg::Exp => fit_exp_decay_weighted(&s.x, &s.y, weights.as_deref()),
            ModelArg::Cos => fit_cosine_weighted(&s.x, &s.y, a.k, weights.as_deref()),
        }
        .with_context(|| format!("fitting series `{}`", s.name))?;
        fits.push(SeriesFit { series: s.name, points: s.x.len(), t2_star_ms: result.t2_star(), result });
    }
    let mut doc = BTreeMap::new();
    doc.insert("fits", fits);
    emit(a.out.output.as_deref(), &to_json(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CheckReport {
    constructor: String,
    trials: usize,
    max_deviation: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    distance: usize,
    trials: usize,
    seed: u64,
    tolerance: f64,
    checks: Vec<CheckReport>,
    skipped: Vec<String>,
    max_deviation: f64,
    passed: bool,
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let d = a.distance;
    if d < 2 {
        return Err(usage("--distance must be at least 2"));
    }
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    // stay inside the domain where every closed form is defined (|dθ| < π)
    let range = 1.0f64.min(0.95 * std::f64::consts::PI / d as f64);
    let thetas: Vec<f64> = (0..a.trials)
        .map(|i| shot_rng(a.seed, i as u64, 0).random_range(-range..range))
        .collect();

    let mut candidates: Vec<CodeChoice> = Vec::new();
    if d % 2 == 1 {
        candidates.push(CodeChoice::Repetition);
        candidates.extend([CodeChoice::Fm, CodeChoice::Afm, CodeChoice::SwappedPlus, CodeChoice::SwappedMinus]);
    } else {
        candidates.push(CodeChoice::Afm);
    }
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for choice in candidates {
        let n_qubits = if choice == CodeChoice::Repetition { d } else { d * d };
        if n_qubits > MAX_QUBITS {
            skipped.push(format!("{}: {n_qubits} qubits exceeds the simulator limit", choice.name()));
            continue;
        }
        let code = build_code(choice, d, IonMapping::Standard)?;
        let oracle = Oracle::new(&code);
        let mut worst = 0.0f64;
        for &t in &thetas {
            let simulated = oracle.channel(&vec![t; code.n_qubits])?;
            let analytic: LogicalChannel<f64> = match choice.variant() {
                None => repetition_channel(d, t)?,
                Some(v) => shor_variant_channel(v, d, t)?,
            };
            worst = worst.max(simulated.deviation(&analytic, a.tolerance));
        }
        checks.push(CheckReport { constructor: choice.name().to_string(), trials: thetas.len(), max_deviation: worst });
    }
    if checks.is_empty() {
        bail!("no code of distance {d} fits in {MAX_QUBITS} qubits");
    }
    let max_deviation = checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let passed = max_deviation < a.tolerance;
    let report = VerifyReport {
        distance: d,
        trials: a.trials,
        seed: a.seed,
        tolerance: a.tolerance,
        checks,
        skipped,
        max_deviation,
        passed,
    };
    emit(a.out.output.as_deref(), &to_json(&report)?)?;
    eprintln!("max deviation {max_deviation:e} ({})", if passed { "pass" } else { "FAIL" });
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
