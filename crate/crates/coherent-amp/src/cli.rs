//! Command-line front end: flag/config parsing, subcommand dispatch,
//! deterministic CSV/JSON emission, and the exit-code contract.
//!
//! Exit codes: 0 computed and feasible/true, 1 computed and infeasible/false,
//! 2 invalid input, 3 inconclusive search, 4 internal numeric failure.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Arg, ArgAction, Command};
use nalgebra::DVector;

use crate::amplifier::{self, AmplifierInstance, Axis, MaxGain, SweepSpec};
use crate::channel::{self, DetectorModel, LossChannel};
use crate::error::Error;
use crate::fock::{truncation_dim, CoherentLabel, TruncationConfig};
use crate::geometry::{self, WignerGrid};
use crate::kraus;
use crate::transform::{self, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

type Label = CoherentLabel<f64>;

const AXES: [&str; 5] = ["alpha1", "alpha2", "eta", "g1", "g2"];

fn subcommand_flags(name: &str) -> &'static [&'static str] {
    match name {
        "feasible" | "pi" => &["alpha1", "alpha2", "eta", "g1", "g2"],
        "envelope" => &["eta", "g1", "g2"],
        "max-gain" => &["alpha1", "alpha2", "eta"],
        "dykstra" => &["alpha1", "alpha2", "eta", "g1", "g2", "p", "max-iters", "tol"],
        "kraus" | "verify" => &["alpha1", "alpha2", "eta", "g1", "g2", "epsilon"],
        "wigner" => &["alpha1", "theta", "resolution", "window"],
        "channel" => &["alpha1", "alpha2", "eta", "g1", "g2", "gamma", "time", "steps"],
        "detector" => &["alpha1", "alpha2", "dark", "eff", "prior"],
        "sweep" => &["alpha1", "alpha2", "eta", "g1", "g2", "grid"],
        _ => &[],
    }
}

fn build_command() -> Command {
    let sub = |name: &'static str, about: &'static str| {
        let mut c = Command::new(name).about(about);
        for &flag in subcommand_flags(name) {
            let arg = Arg::new(flag).long(flag).value_name("VALUE");
            let arg = if flag == "grid" {
                arg.action(ArgAction::Append)
                    .help("axis:min:max:steps (repeatable)")
            } else {
                arg.action(ArgAction::Set)
            };
            c = c.arg(arg);
        }
        for common in ["config", "output", "format", "seed"] {
            c = c.arg(
                Arg::new(common)
                    .long(common)
                    .value_name("VALUE")
                    .action(ArgAction::Set),
            );
        }
        c
    };
    Command::new("coherent-amp")
        .about("Noiseless amplification of coherent-state sets: feasibility, Kraus construction, channel exploration")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(sub("feasible", "Exact two-state amplification feasibility (distance inequality)"))
        .subcommand(sub("envelope", "Amplitude-free phase/gain envelope check"))
        .subcommand(sub("max-gain", "Maximum equal-output gain for two input states"))
        .subcommand(sub("pi", "Deterministic witness matrix and its positivity verdict"))
        .subcommand(sub("dykstra", "Probabilistic feasibility search by alternating projections"))
        .subcommand(sub("kraus", "Construct amplification Kraus operators (JSON bundle)"))
        .subcommand(sub("verify", "Build Kraus operators and report verification residuals"))
        .subcommand(sub("wigner", "Wigner-function grid of a coherent state"))
        .subcommand(sub("channel", "Pure-loss distance trajectories, amplified vs plain"))
        .subcommand(sub("detector", "On/off detector discrimination with dark counts"))
        .subcommand(sub("sweep", "Feasibility-region sweep over parameter grids"))
}

/// Parsed invocation: subcommand plus a merged key-value map.
struct RunConfig {
    subcommand: String,
    values: BTreeMap<String, String>,
    grids: Vec<String>,
    format: Format,
    output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NegativeAmplitude(_)
            | Error::InvalidConfig(_)
            | Error::DimensionMismatch(_, _)
            | Error::NotSquare { .. }
            | Error::InvalidProbability(_)
            | Error::GainOutOfRange(_)
            | Error::ZeroAmplitude
            | Error::CoefficientShape { .. }
            | Error::GridTooLarge(_)
            | Error::InvalidAxis(_)
            | Error::DimensionOverflow { .. }
            | Error::InvalidGrid => EXIT_INVALID,
            Error::BisectionAmbiguous(_) => EXIT_INCONCLUSIVE,
            Error::AmplitudeOverflow(_)
            | Error::ZeroGramEntry(_, _)
            | Error::NotPositive { .. }
            | Error::IllConditioned { .. }
            | Error::CompletionOvershoot(_) => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Entry point; `argv` includes the program name.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let matches = match build_command().try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    EXIT_OK
                }
                _ => {
                    let _ = e.print();
                    EXIT_INVALID
                }
            };
        }
    };

    let (name, sub) = matches.subcommand().expect("subcommand required");
    let config = match collect_config(name, sub) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };

    let (payload, code) = match dispatch(&config) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };

    match emit(&payload, config.output.as_deref()) {
        Ok(()) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn collect_config(name: &str, sub: &clap::ArgMatches) -> Result<RunConfig, Failure> {
    let mut values: BTreeMap<String, String> = BTreeMap::new();
    let mut grids: Vec<String> = Vec::new();

    // config file first, flags overwrite
    if let Some(path) = sub.get_one::<String>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("--config {path}: {e}")))?;
        let json: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::invalid(format!("--config {path}: {e}")))?;
        let obj = json
            .as_object()
            .ok_or_else(|| Failure::invalid(format!("--config {path}: expected a JSON object")))?;
        let allowed = subcommand_flags(name);
        for (key, value) in obj {
            let known = allowed.contains(&key.as_str())
                || ["output", "format", "seed"].contains(&key.as_str());
            if !known {
                return Err(Failure::invalid(format!(
                    "--config {path}: unknown key \"{key}\" for subcommand {name}"
                )));
            }
            if key == "grid" {
                match value {
                    serde_json::Value::Array(items) => {
                        for item in items {
                            grids.push(json_scalar_to_string(item).ok_or_else(|| {
                                Failure::invalid(format!("--config {path}: bad grid entry"))
                            })?);
                        }
                    }
                    other => grids.push(json_scalar_to_string(other).ok_or_else(|| {
                        Failure::invalid(format!("--config {path}: bad grid entry"))
                    })?),
                }
            } else {
                let s = json_scalar_to_string(value).ok_or_else(|| {
                    Failure::invalid(format!("--config {path}: key \"{key}\" must be a scalar"))
                })?;
                values.insert(key.clone(), s);
            }
        }
    }

    for &flag in subcommand_flags(name) {
        if flag == "grid" {
            if let Some(vals) = sub.get_many::<String>("grid") {
                let cli_grids: Vec<String> = vals.cloned().collect();
                if !cli_grids.is_empty() {
                    grids = cli_grids;
                }
            }
        } else if let Some(v) = sub.get_one::<String>(flag) {
            values.insert(flag.to_string(), v.clone());
        }
    }
    for common in ["output", "format", "seed"] {
        if let Some(v) = sub.get_one::<String>(common) {
            values.insert(common.to_string(), v.clone());
        }
    }

    if let Some(seed) = values.get("seed") {
        seed.parse::<u64>()
            .map_err(|_| Failure::invalid(format!("--seed: cannot parse \"{seed}\" as integer")))?;
    }
    let format = match values.get("format").map(String::as_str) {
        None => {
            // the Kraus bundle has no tabular form
            if name == "kraus" {
                Format::Json
            } else {
                Format::Csv
            }
        }
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => {
            return Err(Failure::invalid(format!(
                "--format: expected csv or json, got \"{other}\""
            )))
        }
    };
    if name == "kraus" && format == Format::Csv {
        return Err(Failure::invalid(
            "--format: the kraus bundle is JSON only".to_string(),
        ));
    }

    let output = values.get("output").cloned();
    Ok(RunConfig {
        subcommand: name.to_string(),
        values,
        grids,
        format,
        output,
    })
}

fn json_scalar_to_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

impl RunConfig {
    fn require_f64(&self, key: &str) -> Result<f64, Failure> {
        let raw = self
            .values
            .get(key)
            .ok_or_else(|| Failure::invalid(format!("--{key} is required for {}", self.subcommand)))?;
        raw.parse::<f64>()
            .map_err(|_| Failure::invalid(format!("--{key}: cannot parse \"{raw}\" as number")))
    }

    fn optional_f64(&self, key: &str, default: f64) -> Result<f64, Failure> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| Failure::invalid(format!("--{key}: cannot parse \"{raw}\" as number"))),
        }
    }

    fn optional_usize(&self, key: &str, default: usize) -> Result<usize, Failure> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<usize>().map_err(|_| {
                Failure::invalid(format!("--{key}: cannot parse \"{raw}\" as integer"))
            }),
        }
    }

    /// `--eta`, folded into `[0, pi]` with a warning when outside.
    fn require_eta(&self) -> Result<f64, Failure> {
        let raw = self.require_f64("eta")?;
        let folded = amplifier::fold_eta(raw);
        if !(0.0..=std::f64::consts::PI).contains(&raw) {
            eprintln!("warning: --eta {raw} folded into [0, pi] as {folded}");
        }
        Ok(folded)
    }
}

fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

fn label(amplitude: f64, phase: f64) -> Result<Label, Failure> {
    Ok(Label::new(amplitude, phase)?)
}

fn two_state_instance(cfg: &RunConfig) -> Result<AmplifierInstance<f64>, Failure> {
    let alpha1 = cfg.require_f64("alpha1")?;
    let alpha2 = cfg.require_f64("alpha2")?;
    let eta = cfg.require_eta()?;
    let g1 = cfg.require_f64("g1")?;
    let g2 = cfg.require_f64("g2")?;
    Ok(AmplifierInstance::new(
        label(alpha1, 0.0)?,
        label(alpha2, eta)?,
        g1,
        g2,
    )?)
}

fn dispatch(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    match cfg.subcommand.as_str() {
        "feasible" => cmd_feasible(cfg),
        "envelope" => cmd_envelope(cfg),
        "max-gain" => cmd_max_gain(cfg),
        "pi" => cmd_pi(cfg),
        "dykstra" => cmd_dykstra(cfg),
        "kraus" => cmd_kraus(cfg),
        "verify" => cmd_verify(cfg),
        "wigner" => cmd_wigner(cfg),
        "channel" => cmd_channel(cfg),
        "detector" => cmd_detector(cfg),
        "sweep" => cmd_sweep(cfg),
        other => Err(Failure::invalid(format!("unknown subcommand {other}"))),
    }
}

fn cmd_feasible(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let inst = two_state_instance(cfg)?;
    let report = amplifier::exact_feasible(&inst);
    let code = if report.feasible() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let payload = match cfg.format {
        Format::Csv => format!(
            "alpha1,alpha2,eta,g1,g2,feasible,margin\n{},{},{},{},{},{},{}\n",
            fmt(inst.state1.amplitude()),
            fmt(inst.state2.amplitude()),
            fmt(inst.eta()),
            fmt(inst.gain1),
            fmt(inst.gain2),
            report.feasible(),
            fmt(report.margin),
        ),
        Format::Json => pretty(&serde_json::json!({
            "schema_version": 1,
            "alpha1": inst.state1.amplitude(),
            "alpha2": inst.state2.amplitude(),
            "eta": inst.eta(),
            "g1": inst.gain1,
            "g2": inst.gain2,
            "feasible": report.feasible(),
            "margin": report.margin,
            "binding": "analytic-boundary",
        })),
    };
    Ok((payload, code))
}

fn cmd_envelope(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let eta = cfg.require_eta()?;
    let g1 = cfg.require_f64("g1")?;
    let g2 = cfg.require_f64("g2")?;
    let satisfied = amplifier::theorem1_envelope(eta, g1, g2)?;
    let code = if satisfied { EXIT_OK } else { EXIT_NEGATIVE };
    let payload = match cfg.format {
        Format::Csv => format!(
            "eta,g1,g2,satisfied\n{},{},{},{}\n",
            fmt(eta),
            fmt(g1),
            fmt(g2),
            satisfied
        ),
        Format::Json => pretty(&serde_json::json!({
            "schema_version": 1,
            "eta": eta,
            "g1": g1,
            "g2": g2,
            "satisfied": satisfied,
        })),
    };
    Ok((payload, code))
}

fn cmd_max_gain(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let alpha1 = cfg.require_f64("alpha1")?;
    let alpha2 = cfg.require_f64("alpha2")?;
    let eta = cfg.require_eta()?;
    let a1 = label(alpha1, 0.0)?;
    let a2 = label(alpha2, eta)?;
    let result = amplifier::max_gain(&a1, &a2)?;
    let payload = match (&result, cfg.format) {
        (MaxGain::Finite(g1max), Format::Csv) => {
            let g2 = g1max * alpha1 / alpha2;
            format!(
                "alpha1,alpha2,eta,g1max,g2\n{},{},{},{},{}\n",
                fmt(alpha1),
                fmt(alpha2),
                fmt(eta),
                fmt(*g1max),
                fmt(g2)
            )
        }
        (MaxGain::Unbounded, Format::Csv) => format!(
            "alpha1,alpha2,eta,g1max,g2\n{},{},{},unbounded,\n",
            fmt(alpha1),
            fmt(alpha2),
            fmt(eta)
        ),
        (MaxGain::Finite(g1max), Format::Json) => pretty(&serde_json::json!({
            "schema_version": 1,
            "alpha1": alpha1,
            "alpha2": alpha2,
            "eta": eta,
            "unbounded": false,
            "g1max": g1max,
            "g2": g1max * alpha1 / alpha2,
        })),
        (MaxGain::Unbounded, Format::Json) => pretty(&serde_json::json!({
            "schema_version": 1,
            "alpha1": alpha1,
            "alpha2": alpha2,
            "eta": eta,
            "unbounded": true,
            "g1max": null,
            "g2": null,
        })),
    };
    Ok((payload, EXIT_OK))
}

fn two_state_grams(
    inst: &AmplifierInstance<f64>,
) -> (geometry::GramMatrix<f64>, geometry::GramMatrix<f64>) {
    let (o1, o2) = inst.outputs();
    (
        geometry::gram(&[inst.state1, inst.state2]),
        geometry::gram(&[o1, o2]),
    )
}

fn matrix_json(m: &nalgebra::DMatrix<num_complex::Complex<f64>>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::json!(rows)
}

fn matrix_csv(m: &nalgebra::DMatrix<num_complex::Complex<f64>>) -> String {
    let mut out = String::from("i,j,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push_str(&format!(
                "{i},{j},{},{}\n",
                fmt(m[(i, j)].re),
                fmt(m[(i, j)].im)
            ));
        }
    }
    out
}

fn cmd_pi(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let inst = two_state_instance(cfg)?;
    let (g_a, g_b) = two_state_grams(&inst);
    let (pi, report) = transform::pi_deterministic(&g_a, &g_b)?;
    let code = if report.feasible() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let payload = match cfg.format {
        Format::Csv => matrix_csv(pi.entries()),
        Format::Json => pretty(&serde_json::json!({
            "schema_version": 1,
            "pi": matrix_json(pi.entries()),
            "probabilities": pi.probabilities().iter().copied().collect::<Vec<f64>>(),
            "feasible": report.feasible(),
            "margin": report.margin,
            "binding": report.binding,
        })),
    };
    Ok((payload, code))
}

fn cmd_dykstra(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let inst = two_state_instance(cfg)?;
    let p = cfg.require_f64("p")?;
    let max_iters = cfg.optional_usize("max-iters", transform::DEFAULT_DYKSTRA_ITERS)?;
    let tol = cfg.optional_f64("tol", 1e-8)?;
    let (g_a, g_b) = two_state_grams(&inst);
    let report =
        transform::dykstra_feasibility(&g_a, &g_b, &DVector::from_element(2, p), max_iters, tol)?;
    let code = match report.verdict {
        Verdict::Feasible => EXIT_OK,
        Verdict::Infeasible => EXIT_NEGATIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let payload = match cfg.format {
        Format::Csv => format!(
            "verdict,margin,binding,iterations\n{},{},{},{}\n",
            report.verdict,
            fmt(report.margin),
            report.binding,
            report.iterations
        ),
        Format::Json => pretty(&serde_json::json!({
            "schema_version": 1,
            "verdict": report.verdict,
            "margin": report.margin,
            "binding": report.binding,
            "iterations": report.iterations,
            "pi": report.witness.as_ref().map(|w| matrix_json(w.entries())),
        })),
    };
    Ok((payload, code))
}

struct Pipeline {
    set: kraus::KrausSet<f64>,
    margin: f64,
}

fn build_pipeline(cfg: &RunConfig) -> Result<Result<Pipeline, f64>, Failure> {
    let inst = two_state_instance(cfg)?;
    let epsilon = cfg.optional_f64("epsilon", 1e-12)?;
    let (g_a, g_b) = two_state_grams(&inst);
    let (pi, report) = transform::pi_deterministic(&g_a, &g_b)?;
    if !report.feasible() {
        return Ok(Err(report.margin));
    }
    let coeffs = transform::factor_coefficients(&pi, transform::default_clip(&pi))?;
    let (o1, o2) = inst.outputs();
    let all = [inst.state1, inst.state2, o1, o2];
    let dim = truncation_dim(&all, &TruncationConfig::with_epsilon(epsilon))?;
    let set = kraus::build_kraus(&[inst.state1, inst.state2], &[o1, o2], &coeffs, dim)?;
    Ok(Ok(Pipeline {
        set,
        margin: report.margin,
    }))
}

fn cmd_kraus(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    match build_pipeline(cfg)? {
        Err(margin) => {
            let payload = pretty(&serde_json::json!({
                "schema_version": 1,
                "feasible": false,
                "margin": margin,
            }));
            Ok((payload, EXIT_NEGATIVE))
        }
        Ok(pipeline) => {
            let json = pipeline.set.to_json()?;
            Ok((pretty(&json), EXIT_OK))
        }
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    match build_pipeline(cfg)? {
        Err(margin) => {
            let payload = match cfg.format {
                Format::Csv => format!("feasible,margin\nfalse,{}\n", fmt(margin)),
                Format::Json => pretty(&serde_json::json!({
                    "schema_version": 1,
                    "feasible": false,
                    "margin": margin,
                })),
            };
            Ok((payload, EXIT_NEGATIVE))
        }
        Ok(pipeline) => {
            let report = kraus::verify_action(&pipeline.set)?;
            let completed = kraus::complete_to_identity(&pipeline.set)?;
            let full = kraus::completeness_residual(&completed);
            let payload = match cfg.format {
                Format::Csv => format!(
                    "max_action_residual,max_eq14_residual,span_completeness_residual,full_completeness_residual\n{},{},{},{}\n",
                    fmt(report.max_action_residual()),
                    fmt(report.max_eq14_residual()),
                    fmt(report.completeness_residual),
                    fmt(full)
                ),
                Format::Json => pretty(&serde_json::json!({
                    "schema_version": 1,
                    "feasible": true,
                    "margin": pipeline.margin,
                    "max_action_residual": report.max_action_residual(),
                    "max_eq14_residual": report.max_eq14_residual(),
                    "span_completeness_residual": report.completeness_residual,
                    "full_completeness_residual": full,
                })),
            };
            Ok((payload, EXIT_OK))
        }
    }
}

fn cmd_wigner(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let alpha1 = cfg.require_f64("alpha1")?;
    let theta = cfg.optional_f64("theta", 0.0)?;
    let resolution = cfg.optional_usize("resolution", 201)?;
    let l = label(alpha1, theta)?;
    let window = match cfg.values.get("window") {
        None => WignerGrid::default_window(&l),
        Some(raw) => {
            let parts: Vec<&str> = raw.split(':').collect();
            if parts.len() != 4 {
                return Err(Failure::invalid(format!(
                    "--window: expected xmin:xmax:pmin:pmax, got \"{raw}\""
                )));
            }
            let mut nums = [0.0f64; 4];
            for (k, part) in parts.iter().enumerate() {
                nums[k] = part.parse::<f64>().map_err(|_| {
                    Failure::invalid(format!("--window: cannot parse \"{part}\" as number"))
                })?;
            }
            (nums[0], nums[1], nums[2], nums[3])
        }
    };
    let grid = geometry::wigner_grid(&l, window, resolution)?;
    let payload = match cfg.format {
        Format::Csv => grid.to_csv(),
        Format::Json => pretty(&grid.to_json()),
    };
    Ok((payload, EXIT_OK))
}

fn cmd_channel(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let inst = two_state_instance(cfg)?;
    let gamma = cfg.require_f64("gamma")?;
    let time = cfg.require_f64("time")?;
    let steps = cfg.optional_usize("steps", 50)?;
    if steps < 1 || time < 0.0 {
        return Err(Failure::invalid(
            "--steps must be >= 1 and --time nonnegative".to_string(),
        ));
    }
    let ch = LossChannel::new(gamma)?;
    let mut rows = Vec::with_capacity(steps);
    let mut warned = false;
    for k in 0..steps {
        let t = if steps == 1 {
            0.0
        } else {
            time * k as f64 / (steps - 1) as f64
        };
        let cmp = channel::compare_amplified(
            &inst.state1,
            &inst.state2,
            inst.gain1,
            inst.gain2,
            &ch,
            t,
        )?;
        if cmp.infeasible_warning && !warned {
            eprintln!("warning: requested gains are not deterministically feasible; proceeding");
            warned = true;
        }
        rows.push((t, cmp));
    }
    let payload = match cfg.format {
        Format::Csv => {
            let mut out = String::from("t,d_plain,d_amp,ratio,sigma_plain,sigma_amp\n");
            for (t, cmp) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt(*t),
                    fmt(cmp.d_plain),
                    fmt(cmp.d_amp),
                    fmt(cmp.ratio),
                    fmt(cmp.sigma_plain),
                    fmt(cmp.sigma_amp)
                ));
            }
            out
        }
        Format::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, cmp)| {
                    serde_json::json!({
                        "t": t,
                        "d_plain": cmp.d_plain,
                        "d_amp": cmp.d_amp,
                        "ratio": cmp.ratio,
                        "sigma_plain": cmp.sigma_plain,
                        "sigma_amp": cmp.sigma_amp,
                    })
                })
                .collect();
            pretty(&serde_json::json!({
                "schema_version": 1,
                "gamma": gamma,
                "rows": arr,
            }))
        }
    };
    Ok((payload, EXIT_OK))
}

fn cmd_detector(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let alpha1 = cfg.require_f64("alpha1")?;
    let alpha2 = cfg.require_f64("alpha2")?;
    let dark = cfg.optional_f64("dark", 0.0)?;
    let eff = cfg.optional_f64("eff", 1.0)?;
    let prior = cfg.optional_f64("prior", 0.5)?;
    let a = label(alpha1, 0.0)?;
    let b = label(alpha2, 0.0)?;
    let det = DetectorModel::new(dark, eff)?;
    let click = channel::click_discrimination_error(&a, &b, &det, prior)?;
    let helstrom = channel::helstrom_error(&a, &b, prior)?;
    let hyp = |h: channel::Hypothesis| match h {
        channel::Hypothesis::StateA => "state-a",
        channel::Hypothesis::StateB => "state-b",
    };
    let payload = match cfg.format {
        Format::Csv => format!(
            "p_err,helstrom,on_click,on_no_click\n{},{},{},{}\n",
            fmt(click.p_err),
            fmt(helstrom),
            hyp(click.on_click),
            hyp(click.on_no_click)
        ),
        Format::Json => pretty(&serde_json::json!({
            "schema_version": 1,
            "p_err": click.p_err,
            "helstrom": helstrom,
            "on_click": click.on_click,
            "on_no_click": click.on_no_click,
        })),
    };
    Ok((payload, EXIT_OK))
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let mut axes: BTreeMap<&str, Axis<f64>> = BTreeMap::new();
    for raw in &cfg.grids {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 4 {
            return Err(Failure::invalid(format!(
                "--grid: expected axis:min:max:steps, got \"{raw}\""
            )));
        }
        let name = AXES
            .iter()
            .find(|&&a| a == parts[0])
            .ok_or_else(|| Failure::invalid(format!("--grid: unknown axis \"{}\"", parts[0])))?;
        let min = parts[1]
            .parse::<f64>()
            .map_err(|_| Failure::invalid(format!("--grid: bad min \"{}\"", parts[1])))?;
        let max = parts[2]
            .parse::<f64>()
            .map_err(|_| Failure::invalid(format!("--grid: bad max \"{}\"", parts[2])))?;
        let steps = parts[3]
            .parse::<usize>()
            .map_err(|_| Failure::invalid(format!("--grid: bad steps \"{}\"", parts[3])))?;
        axes.insert(name, Axis { min, max, steps });
    }
    let mut axis_for = |name: &str| -> Result<Axis<f64>, Failure> {
        if let Some(a) = axes.remove(name) {
            return Ok(a);
        }
        Ok(Axis::fixed(cfg.require_f64(name)?))
    };
    let spec = SweepSpec {
        alpha1: axis_for("alpha1")?,
        alpha2: axis_for("alpha2")?,
        eta: axis_for("eta")?,
        g1: axis_for("g1")?,
        g2: axis_for("g2")?,
    };
    let rows = amplifier::sweep(&spec)?;
    let payload = match cfg.format {
        Format::Csv => {
            let mut out = String::from("alpha1,alpha2,eta,g1,g2,feasible,margin,g1max\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt(row.alpha1),
                    fmt(row.alpha2),
                    fmt(row.eta),
                    fmt(row.g1),
                    fmt(row.g2),
                    row.feasible,
                    fmt(row.margin),
                    row.g1max.map(fmt).unwrap_or_default()
                ));
            }
            out
        }
        Format::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "alpha1": row.alpha1,
                        "alpha2": row.alpha2,
                        "eta": row.eta,
                        "g1": row.g1,
                        "g2": row.g2,
                        "feasible": row.feasible,
                        "margin": row.margin,
                        "g1max": row.g1max,
                    })
                })
                .collect();
            pretty(&serde_json::json!({
                "schema_version": 1,
                "rows": arr,
            }))
        }
    };
    Ok((payload, EXIT_OK))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialization");
    s.push('\n');
    s
}

/// Writes atomically: temp file in the target directory, then rename.
fn emit(payload: &str, output: Option<&str>) -> Result<(), Failure> {
    match output {
        None => {
            print!("{payload}");
            Ok(())
        }
        Some(path) => {
            let target = std::path::Path::new(path);
            let dir = target.parent().filter(|p| !p.as_os_str().is_empty());
            let write = || -> std::io::Result<()> {
                let mut tmp = match dir {
                    Some(d) => tempfile::NamedTempFile::new_in(d)?,
                    None => tempfile::NamedTempFile::new_in(".")?,
                };
                tmp.write_all(payload.as_bytes())?;
                tmp.persist(target).map_err(|e| e.error)?;
                Ok(())
            };
            write().map_err(|e| Failure {
                code: EXIT_NUMERIC,
                message: format!("cannot write {path}: {e}"),
            })
        }
    }
}
