//! The `nosignal` command line.
//!
//! Every subcommand computes a results payload (plain JSON data) and then
//! renders it either as a run manifest (`--json`), as CSV (`tunnel --csv`) or
//! as text. Exit status is 0 whenever the analysis ran, whatever it found, and
//! 2 on argument or validation errors.

mod text;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::disentangler::{self, DisentanglerTarget};
use crate::entangler::{self, EntanglerParams};
use crate::json::{self, MatrixLiteral};
use crate::linmaps::{self, lift_local, local_factor, BasisMapSpec};
use crate::qcore::{LabelStyle, Space, Subsystem};
use crate::sigstat::{self, SignalBudget};
use crate::tunnel::{self, Schedule, TunnelConfig, TwoBoxState};
use crate::{Error, Result, C64};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for argument and validation errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nosignal", version, about = "Audits of one-sided quantum signalling devices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "lowercase")]
pub enum Command {
    /// Solve for the local coefficients a Disentangler needs and audit them.
    Disentangler(DisentanglerArgs),
    /// Audit the Entangler under one or all sign readings.
    Entangler(EntanglerArgs),
    /// Two-box (or spin exchange) tunnelling dynamics.
    Tunnel(TunnelArgs),
    /// Decision errors, sample counts and channel simulation.
    Signal(SignalArgs),
    /// Gram-matrix isometry audit of a basis map.
    Gram(GramArgs),
    /// Test whether a joint map factors as A ⊗ I.
    Factor(FactorArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Disentangler(_) => "disentangler",
            Command::Entangler(_) => "entangler",
            Command::Tunnel(_) => "tunnel",
            Command::Signal(_) => "signal",
            Command::Gram(_) => "gram",
            Command::Factor(_) => "factor",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Emit a JSON run manifest.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DisentanglerArgs {
    /// Coefficient of |H1H2⟩ as RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Coefficient of |V1V2⟩ as RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EntanglerArgs {
    /// One sign reading: ++, +-, -+ or --.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "all")]
    pub signs: Option<String>,
    /// Run all four sign readings (the default when no reading is chosen).
    #[arg(long)]
    pub all: bool,
    /// General form: image of Psi1 is a|Psi1⟩ + b|Psi2⟩ (a as RE,IM).
    #[arg(long, allow_hyphen_values = true, requires = "b", conflicts_with_all = ["signs", "all"])]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    pub b: Option<String>,
    /// Phase on the image of Psi2, RE,IM (default 0,1).
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TunnelArgs {
    /// Coupling rate (radians per unit time).
    #[arg(long)]
    pub gamma: f64,
    /// Barrier schedule, e.g. "blocked:0..2,open:2.." or "open".
    #[arg(long, default_value = "open")]
    pub schedule: String,
    /// Sample grid t0:t1:dt.
    #[arg(long)]
    pub grid: String,
    /// Initially occupied level (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub initial: u8,
    /// Label the two levels as the spin pair |+1-2⟩, |-1+2⟩.
    #[arg(long)]
    pub spin: bool,
    /// Emit CSV columns t,p1,p2,re1,im1,re2,im2.
    #[arg(long, conflicts_with = "json")]
    #[serde(skip)]
    pub csv: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SignalArgs {
    /// Receiver success probability while the sender is idle.
    #[arg(long)]
    pub p0: f64,
    /// Receiver success probability after the sender acts.
    #[arg(long)]
    pub p1: f64,
    /// Particles per symbol.
    #[arg(long)]
    pub n: Option<u64>,
    /// Decision threshold (default: the one minimizing type1 + type2).
    #[arg(long)]
    pub threshold: Option<u64>,
    /// Target max(type1, type2) for the sample-count search.
    #[arg(long, default_value_t = sigstat::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Message to simulate, e.g. 0101 (1 = sender acts).
    #[arg(long)]
    pub message: Option<String>,
    /// Seed for the simulation.
    #[arg(long, env = "NOSIGNAL_SEED")]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GramArgs {
    /// Built-in map: identity, entangler-same, entangler-opposite.
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<String>,
    /// JSON map file {"basis": [...], "images": [{"re": [...], "im": [...]}, ...]}.
    #[arg(long)]
    pub spec: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FactorArgs {
    /// Built-in matrix: hadamard, cnot, entangler-same, entangler-opposite.
    #[arg(long, conflicts_with = "matrix")]
    pub preset: Option<String>,
    /// JSON matrix file {"re": [[...]], "im": [[...]]}.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Subsystem dimensions of the joint space.
    #[arg(long, default_value = "2,2")]
    pub dims: String,
    /// Acted subsystem (0-based).
    #[arg(long, default_value_t = 0)]
    pub acted: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// Parameters and provenance of one run, with its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub subcommand: String,
    pub parameters: Value,
    pub tool_version: String,
    pub timestamp: String,
    pub results: Value,
}

impl RunManifest {
    pub fn command(&self) -> Result<Command> {
        let tagged = serde_json::json!({
            "subcommand": self.subcommand,
            "parameters": self.parameters,
        });
        serde_json::from_value(tagged).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `SOURCE_DATE_EPOCH` when set, the current time otherwise.
pub fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok());
    let t = match secs.and_then(|s| chrono::DateTime::from_timestamp(s, 0)) {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn manifest(command: &Command, results: Value) -> RunManifest {
    let tagged = serde_json::to_value(command).expect("commands serialize");
    RunManifest {
        schema: SCHEMA_VERSION,
        subcommand: command.name().to_string(),
        parameters: tagged["parameters"].clone(),
        tool_version: TOOL_VERSION.to_string(),
        timestamp: timestamp(),
        results,
    }
}

/// Recomputes the results recorded in a manifest.
pub fn replay(m: &RunManifest) -> Result<Value> {
    if m.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema {}", m.schema)));
    }
    execute(&m.command()?)
}

/// Parses `"RE,IM"`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("complex number must be RE,IM, got `{s}`")))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad number `{x}` in `{s}`: {e}")))
    };
    Ok(C64::new(num(re)?, num(im)?))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisentanglerResult {
    #[serde(flatten)]
    pub verdict: disentangler::AuditVerdict,
    pub receiver_shift: disentangler::ShiftReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalResult {
    pub epsilon: f64,
    pub required_samples: sigstat::SampleRequirement,
    pub budget: Option<SignalBudget>,
    pub errors: Option<sigstat::ErrorReport>,
    pub simulation: Option<sigstat::SimReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramResult {
    pub map: String,
    pub basis: Vec<String>,
    pub report: linmaps::GramReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorResult {
    pub map: String,
    pub dims: Vec<usize>,
    pub report: linmaps::FactorReport,
}

/// JSON map file for `gram --spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub basis: Vec<String>,
    #[serde(default)]
    pub codomain: Option<Vec<String>>,
    pub images: Vec<ImageLiteral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageLiteral(#[serde(with = "json::complex_vec")] pub Vec<C64>);

fn labels_space(labels: &[String]) -> Result<Space> {
    let syms: Vec<&str> = labels.iter().map(String::as_str).collect();
    Space::new(vec![Subsystem::new("", &syms)], LabelStyle::Compact)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn entangler_preset(name: &str) -> Result<EntanglerParams> {
    match name {
        "entangler-same" => EntanglerParams::parse_signs("++"),
        "entangler-opposite" => EntanglerParams::parse_signs("+-"),
        other => Err(Error::InvalidParameter(format!("unknown preset `{other}`"))),
    }
}

fn run_disentangler(a: &DisentanglerArgs) -> Result<Value> {
    let target = DisentanglerTarget::new(parse_complex(&a.alpha)?, parse_complex(&a.beta)?)?;
    Ok(to_value(&DisentanglerResult {
        verdict: disentangler::audit(&target),
        receiver_shift: disentangler::receiver_shift(&target),
    }))
}

fn entangler_readings(a: &EntanglerArgs) -> Result<Vec<EntanglerParams>> {
    let mut readings = match (&a.signs, &a.a, &a.b) {
        (_, Some(x), Some(y)) => vec![EntanglerParams::general(parse_complex(x)?, parse_complex(y)?)],
        (Some(s), _, _) => vec![EntanglerParams::parse_signs(s)?],
        _ => entangler::all_readings().to_vec(),
    };
    if let Some(p) = &a.phase {
        let phase = parse_complex(p)?;
        readings.iter_mut().for_each(|r| r.phase2 = phase);
    }
    Ok(readings)
}

fn run_entangler(a: &EntanglerArgs) -> Result<Value> {
    let reports = entangler_readings(a)?
        .iter()
        .map(entangler::report)
        .collect::<Result<Vec<_>>>()?;
    Ok(to_value(&reports))
}

fn tunnel_setup(a: &TunnelArgs) -> Result<(TunnelConfig, TwoBoxState)> {
    let schedule: Schedule = a.schedule.parse()?;
    let config = TunnelConfig::new(a.gamma, schedule, tunnel::parse_grid(&a.grid)?)?;
    let initial = match a.initial {
        1 => TwoBoxState::first(),
        2 => TwoBoxState::second(),
        k => return Err(Error::InvalidParameter(format!("initial level must be 1 or 2, got {k}"))),
    };
    Ok((config, initial))
}

fn run_tunnel(a: &TunnelArgs) -> Result<Value> {
    let (config, initial) = tunnel_setup(a)?;
    Ok(to_value(&tunnel::report(&config, &initial, a.spin)?))
}

fn run_signal(a: &SignalArgs) -> Result<Value> {
    let required_samples = sigstat::required_samples(a.p0, a.p1, a.epsilon)?;
    let budget = match (a.n, a.threshold) {
        (Some(n), Some(k)) => Some(SignalBudget::new(a.p0, a.p1, n, k)?),
        (Some(n), None) => Some(SignalBudget::with_best_threshold(a.p0, a.p1, n)?),
        (None, Some(_)) => {
            return Err(Error::InvalidParameter("--threshold needs --n".into()));
        }
        (None, None) => None,
    };
    let simulation = match (&a.message, &budget) {
        (Some(m), Some(b)) => Some(sigstat::simulate(b, &sigstat::parse_bits(m)?, a.seed.unwrap_or(0))),
        (Some(_), None) => return Err(Error::InvalidParameter("--message needs --n".into())),
        _ => None,
    };
    Ok(to_value(&SignalResult {
        epsilon: a.epsilon,
        required_samples,
        errors: budget.as_ref().map(sigstat::decision_errors),
        budget,
        simulation,
    }))
}

fn gram_spec(a: &GramArgs) -> Result<(String, BasisMapSpec)> {
    match (&a.preset, &a.spec) {
        (Some(p), _) if p == "identity" => {
            Ok((p.clone(), BasisMapSpec::identity(entangler::psi_space())))
        }
        (Some(p), _) => Ok((p.clone(), entangler::build(&entangler_preset(p)?)?)),
        (None, Some(path)) => {
            let file: MapFile = read_json(path)?;
            let domain = labels_space(&file.basis)?;
            let codomain = match &file.codomain {
                Some(c) => labels_space(c)?,
                None => domain.clone(),
            };
            let images = file.images.into_iter().map(|i| i.0).collect();
            Ok((path.clone(), BasisMapSpec::new(domain, codomain, images)?))
        }
        (None, None) => Err(Error::InvalidParameter("gram needs --preset or --spec".into())),
    }
}

fn run_gram(a: &GramArgs) -> Result<Value> {
    let (map, spec) = gram_spec(a)?;
    Ok(to_value(&GramResult { map, basis: spec.domain().labels(), report: linmaps::gram(&spec) }))
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad dimension `{d}`: {e}")))
        })
        .collect()
}

fn dims_space(dims: &[usize]) -> Result<Space> {
    let subs = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let syms: Vec<String> = (0..d).map(|i| i.to_string()).collect();
            let refs: Vec<&str> = syms.iter().map(String::as_str).collect();
            Subsystem::new((k + 1).to_string(), &refs)
        })
        .collect();
    Space::new(subs, LabelStyle::Compact)
}

fn run_factor(a: &FactorArgs) -> Result<Value> {
    let dims = parse_dims(&a.dims)?;
    let space = dims_space(&dims)?;
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (map, report) = match (&a.preset, &a.matrix) {
        (Some(p), _) => {
            if dims != [2, 2] {
                return Err(Error::InvalidParameter("presets live on --dims 2,2".into()));
            }
            let report = match p.as_str() {
                "hadamard" => {
                    let h = DMatrix::from_row_slice(2, 2, &[r, r, r, -r]);
                    local_factor(&lift_local(&h, &space, 0)?, &space, a.acted)?
                }
                "cnot" => {
                    let mut m = DMatrix::<C64>::zeros(4, 4);
                    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                        m[(i, j)] = C64::new(1.0, 0.0);
                    }
                    local_factor(&m, &space, a.acted)?
                }
                other => entangler::full_space(&entangler_preset(other)?)?.local_factor(a.acted)?,
            };
            (p.clone(), report)
        }
        (None, Some(path)) => {
            let MatrixLiteral(m) = read_json(path)?;
            (path.clone(), local_factor(&m, &space, a.acted)?)
        }
        (None, None) => {
            return Err(Error::InvalidParameter("factor needs --preset or --matrix".into()))
        }
    };
    Ok(to_value(&FactorResult { map, dims, report }))
}

/// Computes the results payload of a command.
pub fn execute(command: &Command) -> Result<Value> {
    match command {
        Command::Disentangler(a) => run_disentangler(a),
        Command::Entangler(a) => run_entangler(a),
        Command::Tunnel(a) => run_tunnel(a),
        Command::Signal(a) => run_signal(a),
        Command::Gram(a) => run_gram(a),
        Command::Factor(a) => run_factor(a),
    }
}

fn wants_json(command: &Command) -> bool {
    match command {
        Command::Disentangler(a) => a.output.json,
        Command::Entangler(a) => a.output.json,
        Command::Tunnel(a) => a.output.json,
        Command::Signal(a) => a.output.json,
        Command::Gram(a) => a.output.json,
        Command::Factor(a) => a.output.json,
    }
}

fn emit(command: &Command, out: &mut dyn Write) -> Result<()> {
    let results = execute(command)?;
    let io = |e: std::io::Error| Error::InvalidParameter(format!("write failed: {e}"));
    if let Command::Tunnel(a) = command {
        if a.csv {
            let (config, initial) = tunnel_setup(a)?;
            return out.write_all(tunnel::to_csv(&tunnel::trace(&config, &initial)?).as_bytes()).map_err(io);
        }
    }
    if wants_json(command) {
        let m = manifest(command, results);
        let s = serde_json::to_string_pretty(&m).expect("manifest serializes");
        writeln!(out, "{s}").map_err(io)
    } else {
        out.write_all(text::render(command, &results).as_bytes()).map_err(io)
    }
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match emit(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
