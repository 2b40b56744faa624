//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 circuit parse error,
//! 3 engine disagreement, 4 photon budget exceeded.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::circuit::random::{random_circuits, RandomCircuitConfig};
use crate::circuit::{
    builtin, builtin_names, cross_check, parse_circuit, parse_complex, run_circuit, Circuit, CircuitError, RunReport,
};
use crate::diffraction::{airy_profile_with_nodes, DiffractionError, MirrorGeometry, DEFAULT_RADIAL_NODES};
use crate::elements::{balanced_rbs_coefficients, ElementError, Matrix, ModeTransform};
use crate::engine::{scatter_two_mode, trace_paths, EngineKind};
use crate::fock::{Amplitude, Basis, ModeId, DEFAULT_MAX_PHOTONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Environment variable that overrides the default photon budget.
pub const MAX_PHOTONS_ENV: &str = "FOCKPATH_MAX_PHOTONS";

/// Largest engine discrepancy `check` accepts.
const CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "fockpath",
    version,
    about = "Few-photon linear optics with two independent engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Paths,
    Operators,
    Both,
}

impl From<EngineArg> for EngineKind {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Paths => EngineKind::Paths,
            EngineArg::Operators => EngineKind::Operators,
            EngineArg::Both => EngineKind::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TraceElement {
    Rbs,
    Identity,
    Waveplate,
    Pbs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a circuit file or a built-in demo.
    Run {
        /// Circuit file (.fpc).
        #[arg(required_unless_present = "demo", conflicts_with = "demo")]
        input: Option<PathBuf>,
        /// Built-in circuit: mzi, hom, example1 .. example5.
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_enum, default_value = "both")]
        engine: EngineArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_photons: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the photon routings of |n1>|n2> through a two-mode element.
    Trace {
        n1: u32,
        n2: u32,
        #[arg(long, value_enum, default_value = "rbs")]
        element: TraceElement,
        /// Reflection coefficient, e.g. 0.6+0i (default balanced).
        #[arg(long, requires = "tau", allow_hyphen_values = true)]
        rho: Option<String>,
        /// Transmission coefficient, e.g. 0+0.8i.
        #[arg(long, requires = "rho", allow_hyphen_values = true)]
        tau: Option<String>,
        /// Wave-plate retardance in degrees.
        #[arg(long, default_value_t = 180.0, allow_hyphen_values = true)]
        phase: f64,
        /// Wave-plate or PBS axis in degrees.
        #[arg(long, default_value_t = 45.0, allow_hyphen_values = true)]
        axis: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_photons: Option<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Focal-plane amplitude of a paraboloidal mirror.
    Airy {
        /// Vacuum wavelength, metres.
        #[arg(long, default_value_t = 0.5e-6)]
        wavelength: f64,
        /// Focal length, metres.
        #[arg(long, default_value_t = 0.2)]
        focal: f64,
        /// Aperture radius, metres.
        #[arg(long, default_value_t = 0.01)]
        aperture: f64,
        /// Source distance, metres (default 2f).
        #[arg(long, conflicts_with = "z2")]
        z1: Option<f64>,
        /// Image distance, metres.
        #[arg(long)]
        z2: Option<f64>,
        /// Number of profile points.
        #[arg(long, default_value_t = 61)]
        samples: usize,
        /// Largest radial offset, metres (default three Airy radii).
        #[arg(long)]
        rmax: Option<f64>,
        /// Include the quartic aberration phase.
        #[arg(long)]
        aberration: bool,
        /// Divide amplitudes by the ideal peak πR².
        #[arg(long)]
        normalize: bool,
        /// Radial quadrature nodes.
        #[arg(long, default_value_t = DEFAULT_RADIAL_NODES)]
        nodes: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check both engines on seeded random circuits.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_photons: Option<u32>,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CircuitError> for Failure {
    fn from(e: CircuitError) -> Self {
        let code = match &e {
            CircuitError::Parse(_) => EXIT_PARSE,
            CircuitError::Disagreement(_) => EXIT_DISAGREEMENT,
            e if e.is_budget() => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DiffractionError> for Failure {
    fn from(e: DiffractionError) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<ElementError> for Failure {
    fn from(e: ElementError) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

/// Rounds to 12 significant digits; negative zero becomes zero.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn num(x: f64) -> Value {
    json!(round12(x))
}

fn complex_json(z: Amplitude) -> Value {
    json!({"re": round12(z.re), "im": round12(z.im)})
}

fn budget(flag: Option<u32>, env: Option<&str>) -> Result<u32, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match env {
        None => Ok(DEFAULT_MAX_PHOTONS),
        Some(v) => match v.trim().parse::<u32>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::new(
                EXIT_FAILURE,
                format!("{MAX_PHOTONS_ENV} must be a positive integer, got `{v}`"),
            )),
        },
    }
}

fn load_circuit(input: Option<&Path>, demo: Option<&str>) -> Result<Circuit, Failure> {
    if let Some(name) = demo {
        return builtin(name).ok_or_else(|| {
            let names: Vec<&str> = builtin_names().collect();
            Failure::new(
                EXIT_FAILURE,
                format!("unknown demo `{name}` (available: {})", names.join(", ")),
            )
        });
    }
    let path = input.expect("clap requires an input or a demo");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot read {}: {e}", path.display())))?;
    let circuit = parse_circuit(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Ok(match name {
        Some(n) => circuit.with_name(n),
        None => circuit,
    })
}

fn run_json(report: &RunReport) -> Value {
    let state: Vec<Value> = report
        .state
        .to_wire()
        .into_iter()
        .map(|t| json!({"occupancy": t.occupancy, "re": round12(t.re), "im": round12(t.im)}))
        .collect();
    let marginal: Map<String, Value> = report
        .marginals()
        .into_iter()
        .map(|(port, dist)| {
            let d: Map<String, Value> = dist.into_iter().map(|(n, p)| (n.to_string(), num(p))).collect();
            (port, Value::Object(d))
        })
        .collect();
    let ports: Vec<&str> = report.state.ports().into_iter().collect();
    let joint: Map<String, Value> = report
        .state
        .number_distribution(&ports)
        .expect("ports taken from the state")
        .into_iter()
        .map(|(k, p)| {
            let key: Vec<String> = k.iter().map(u32::to_string).collect();
            (key.join(","), num(p))
        })
        .collect();
    json!({
        "engine": report.engine.as_str(),
        "state": state,
        "distributions": {"ports": ports, "joint": joint, "marginal": marginal},
        "discrepancy": report.discrepancy.map(round12),
    })
}

fn run_csv(report: &RunReport) -> String {
    let mut out = String::from("occupancy,re,im,probability\n");
    for (basis, amp) in report.state.terms() {
        let occ: Vec<String> = basis.iter().map(|(m, n)| format!("{m}={n}")).collect();
        out.push_str(&format!(
            "{},{},{},{}\n",
            occ.join(";"),
            round12(amp.re),
            round12(amp.im),
            round12(amp.norm_sqr())
        ));
    }
    out
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_run(
    input: Option<&Path>,
    demo: Option<&str>,
    engine: EngineKind,
    max_photons: u32,
    format: Format,
) -> Result<String, Failure> {
    let circuit = load_circuit(input, demo)?;
    let report = run_circuit(&circuit, engine, max_photons)?;
    Ok(match format {
        Format::Json => pretty(&run_json(&report)),
        Format::Csv => run_csv(&report),
    })
}

fn parse_complex_arg(text: &str) -> Result<Amplitude, Failure> {
    parse_complex(text).ok_or_else(|| Failure::new(EXIT_FAILURE, format!("malformed complex number `{text}`")))
}

fn trace_matrix(
    element: TraceElement,
    rho: Option<&str>,
    tau: Option<&str>,
    phase: f64,
    axis: f64,
) -> Result<(String, Matrix), Failure> {
    let lab = ModeId::pair("a", Basis::Lab);
    let pair = |p: &str| ModeId::pair(p, Basis::Lab)[0].clone();
    let (name, t) = match element {
        TraceElement::Rbs => {
            let (r, t) = match (rho, tau) {
                (Some(r), Some(t)) => (parse_complex_arg(r)?, parse_complex_arg(t)?),
                _ => balanced_rbs_coefficients(),
            };
            (
                "rbs",
                ModeTransform::rbs([pair("1"), pair("2")], [pair("3"), pair("4")], r, t)?,
            )
        }
        TraceElement::Identity => ("identity", ModeTransform::identity(lab.to_vec())?),
        TraceElement::Waveplate => (
            "waveplate",
            ModeTransform::waveplate_in_axes(lab, phase.to_radians(), axis.to_radians())?,
        ),
        TraceElement::Pbs => ("pbs", ModeTransform::pbs(lab, "t", "r", axis.to_radians())?),
    };
    Ok((name.to_string(), t.matrix().clone()))
}

fn cmd_trace(n1: u32, n2: u32, matrix: (String, Matrix), max_photons: u32) -> Result<String, Failure> {
    let total = n1 + n2;
    if total > max_photons {
        return Err(Failure::new(
            EXIT_BUDGET,
            format!("{total} photons exceed the budget of {max_photons}"),
        ));
    }
    let (name, m) = matrix;
    let m2 = m.as_2x2().expect("trace elements are two-mode");
    let traces = trace_paths(n1, n2, &m2)?;
    let amps = scatter_two_mode(n1, n2, &m2)?;
    let traces: Vec<Value> = traces
        .iter()
        .map(|t| {
            let out = t.output();
            json!({
                "assignment": t.assignment,
                "output": [out.0, out.1],
                "re": round12(t.amplitude.re),
                "im": round12(t.amplitude.im),
                "multiplicity": t.multiplicity,
                "bose_factor": round12(t.bose_factor),
            })
        })
        .collect();
    let amplitudes: Vec<Value> = amps
        .iter()
        .rev()
        .map(|(&(a, b), z)| json!({"output": [a, b], "re": round12(z.re), "im": round12(z.im)}))
        .collect();
    let matrix: Vec<Vec<Value>> = m2
        .iter()
        .map(|row| row.iter().map(|z| complex_json(*z)).collect())
        .collect();
    Ok(pretty(&json!({
        "element": name,
        "input": [n1, n2],
        "matrix": matrix,
        "traces": traces,
        "amplitudes": amplitudes,
    })))
}

#[allow(clippy::too_many_arguments)]
fn cmd_airy(
    wavelength: f64,
    focal: f64,
    aperture: f64,
    z1: Option<f64>,
    z2: Option<f64>,
    samples: usize,
    rmax: Option<f64>,
    aberration: bool,
    normalize: bool,
    nodes: usize,
    format: Format,
) -> Result<String, Failure> {
    let geometry = match (z1, z2) {
        (Some(_), Some(_)) => return Err(Failure::new(EXIT_FAILURE, "give either --z1 or --z2, not both")),
        (None, Some(z2)) => MirrorGeometry::from_image_distance(focal, aperture, wavelength, z2)?,
        (z1, None) => MirrorGeometry::new(focal, aperture, wavelength, z1.unwrap_or(2.0 * focal))?,
    };
    if samples == 0 {
        return Err(Failure::new(EXIT_FAILURE, "--samples must be at least 1"));
    }
    if nodes < 8 {
        return Err(Failure::new(EXIT_FAILURE, "--nodes must be at least 8"));
    }
    let rmax = rmax.unwrap_or(3.0 * geometry.airy_radius());
    let profile = airy_profile_with_nodes(&geometry, samples, rmax, aberration, nodes)?;
    let scale = if normalize {
        1.0 / (std::f64::consts::PI * aperture * aperture)
    } else {
        1.0
    };
    let rows: Vec<[f64; 4]> = profile
        .iter()
        .map(|s| [s.rho2_m, s.re * scale, s.im * scale, s.abs * scale].map(round12))
        .collect();
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("rho2_m,re,im,abs\n");
            for [r, re, im, a] in rows {
                out.push_str(&format!("{r},{re},{im},{a}\n"));
            }
            out
        }
        Format::Json => {
            let samples: Vec<Value> = rows
                .into_iter()
                .map(|[r, re, im, a]| json!({"rho2_m": r, "re": re, "im": im, "abs": a}))
                .collect();
            pretty(&json!({
                "geometry": {
                    "wavelength": num(geometry.wavelength()),
                    "focal": num(geometry.focal()),
                    "aperture": num(geometry.aperture()),
                    "z1": num(geometry.z1()),
                    "z2": num(geometry.z2()),
                    "airy_radius": num(geometry.airy_radius()),
                },
                "aberration": aberration,
                "normalized": normalize,
                "samples": samples,
            }))
        }
    })
}

fn cmd_check(seed: u64, count: usize, max_photons: u32) -> Result<(String, bool), Failure> {
    let cfg = RandomCircuitConfig {
        max_photons: max_photons.min(4),
        ..RandomCircuitConfig::default()
    };
    let mut worst = 0.0f64;
    let mut worst_index = 0usize;
    let mut failures = BTreeMap::new();
    for (i, text) in random_circuits(seed, count, &cfg).iter().enumerate() {
        let circuit = parse_circuit(text).map_err(CircuitError::from)?;
        let d = cross_check(&circuit, max_photons)?;
        if d > worst {
            worst = d;
            worst_index = i;
        }
        if d.is_nan() || d >= CHECK_TOLERANCE {
            failures.insert(i, num(d));
        }
    }
    let ok = failures.is_empty();
    let report = json!({
        "seed": seed,
        "circuits": count,
        "max_discrepancy": round12(worst),
        "worst_index": worst_index,
        "tolerance": CHECK_TOLERANCE,
        "failures": failures.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<String, Value>>(),
        "passed": ok,
    });
    Ok((pretty(&report), ok))
}

/// Writes `contents` to `path` via a temporary file so a failure never
/// leaves a partial file behind.
fn write_atomically(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| Failure::new(EXIT_FAILURE, format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    let result = std::fs::write(&tmp, contents).and_then(|()| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Failure::new(
            EXIT_FAILURE,
            format!("cannot write {}: {e}", path.display()),
        ));
    }
    Ok(())
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => write_atomically(p, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot write output: {e}"))),
    }
}

fn dispatch(cli: Cli, env_max: Option<&str>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Run {
            input,
            demo,
            engine,
            max_photons,
            format,
            output,
        } => {
            let max = budget(max_photons, env_max)?;
            let text = cmd_run(input.as_deref(), demo.as_deref(), engine.into(), max, format)?;
            emit(&text, output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Trace {
            n1,
            n2,
            element,
            rho,
            tau,
            phase,
            axis,
            max_photons,
            output,
        } => {
            let max = budget(max_photons, env_max)?;
            let matrix = trace_matrix(element, rho.as_deref(), tau.as_deref(), phase, axis)?;
            let text = cmd_trace(n1, n2, matrix, max)?;
            emit(&text, output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Airy {
            wavelength,
            focal,
            aperture,
            z1,
            z2,
            samples,
            rmax,
            aberration,
            normalize,
            nodes,
            format,
            output,
        } => {
            let text = cmd_airy(
                wavelength, focal, aperture, z1, z2, samples, rmax, aberration, normalize, nodes, format,
            )?;
            emit(&text, output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Check {
            seed,
            count,
            max_photons,
        } => {
            let max = budget(max_photons, env_max)?;
            let (text, ok) = cmd_check(seed, count, max)?;
            emit(&text, None, stdout)?;
            Ok(if ok { EXIT_OK } else { EXIT_DISAGREEMENT })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. `env_max` is the value of [`MAX_PHOTONS_ENV`], if set.
pub fn run<I, T>(args: I, env_max: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    match dispatch(cli, env_max, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point used by the binary.
pub fn main_entry() -> i32 {
    let env_max = std::env::var(MAX_PHOTONS_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(
        std::env::args_os(),
        env_max.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}
