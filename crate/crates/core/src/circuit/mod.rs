//! Circuits: sources, elements and the `.fpc` text format.
//!
//! A circuit declares ports, puts at most one source on each, and applies
//! elements strictly in file order. Every port carries two polarization
//! modes. Declared ports start in the lab basis `{x, y}`; a polarizing beam
//! splitter labels its outputs in its own rotated basis `{x', y'}` and a
//! `rotpol` switches a port between the two bases. Angles are degrees in the
//! text format and radians everywhere else.

mod builtins;
mod dsl;
pub mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::coherent::{coherent_state, CoherentError, CoherentParams};
use crate::elements::{balanced_rbs_coefficients, ElementError, ModeTransform};
use crate::engine::operators::{polynomial_to_state, CreationPolynomial};
use crate::engine::{Engine, EngineError, EngineKind, OperatorEngine, PathEngine};
use crate::fock::{Amplitude, Basis, FockBasisState, ModeId, PhotonState, Pol, StateError};

pub use builtins::{builtin, builtin_names, BUILTINS};
pub use dsl::{format_complex, format_number, parse_circuit, parse_complex, ErrorCode, ParseError};

/// Largest amplitude difference tolerated between the two engines.
pub const AGREEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("engines disagree: max amplitude difference {0:e}")]
    Disagreement(f64),
    #[error("photon budget exceeded: sources hold up to {total} photons, maximum is {max}")]
    Budget { total: u32, max: u32 },
    #[error("invalid source: {0}")]
    Source(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error(transparent)]
    State(#[from] StateError),
}

impl CircuitError {
    /// True for any flavour of photon-budget violation.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            CircuitError::Budget { .. }
                | CircuitError::Engine(EngineError::BudgetExceeded { .. })
                | CircuitError::Coherent(CoherentError::BudgetTooSmall(..))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Handedness {
    Rcp,
    Lcp,
}

impl Handedness {
    pub fn as_str(self) -> &'static str {
        match self {
            Handedness::Rcp => "rcp",
            Handedness::Lcp => "lcp",
        }
    }
}

/// What a `source` statement puts on its port.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    /// `n` photons in one lab polarization (`x` when not written).
    Fock {
        n: u32,
        pol: Option<Pol>,
    },
    /// `n` photons linearly polarized at `angle_deg` from `x`.
    LinPol {
        angle_deg: f64,
        n: u32,
    },
    CircPol {
        handedness: Handedness,
        n: u32,
    },
    /// One right- and one left-circular photon in the same packet.
    RcpLcpPair,
    Coherent {
        re: f64,
        im: f64,
        pol: Option<Pol>,
    },
}

impl SourceSpec {
    pub fn is_coherent(&self) -> bool {
        matches!(self, SourceSpec::Coherent { .. })
    }
}

/// Beam-splitter coefficients as written.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Splitting {
    /// `split=50`: `ρ = 1/√2`, `τ = i/√2`.
    Balanced,
    Explicit {
        rho: Amplitude,
        tau: Amplitude,
    },
}

impl Splitting {
    pub fn coefficients(self) -> (Amplitude, Amplitude) {
        match self {
            Splitting::Balanced => balanced_rbs_coefficients(),
            Splitting::Explicit { rho, tau } => (rho, tau),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementSpec {
    /// Inputs `(1, 2)` to outputs `(3, 4)`.
    Rbs {
        splitting: Splitting,
        inputs: [String; 2],
        outputs: [String; 2],
    },
    Pbs {
        axis_deg: f64,
        input: String,
        transmitted: String,
        reflected: String,
    },
    WavePlate {
        phase_deg: f64,
        axis_deg: f64,
        port: String,
    },
    RotPol {
        angle_deg: f64,
        port: String,
    },
    Phase {
        deg: f64,
        port: String,
    },
}

impl ElementSpec {
    pub fn keyword(&self) -> &'static str {
        match self {
            ElementSpec::Rbs { .. } => "rbs",
            ElementSpec::Pbs { .. } => "pbs",
            ElementSpec::WavePlate { .. } => "waveplate",
            ElementSpec::RotPol { .. } => "rotpol",
            ElementSpec::Phase { .. } => "phase",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Blank,
    /// A whole-line comment, kept verbatim (including the `#`).
    Comment(String),
    Port(String),
    Source {
        port: String,
        spec: SourceSpec,
    },
    Element(ElementSpec),
}

/// One line of a circuit file.
#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
    /// Trailing `# ...` comment, kept verbatim.
    pub comment: Option<String>,
}

/// A parsed circuit. Build one with [`parse_circuit`] or [`builtin`].
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    name: Option<String>,
    statements: Vec<Statement>,
}

impl Circuit {
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    /// Declared ports in declaration order.
    pub fn ports(&self) -> Vec<&str> {
        self.statements
            .iter()
            .filter_map(|s| match &s.kind {
                StatementKind::Port(p) => Some(p.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn sources(&self) -> Vec<(&str, &SourceSpec)> {
        self.statements
            .iter()
            .filter_map(|s| match &s.kind {
                StatementKind::Source { port, spec } => Some((port.as_str(), spec)),
                _ => None,
            })
            .collect()
    }

    /// Elements with the line they were written on.
    pub fn elements(&self) -> Vec<(usize, &ElementSpec)> {
        self.statements
            .iter()
            .filter_map(|s| match &s.kind {
                StatementKind::Element(e) => Some((s.line, e)),
                _ => None,
            })
            .collect()
    }

    pub fn has_coherent_source(&self) -> bool {
        self.sources().iter().any(|(_, s)| s.is_coherent())
    }

    /// Canonical text; parsing it back yields an identical circuit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.statements {
            out.push_str(&dsl::format_statement(s));
            out.push('\n');
        }
        out
    }

    /// Resolves ports and bases into mode transforms and builds the initial
    /// state. Sources and the photon budget are checked here.
    pub fn compile(&self, max_photons: u32) -> Result<CompiledCircuit, CircuitError> {
        let ports: Vec<&str> = self.ports();
        let mut initial = PhotonState::vacuum([]);
        for (port, spec) in self.sources() {
            initial = initial.product(&make_source(spec, port, max_photons)?)?;
        }
        let total = initial.max_total_photons();
        if total > max_photons {
            return Err(CircuitError::Budget {
                total,
                max: max_photons,
            });
        }
        let initial = initial.with_modes(ports.iter().flat_map(|p| ModeId::pair(p, Basis::Lab)));
        let mut flow = PortFlow::new(ports.iter().copied());
        for (port, _) in self.sources() {
            flow.state.insert(port.to_string(), PortState::Live(Basis::Lab));
        }
        let mut steps = Vec::new();
        for (line, element) in self.elements() {
            let transforms = flow.apply(element).map_err(|e| match e {
                FlowError::Element(e) => CircuitError::Element(e),
                FlowError::Flow(msg) => CircuitError::Parse(ParseError::new(ErrorCode::PortFlow, line, 1, msg)),
            })?;
            steps.push(Step { line, transforms });
        }
        Ok(CompiledCircuit { initial, steps })
    }
}

/// Mode transforms of one element, in application order.
#[derive(Clone, Debug)]
pub struct Step {
    pub line: usize,
    pub transforms: Vec<ModeTransform>,
}

#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    pub initial: PhotonState,
    pub steps: Vec<Step>,
}

impl CompiledCircuit {
    pub fn transforms(&self) -> impl Iterator<Item = &ModeTransform> {
        self.steps.iter().flat_map(|s| s.transforms.iter())
    }

    /// Pushes the initial state through every transform with `engine`.
    pub fn evolve(&self, engine: &dyn Engine) -> Result<PhotonState, EngineError> {
        let mut state = self.initial.clone();
        for t in self.transforms() {
            state = state.with_modes(t.in_modes().iter().cloned());
            state = engine.apply(&state, t)?;
        }
        Ok(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PortState {
    Fresh,
    Live(Basis),
    Consumed,
}

pub(crate) enum FlowError {
    Flow(String),
    Element(ElementError),
}

/// Tracks which ports can still feed or receive light and in which basis
/// their modes are labeled.
#[derive(Clone, Debug)]
pub(crate) struct PortFlow {
    pub(crate) state: BTreeMap<String, PortState>,
}

impl PortFlow {
    pub(crate) fn new<'a>(ports: impl IntoIterator<Item = &'a str>) -> Self {
        PortFlow {
            state: ports.into_iter().map(|p| (p.to_string(), PortState::Fresh)).collect(),
        }
    }

    fn live_basis(&self, port: &str) -> Result<Basis, FlowError> {
        match self.state.get(port) {
            Some(PortState::Fresh) => Ok(Basis::Lab),
            Some(PortState::Live(b)) => Ok(*b),
            Some(PortState::Consumed) => Err(FlowError::Flow(format!(
                "port `{port}` was already used as an element input"
            ))),
            None => Err(FlowError::Flow(format!("port `{port}` is not declared"))),
        }
    }

    fn require_fresh(&self, port: &str, allowed: &[&str]) -> Result<(), FlowError> {
        if allowed.contains(&port) {
            return Ok(());
        }
        match self.state.get(port) {
            Some(PortState::Fresh) => Ok(()),
            _ => Err(FlowError::Flow(format!("output port `{port}` already carries light"))),
        }
    }

    /// Transforms for `element` given the current port bases; updates the
    /// bookkeeping on success.
    pub(crate) fn apply(&mut self, element: &ElementSpec) -> Result<Vec<ModeTransform>, FlowError> {
        let el = FlowError::Element;
        match element {
            ElementSpec::WavePlate {
                phase_deg,
                axis_deg,
                port,
            } => {
                let b = self.live_basis(port)?;
                let t = ModeTransform::waveplate(ModeId::pair(port, b), phase_deg.to_radians(), axis_deg.to_radians())
                    .map_err(el)?;
                self.state.insert(port.clone(), PortState::Live(b));
                Ok(vec![t])
            }
            ElementSpec::RotPol { angle_deg, port } => {
                let b = self.live_basis(port)?;
                let t =
                    ModeTransform::polarization_rotation(ModeId::pair(port, b), angle_deg.to_radians()).map_err(el)?;
                self.state.insert(port.clone(), PortState::Live(b.toggled()));
                Ok(vec![t])
            }
            ElementSpec::Phase { deg, port } => {
                let b = self.live_basis(port)?;
                self.state.insert(port.clone(), PortState::Live(b));
                Ok(ModeId::pair(port, b)
                    .into_iter()
                    .map(|m| ModeTransform::phase_shifter(m, deg.to_radians()))
                    .collect())
            }
            ElementSpec::Pbs {
                axis_deg,
                input,
                transmitted,
                reflected,
            } => {
                let b = self.live_basis(input)?;
                if transmitted == reflected || transmitted == input || reflected == input {
                    return Err(FlowError::Flow(
                        "polarizing beam splitter needs two distinct output ports different from its input".into(),
                    ));
                }
                self.require_fresh(transmitted, &[])?;
                self.require_fresh(reflected, &[])?;
                let t = ModeTransform::pbs(ModeId::pair(input, b), transmitted, reflected, axis_deg.to_radians())
                    .map_err(el)?;
                self.state.insert(input.clone(), PortState::Consumed);
                self.state.insert(transmitted.clone(), PortState::Live(Basis::Rotated));
                self.state.insert(reflected.clone(), PortState::Live(Basis::Rotated));
                Ok(vec![t])
            }
            ElementSpec::Rbs {
                splitting,
                inputs,
                outputs,
            } => {
                let [a, b] = inputs;
                let [c, d] = outputs;
                if a == b || c == d {
                    return Err(FlowError::Flow("beam splitter ports must be distinct".into()));
                }
                let ba = self.live_basis(a)?;
                let bb = self.live_basis(b)?;
                let ins = [a.as_str(), b.as_str()];
                self.require_fresh(c, &ins)?;
                self.require_fresh(d, &ins)?;
                let (rho, tau) = splitting.coefficients();
                let (pa, pb) = (ModeId::pair(a, ba), ModeId::pair(b, bb));
                let (pc, pd) = (ModeId::pair(c, ba), ModeId::pair(d, ba));
                let mut ts = Vec::with_capacity(2);
                for i in 0..2 {
                    ts.push(
                        ModeTransform::rbs([pa[i].clone(), pb[i].clone()], [pc[i].clone(), pd[i].clone()], rho, tau)
                            .map_err(el)?,
                    );
                }
                for p in [a, b] {
                    self.state.insert(p.clone(), PortState::Consumed);
                }
                for p in [c, d] {
                    self.state.insert(p.clone(), PortState::Live(ba));
                }
                Ok(ts)
            }
        }
    }
}

fn lab_pol(pol: Option<Pol>) -> Pol {
    pol.unwrap_or(Pol::X)
}

/// `(cx a_x† + cy a_y†)ⁿ / √n!` applied to the vacuum of `port`.
fn polarized_photons(port: &str, cx: Amplitude, cy: Amplitude, n: u32) -> Result<PhotonState, CircuitError> {
    let [mx, my] = ModeId::pair(port, Basis::Lab);
    let mut poly: BTreeMap<u32, Amplitude> = BTreeMap::from([(0, Amplitude::new(1.0, 0.0))]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (kx, c) in poly {
            *next.entry(kx + 1).or_insert(Amplitude::default()) += c * cx;
            *next.entry(kx).or_insert(Amplitude::default()) += c * cy;
        }
        poly = next;
    }
    let norm = crate::combinatorics::sqrt_factorial(n);
    let terms = poly.into_iter().map(|(kx, c)| {
        (
            FockBasisState::from_counts([(mx.clone(), kx), (my.clone(), n - kx)]),
            c / norm,
        )
    });
    let p = CreationPolynomial::from_terms([mx.clone(), my.clone()], terms);
    Ok(polynomial_to_state(&p)?.state)
}

/// The normalized state a source puts on `port`.
///
/// `max_photons` caps the truncation of coherent sources.
pub fn make_source(spec: &SourceSpec, port: &str, max_photons: u32) -> Result<PhotonState, CircuitError> {
    let lab = ModeId::pair(port, Basis::Lab);
    let one = Amplitude::new(1.0, 0.0);
    match spec {
        SourceSpec::Fock { n, pol } => {
            let pol = lab_pol(*pol);
            if pol.basis() != Basis::Lab {
                return Err(CircuitError::Source(format!(
                    "fock source polarization must be x or y, got {pol}"
                )));
            }
            Ok(PhotonState::basis(
                lab.clone(),
                FockBasisState::from_counts([(ModeId::new(port, pol), *n)]),
            ))
        }
        SourceSpec::LinPol { angle_deg, n } => {
            let (s, c) = angle_deg.to_radians().sin_cos();
            polarized_photons(port, one * c, one * s, *n)
        }
        SourceSpec::CircPol { handedness, n } => {
            let cy = match handedness {
                Handedness::Rcp => Amplitude::new(0.0, FRAC_1_SQRT_2),
                Handedness::Lcp => Amplitude::new(0.0, -FRAC_1_SQRT_2),
            };
            polarized_photons(port, one * FRAC_1_SQRT_2, cy, *n)
        }
        SourceSpec::RcpLcpPair => {
            let terms = [(2, 0), (0, 2)].map(|(nx, ny)| {
                (
                    FockBasisState::from_counts([(lab[0].clone(), nx), (lab[1].clone(), ny)]),
                    one * FRAC_1_SQRT_2,
                )
            });
            Ok(PhotonState::from_terms(lab.clone(), terms))
        }
        SourceSpec::Coherent { re, im, pol } => {
            let pol = lab_pol(*pol);
            let gamma = Amplitude::new(*re, *im);
            let params = CoherentParams::with_default_truncation(gamma, max_photons)?;
            let state = coherent_state(ModeId::new(port, pol), &params).with_modes(lab.clone());
            Ok(state.normalize()?)
        }
    }
}

/// Result of [`run_circuit`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub engine: EngineKind,
    pub state: PhotonState,
    /// Max amplitude difference between the engines; only when both ran.
    pub discrepancy: Option<f64>,
}

impl RunReport {
    /// Per-port photon-number marginals over every port of the output.
    pub fn marginals(&self) -> BTreeMap<String, BTreeMap<u32, f64>> {
        let ports: BTreeSet<&str> = self.state.ports();
        ports
            .into_iter()
            .map(|p| {
                let dist = self
                    .state
                    .number_distribution(&[p])
                    .expect("port taken from the state")
                    .into_iter()
                    .map(|(k, v)| (k[0], v))
                    .collect();
                (p.to_string(), dist)
            })
            .collect()
    }
}

/// Runs `circuit` with the selected engine(s).
///
/// With [`EngineKind::Both`] the path-sum result is returned and the run
/// fails if the operator engine differs by more than
/// [`AGREEMENT_TOLERANCE`] on any amplitude.
pub fn run_circuit(circuit: &Circuit, engine: EngineKind, max_photons: u32) -> Result<RunReport, CircuitError> {
    let compiled = circuit.compile(max_photons)?;
    let paths = PathEngine::new(max_photons);
    let operators = OperatorEngine::new(max_photons);
    let (state, discrepancy) = match engine {
        EngineKind::Paths => (compiled.evolve(&paths)?, None),
        EngineKind::Operators => (compiled.evolve(&operators)?, None),
        EngineKind::Both => {
            let a = compiled.evolve(&paths)?;
            let b = compiled.evolve(&operators)?;
            let d = a.max_abs_difference(&b);
            if d.is_nan() || d > AGREEMENT_TOLERANCE {
                return Err(CircuitError::Disagreement(d));
            }
            (a, Some(d))
        }
    };
    Ok(RunReport {
        engine,
        state,
        discrepancy,
    })
}

/// Runs both engines and returns their largest amplitude difference.
pub fn cross_check(circuit: &Circuit, max_photons: u32) -> Result<f64, CircuitError> {
    let compiled = circuit.compile(max_photons)?;
    let a = compiled.evolve(&PathEngine::new(max_photons))?;
    let b = compiled.evolve(&OperatorEngine::new(max_photons))?;
    Ok(a.max_abs_difference(&b))
}
