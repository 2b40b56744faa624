//! State evolution through optical elements.
//!
//! Two independent engines implement [`Engine`]: [`PathEngine`] sums
//! amplitudes over photon routings, [`OperatorEngine`] rewrites states as
//! creation-operator polynomials and substitutes the element's mode relations.

pub mod operators;
pub mod paths;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::elements::ElementError;
use crate::fock::{ModeId, PhotonState, StateError};

pub use operators::{CreationPolynomial, OperatorEngine};
pub use paths::{scatter_two_mode, trace_paths, PathEngine, RoutingTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("photon budget exceeded: state holds {total} photons, maximum is {max}")]
    BudgetExceeded { total: u32, max: u32 },
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which engine(s) evolve a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Paths,
    Operators,
    Both,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::Paths => "paths",
            EngineKind::Operators => "operators",
            EngineKind::Both => "both",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paths" => Ok(EngineKind::Paths),
            "operators" => Ok(EngineKind::Operators),
            "both" => Ok(EngineKind::Both),
            other => Err(format!("unknown engine `{other}` (expected paths, operators or both)")),
        }
    }
}

pub trait Engine {
    fn name(&self) -> &'static str;

    /// Evolves `state` through `t`. The result is normalized.
    fn apply(&self, state: &PhotonState, t: &crate::elements::ModeTransform) -> Result<PhotonState, EngineError>;
}

/// Validates that `t` can act on `state` and returns the output mode universe.
pub(crate) fn prepare(
    state: &PhotonState,
    t: &crate::elements::ModeTransform,
    max_photons: u32,
) -> Result<BTreeSet<ModeId>, EngineError> {
    for m in t.in_modes() {
        if !state.modes().contains(m) {
            return Err(EngineError::ModeMismatch(format!(
                "input mode {m} is not part of the state"
            )));
        }
    }
    let total = state.max_total_photons();
    if total > max_photons {
        return Err(EngineError::BudgetExceeded {
            total,
            max: max_photons,
        });
    }
    for m in t.out_modes() {
        if t.in_modes().contains(m) {
            continue;
        }
        if state.terms().any(|(b, _)| b.count(m) > 0) {
            return Err(EngineError::ModeMismatch(format!(
                "output mode {m} is already occupied"
            )));
        }
    }
    let mut modes = state.modes().clone();
    for m in t.in_modes() {
        modes.remove(m);
    }
    modes.extend(t.out_modes().iter().cloned());
    Ok(modes)
}
