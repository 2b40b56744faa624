//! Few-photon linear optics with two independent evolution engines.
//!
//! States of photons in (port, polarization) modes are pushed through beam
//! splitters, polarizing beam splitters, wave plates and phase shifters
//! either by summing amplitudes over photon routings ([`engine::PathEngine`])
//! or by creation-operator substitution ([`engine::OperatorEngine`]). The
//! crate also covers coherent-state propagation and the focal-plane amplitude
//! of a single photon reflected by a paraboloidal mirror.

pub mod circuit;
pub mod cli;
pub mod coherent;
pub mod combinatorics;
pub mod diffraction;
pub mod elements;
pub mod engine;
pub mod fock;

pub use elements::{ElementError, ElementKind, Matrix, ModeTransform};
pub use engine::{Engine, EngineError, EngineKind, OperatorEngine, PathEngine};
pub use fock::{Amplitude, Basis, FockBasisState, ModeId, PhotonState, Pol, StateError};
