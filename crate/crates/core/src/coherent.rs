//! Coherent (Glauber) states.
//!
//! `|γ⟩ = e^{−|γ|²/2} Σ_n γⁿ/√n! |n⟩`, truncated at `n = N`. The photon
//! number is Poisson distributed with mean `|γ|²`, so the probability lost to
//! truncation is the Poisson upper tail beyond `N`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::elements::{validate_rbs_coefficients, ElementError};
use crate::fock::{Amplitude, FockBasisState, ModeId, PhotonState, StateError};

/// Largest neglected probability a truncation may leave behind.
pub const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("truncation at {truncation} photons leaves tail probability {tail:e} (limit {TAIL_TOLERANCE:e})")]
    TruncationTooSmall { truncation: u32, tail: f64 },
    #[error("coherent amplitude {0} needs more than the {1}-photon budget")]
    BudgetTooSmall(Amplitude, u32),
    #[error("both coherent amplitudes are zero")]
    BothZero,
    #[error("non-finite coherent amplitude")]
    NonFinite,
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// `P(X > n)` for `X ~ Poisson(mean)`, summed directly over the tail.
pub fn poisson_tail(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut k = n + 1;
    let ln_first: f64 = -mean + f64::from(k) * ln_mean - crate::combinatorics::ln_factorial(k);
    let mut term = ln_first.exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        k += 1;
        term *= mean / f64::from(k);
        if f64::from(k) > mean && (term <= sum * 1e-17 || term == 0.0) {
            break;
        }
        if k > 100_000 {
            break;
        }
    }
    sum
}

/// A coherent amplitude with its number-state truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParams {
    gamma: Amplitude,
    truncation: u32,
}

impl CoherentParams {
    /// Rejects truncations whose neglected tail exceeds [`TAIL_TOLERANCE`].
    pub fn new(gamma: Amplitude, truncation: u32) -> Result<Self, CoherentError> {
        if !(gamma.re.is_finite() && gamma.im.is_finite()) {
            return Err(CoherentError::NonFinite);
        }
        let tail = poisson_tail(gamma.norm_sqr(), truncation);
        if tail >= TAIL_TOLERANCE {
            return Err(CoherentError::TruncationTooSmall { truncation, tail });
        }
        Ok(CoherentParams { gamma, truncation })
    }

    /// Smallest truncation meeting the tail tolerance, at most `cap`.
    pub fn with_default_truncation(gamma: Amplitude, cap: u32) -> Result<Self, CoherentError> {
        if !(gamma.re.is_finite() && gamma.im.is_finite()) {
            return Err(CoherentError::NonFinite);
        }
        let mean = gamma.norm_sqr();
        (0..=cap)
            .find(|&n| poisson_tail(mean, n) < TAIL_TOLERANCE)
            .map(|truncation| CoherentParams { gamma, truncation })
            .ok_or(CoherentError::BudgetTooSmall(gamma, cap))
    }

    pub fn gamma(&self) -> Amplitude {
        self.gamma
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn neglected_tail(&self) -> f64 {
        poisson_tail(self.gamma.norm_sqr(), self.truncation)
    }
}

/// `c_n = e^{−|γ|²/2} γⁿ/√n!` for `n = 0..=N`.
pub fn coherent_fock_coefficients(p: &CoherentParams) -> Vec<Amplitude> {
    let mut out = Vec::with_capacity(p.truncation as usize + 1);
    let mut c = Amplitude::new((-0.5 * p.gamma.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=p.truncation {
        c = c * p.gamma / f64::from(n).sqrt();
        out.push(c);
    }
    out
}

/// Truncated coherent state on one mode, with the analytic coefficients.
pub fn coherent_state(mode: ModeId, p: &CoherentParams) -> PhotonState {
    let terms = coherent_fock_coefficients(p)
        .into_iter()
        .enumerate()
        .map(|(n, c)| (FockBasisState::from_counts([(mode.clone(), n as u32)]), c));
    PhotonState::from_terms([mode.clone()], terms)
}

/// Product of truncated coherent states on distinct modes.
pub fn coherent_product(targets: &[(ModeId, CoherentParams)]) -> Result<PhotonState, CoherentError> {
    let mut state = PhotonState::vacuum([]);
    for (mode, p) in targets {
        state = state.product(&coherent_state(mode.clone(), p))?;
    }
    Ok(state)
}

/// Output amplitudes of two coherent beams meeting at a beam splitter:
/// `(ργ₁ + τγ₂, τγ₁ + ργ₂)`.
pub fn rbs_coherent_output(
    gamma1: Amplitude,
    gamma2: Amplitude,
    rho: Amplitude,
    tau: Amplitude,
) -> Result<(Amplitude, Amplitude), CoherentError> {
    validate_rbs_coefficients(rho, tau)?;
    Ok((rho * gamma1 + tau * gamma2, tau * gamma1 + rho * gamma2))
}

/// A coherent beam along a retarder's slow axis picks up `e^{iφ}`.
pub fn waveplate_coherent_output(gamma: Amplitude, phase: f64) -> Amplitude {
    gamma * Amplitude::from_polar(1.0, phase)
}

/// One coherent state in an elliptical polarization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizedCoherent {
    /// `√(|γ₁|² + |γ₂|²)·e^{i arg γ₁}`.
    pub gamma: Amplitude,
    /// `cos θ = |γ₁| / √(|γ₁|² + |γ₂|²)`.
    pub theta: f64,
    /// Phase of the y component relative to x.
    pub delta_phi: f64,
}

impl PolarizedCoherent {
    /// The x and y amplitudes `(γ cos θ, γ e^{iΔφ} sin θ)`.
    pub fn components(&self) -> (Amplitude, Amplitude) {
        (
            self.gamma * self.theta.cos(),
            self.gamma * Amplitude::from_polar(self.theta.sin(), self.delta_phi),
        )
    }
}

/// Merges x- and y-polarized coherent beams into one coherent state.
///
/// When `γ₁ = 0` the result is `θ = π/2`, `Δφ = 0` and the phase of `γ₂` is
/// carried by `γ`. When `γ₂ = 0`, `Δφ = 0`.
pub fn combine_polarized_coherent(gamma1: Amplitude, gamma2: Amplitude) -> Result<PolarizedCoherent, CoherentError> {
    let (m1, m2) = (gamma1.norm(), gamma2.norm());
    if m1 == 0.0 && m2 == 0.0 {
        return Err(CoherentError::BothZero);
    }
    let magnitude = m1.hypot(m2);
    if m1 == 0.0 {
        return Ok(PolarizedCoherent {
            gamma: Amplitude::from_polar(magnitude, gamma2.arg()),
            theta: FRAC_PI_2,
            delta_phi: 0.0,
        });
    }
    let delta_phi = if m2 == 0.0 {
        0.0
    } else {
        let d = gamma2.arg() - gamma1.arg();
        d.sin().atan2(d.cos())
    };
    Ok(PolarizedCoherent {
        gamma: Amplitude::from_polar(magnitude, gamma1.arg()),
        theta: m2.atan2(m1),
        delta_phi,
    })
}

/// `|⟨target|state⟩|²` for a product of truncated coherent states.
pub fn coherent_fidelity(state: &PhotonState, targets: &[(ModeId, CoherentParams)]) -> Result<f64, CoherentError> {
    let target = coherent_product(targets)?;
    Ok(target.inner_product(state).norm_sqr())
}
