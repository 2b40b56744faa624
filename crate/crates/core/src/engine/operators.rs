//! Creation-operator engine.
//!
//! A fixed-number state `Σ_m c_m |m⟩` is the polynomial
//! `Σ_m (c_m / √∏ m_i!) ∏ (a_i†)^{m_i}` acting on the vacuum. An element
//! replaces each input creation operator by `Σ_j M[j, in] a_j†`; expanding
//! the product and multiplying each monomial by `√∏ m_j!` gives the output
//! amplitudes.

use std::collections::{BTreeMap, BTreeSet};

use super::{prepare, Engine, EngineError};
use crate::combinatorics::SqrtFactorials;
use crate::elements::ModeTransform;
use crate::fock::{Amplitude, FockBasisState, ModeId, PhotonState, StateError, DEFAULT_MAX_PHOTONS};

/// Sparse polynomial in commuting creation operators. Keys are exponent
/// vectors stored as occupation maps.
#[derive(Clone, Debug, PartialEq)]
pub struct CreationPolynomial {
    modes: BTreeSet<ModeId>,
    terms: BTreeMap<FockBasisState, Amplitude>,
}

/// A polynomial applied to the vacuum, before and after normalization.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub state: PhotonState,
    /// Squared norm before normalization.
    pub raw_norm_sqr: f64,
}

impl Expansion {
    /// True when the raw norm shows the polynomial was not normalized.
    pub fn flagged(&self) -> bool {
        (self.raw_norm_sqr - 1.0).abs() > 1e-9
    }
}

impl CreationPolynomial {
    pub fn from_terms<M, T>(modes: M, terms: T) -> Self
    where
        M: IntoIterator<Item = ModeId>,
        T: IntoIterator<Item = (FockBasisState, Amplitude)>,
    {
        let mut modes: BTreeSet<ModeId> = modes.into_iter().collect();
        let mut map: BTreeMap<FockBasisState, Amplitude> = BTreeMap::new();
        for (mono, coeff) in terms {
            modes.extend(mono.iter().map(|(m, _)| m.clone()));
            *map.entry(mono).or_default() += coeff;
        }
        CreationPolynomial { modes, terms: map }
    }

    pub fn coefficient(&self, exponents: &FockBasisState) -> Amplitude {
        self.terms.get(exponents).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockBasisState, Amplitude)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn modes(&self) -> &BTreeSet<ModeId> {
        &self.modes
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total()).max().unwrap_or(0)
    }

    pub fn max_abs_difference(&self, other: &CreationPolynomial) -> f64 {
        let keys: BTreeSet<&FockBasisState> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the polynomial to the vacuum without normalizing.
    pub fn to_raw_state(&self) -> PhotonState {
        let table = SqrtFactorials::new(self.degree());
        let terms = self.terms.iter().map(|(mono, coeff)| {
            let enhancement: f64 = mono.iter().map(|(_, n)| table.get(n)).product();
            (mono.clone(), coeff * enhancement)
        });
        PhotonState::from_terms(self.modes.iter().cloned(), terms)
    }
}

/// Rewrites a state as the creation polynomial that produces it from vacuum.
pub fn state_to_polynomial(state: &PhotonState) -> CreationPolynomial {
    let table = SqrtFactorials::new(state.max_total_photons());
    let terms = state.terms().map(|(basis, amp)| {
        let norm: f64 = basis.iter().map(|(_, n)| table.get(n)).product();
        (basis.clone(), amp / norm)
    });
    CreationPolynomial::from_terms(state.modes().iter().cloned(), terms)
}

/// Expands `p` applied to the vacuum and normalizes the result.
pub fn polynomial_to_state(p: &CreationPolynomial) -> Result<Expansion, StateError> {
    let raw = p.to_raw_state();
    let raw_norm_sqr = raw.norm_sqr();
    Ok(Expansion {
        state: raw.normalize()?,
        raw_norm_sqr,
    })
}

/// Substitutes each input creation operator of `t` by its linear combination
/// of output creation operators and collects like terms.
pub fn substitute_modes(p: &CreationPolynomial, t: &ModeTransform) -> Result<CreationPolynomial, EngineError> {
    for m in t.in_modes() {
        if !p.modes.contains(m) {
            return Err(EngineError::ModeMismatch(format!(
                "input mode {m} is not part of the polynomial"
            )));
        }
    }
    let ins = t.in_modes();
    let outs = t.out_modes();
    let dim = ins.len();
    let mut collected: BTreeMap<FockBasisState, Amplitude> = BTreeMap::new();
    for (mono, coeff) in &p.terms {
        let mut rest = mono.clone();
        let exps: Vec<u32> = ins.iter().map(|m| rest.take(m)).collect();
        // dense polynomial over the output operators, indexed by the exponent
        // of the first output; the second exponent is (degree − index)
        let mut dense = vec![*coeff];
        let mut degree = 0usize;
        for (i, &e) in exps.iter().enumerate() {
            let first = t.matrix().get(0, i);
            let second = if dim == 2 {
                t.matrix().get(1, i)
            } else {
                Amplitude::default()
            };
            for _ in 0..e {
                let mut next = vec![Amplitude::default(); degree + 2];
                for (k, c) in dense.iter().enumerate() {
                    next[k + 1] += c * first;
                    next[k] += c * second;
                }
                dense = next;
                degree += 1;
            }
        }
        for (k, c) in dense.into_iter().enumerate() {
            if c == Amplitude::default() {
                continue;
            }
            if dim == 1 && k != degree {
                continue;
            }
            let mut out = rest.clone();
            out.set(outs[0].clone(), out.count(&outs[0]) + k as u32);
            if dim == 2 {
                out.set(outs[1].clone(), out.count(&outs[1]) + (degree - k) as u32);
            }
            *collected.entry(out).or_default() += c;
        }
    }
    let mut modes = p.modes.clone();
    for m in ins {
        modes.remove(m);
    }
    modes.extend(outs.iter().cloned());
    Ok(CreationPolynomial {
        modes,
        terms: collected,
    })
}

/// Evolves states by creation-operator substitution.
#[derive(Clone, Debug)]
pub struct OperatorEngine {
    max_photons: u32,
}

impl Default for OperatorEngine {
    fn default() -> Self {
        OperatorEngine::new(DEFAULT_MAX_PHOTONS)
    }
}

impl OperatorEngine {
    pub fn new(max_photons: u32) -> Self {
        OperatorEngine { max_photons }
    }
}

impl Engine for OperatorEngine {
    fn name(&self) -> &'static str {
        "operators"
    }

    fn apply(&self, state: &PhotonState, t: &ModeTransform) -> Result<PhotonState, EngineError> {
        let modes = prepare(state, t, self.max_photons)?;
        let poly = substitute_modes(&state_to_polynomial(state), t)?;
        let mut out = polynomial_to_state(&poly)?.state;
        out.set_modes(modes);
        Ok(out)
    }
}
