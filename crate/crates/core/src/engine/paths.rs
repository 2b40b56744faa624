//! Path-sum engine.
//!
//! Photons entering a two-mode element are routed independently; every
//! routing contributes the product of its single-photon amplitudes. Routings
//! that end in the same output occupancy are indistinguishable, so their
//! amplitudes add. Breaking up an `n`-photon input divides by `√n!` and
//! building an `m`-photon output multiplies by `√m!`:
//!
//! ```text
//! amp(m_a, m_b) = √(m_a! m_b! / (n1! n2!))
//!     · Σ_k C(n1, k) C(n2, m_a − k) · M[a,1]^k M[b,1]^(n1−k) M[a,2]^(m_a−k) M[b,2]^(n2−m_a+k)
//! ```
//!
//! where `k` photons of input 1 go to output `a`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{prepare, Engine, EngineError};
use crate::combinatorics::{binomial, binomial_f64, SqrtFactorials};
use crate::elements::{ElementError, Matrix, ModeTransform, UNITARY_TOLERANCE};
use crate::fock::{Amplitude, FockBasisState, PhotonState, DEFAULT_MAX_PHOTONS, PRUNE_THRESHOLD};

/// One photon routing through a two-mode element.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTrace {
    /// `assignment[i][j]`: photons from input `i` routed to output `j`.
    pub assignment: [[u32; 2]; 2],
    pub amplitude: Amplitude,
    /// Number of photon permutations realizing this routing.
    pub multiplicity: u64,
    /// `√(∏ m_out!) / √(∏ n_in!)`.
    pub bose_factor: f64,
}

impl RoutingTrace {
    pub fn output(&self) -> (u32, u32) {
        let a = self.assignment;
        (a[0][0] + a[1][0], a[0][1] + a[1][1])
    }

    /// The routing's share of the output amplitude.
    pub fn contribution(&self) -> Amplitude {
        self.amplitude * self.multiplicity as f64 * self.bose_factor
    }
}

#[derive(Serialize)]
struct WireTrace {
    assignment: [[u32; 2]; 2],
    output: [u32; 2],
    re: f64,
    im: f64,
    multiplicity: u64,
    bose_factor: f64,
}

impl Serialize for RoutingTrace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (a, b) = self.output();
        WireTrace {
            assignment: self.assignment,
            output: [a, b],
            re: self.amplitude.re,
            im: self.amplitude.im,
            multiplicity: self.multiplicity,
            bose_factor: self.bose_factor,
        }
        .serialize(serializer)
    }
}

fn check_unitary(m: &[[Amplitude; 2]; 2]) -> Result<(), ElementError> {
    let mat = Matrix::from_rows(&[&m[0], &m[1]]);
    let dev = mat.unitarity_deviation();
    if !dev.is_finite() || dev > UNITARY_TOLERANCE {
        return Err(ElementError::NotUnitary(dev));
    }
    Ok(())
}

fn powers(z: Amplitude, n: u32) -> Vec<Amplitude> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = Amplitude::new(1.0, 0.0);
    out.push(acc);
    for _ in 0..n {
        acc *= z;
        out.push(acc);
    }
    out
}

/// Routing counts `k` (input 1 → output a) compatible with `m_a` photons in a.
fn routing_range(n1: u32, n2: u32, m_a: u32) -> std::ops::RangeInclusive<u32> {
    m_a.saturating_sub(n2)..=n1.min(m_a)
}

/// Output amplitudes indexed by `m_a = 0..=n1+n2`. Assumes `m` is unitary.
pub(crate) fn scatter_amplitudes(
    n1: u32,
    n2: u32,
    m: &[[Amplitude; 2]; 2],
    sqrt_fact: &SqrtFactorials,
) -> Vec<Amplitude> {
    let n = n1 + n2;
    let a1 = powers(m[0][0], n1);
    let b1 = powers(m[1][0], n1);
    let a2 = powers(m[0][1], n2);
    let b2 = powers(m[1][1], n2);
    let norm_in = sqrt_fact.get(n1) * sqrt_fact.get(n2);
    (0..=n)
        .map(|m_a| {
            let sum: Amplitude = routing_range(n1, n2, m_a)
                .map(|k| {
                    let j = m_a - k;
                    let mult = binomial_f64(n1, k) * binomial_f64(n2, j);
                    a1[k as usize] * b1[(n1 - k) as usize] * a2[j as usize] * b2[(n2 - j) as usize] * mult
                })
                .sum();
            sum * (sqrt_fact.get(m_a) * sqrt_fact.get(n - m_a) / norm_in)
        })
        .collect()
}

/// Output amplitudes of `|n1⟩|n2⟩` through a two-mode unitary `m`
/// (`m[out][in]`), keyed by `(m_a, m_b)`.
pub fn scatter_two_mode(
    n1: u32,
    n2: u32,
    m: &[[Amplitude; 2]; 2],
) -> Result<BTreeMap<(u32, u32), Amplitude>, ElementError> {
    check_unitary(m)?;
    let n = n1 + n2;
    let table = SqrtFactorials::new(n);
    Ok(scatter_amplitudes(n1, n2, m, &table)
        .into_iter()
        .enumerate()
        .map(|(m_a, amp)| ((m_a as u32, n - m_a as u32), amp))
        .collect())
}

/// Every routing of `|n1⟩|n2⟩` through `m` with a nonzero amplitude.
pub fn trace_paths(n1: u32, n2: u32, m: &[[Amplitude; 2]; 2]) -> Result<Vec<RoutingTrace>, ElementError> {
    check_unitary(m)?;
    let n = n1 + n2;
    let table = SqrtFactorials::new(n);
    let norm_in = table.get(n1) * table.get(n2);
    let mut traces = Vec::new();
    for m_a in (0..=n).rev() {
        let bose_factor = table.get(m_a) * table.get(n - m_a) / norm_in;
        for k in routing_range(n1, n2, m_a).rev() {
            let j = m_a - k;
            let amplitude = m[0][0].powu(k) * m[1][0].powu(n1 - k) * m[0][1].powu(j) * m[1][1].powu(n2 - j);
            if amplitude.norm() < PRUNE_THRESHOLD {
                continue;
            }
            let multiplicity = binomial(n1, k)
                .and_then(|a| binomial(n2, j).and_then(|b| a.checked_mul(b)))
                .and_then(|v| u64::try_from(v).ok())
                .expect("routing multiplicity overflows u64");
            traces.push(RoutingTrace {
                assignment: [[k, n1 - k], [j, n2 - j]],
                amplitude,
                multiplicity,
                bose_factor,
            });
        }
    }
    Ok(traces)
}

/// Evolves states by summing routing amplitudes term by term.
#[derive(Clone, Debug)]
pub struct PathEngine {
    max_photons: u32,
}

impl Default for PathEngine {
    fn default() -> Self {
        PathEngine::new(DEFAULT_MAX_PHOTONS)
    }
}

impl PathEngine {
    pub fn new(max_photons: u32) -> Self {
        PathEngine { max_photons }
    }
}

impl Engine for PathEngine {
    fn name(&self) -> &'static str {
        "paths"
    }

    fn apply(&self, state: &PhotonState, t: &ModeTransform) -> Result<PhotonState, EngineError> {
        let modes = prepare(state, t, self.max_photons)?;
        let table = SqrtFactorials::new(state.max_total_photons());
        let ins = t.in_modes();
        let outs = t.out_modes();
        let mut acc: Vec<(FockBasisState, Amplitude)> = Vec::new();
        for (basis, amp) in state.terms() {
            let mut rest = basis.clone();
            let counts: Vec<u32> = ins.iter().map(|m| rest.take(m)).collect();
            match t.matrix().as_2x2() {
                None => {
                    let n = counts[0];
                    let mut out = rest;
                    out.set(outs[0].clone(), n);
                    acc.push((out, amp * t.matrix().get(0, 0).powu(n)));
                }
                Some(m) => {
                    let (n1, n2) = (counts[0], counts[1]);
                    for (m_a, a) in scatter_amplitudes(n1, n2, &m, &table).into_iter().enumerate() {
                        let mut out = rest.clone();
                        out.set(outs[0].clone(), m_a as u32);
                        out.set(outs[1].clone(), n1 + n2 - m_a as u32);
                        acc.push((out, amp * a));
                    }
                }
            }
        }
        Ok(PhotonState::from_terms(modes, acc).normalize()?)
    }
}
