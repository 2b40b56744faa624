//! Independent oracles and helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fockpath::{Amplitude, FockBasisState, ModeId, PhotonState};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

pub fn mode(label: &str) -> ModeId {
    label.parse().expect("valid mode label")
}

/// Occupancy from `("port.pol", n)` pairs.
pub fn occ(counts: &[(&str, u32)]) -> FockBasisState {
    FockBasisState::from_counts(counts.iter().map(|(m, n)| (mode(m), *n)))
}

/// State from `(occupancy, amplitude)` terms, not normalized.
pub fn state(terms: &[(&[(&str, u32)], Amplitude)]) -> PhotonState {
    PhotonState::from_terms([], terms.iter().map(|(o, a)| (occ(o), *a)))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Labeled-photon oracle for `|n1⟩|n2⟩` through a 2×2 matrix `m[out][in]`.
///
/// Every photon is routed independently; all `2^(n1+n2)` assignments are
/// enumerated and summed per output occupancy, then divided by `√(n1! n2!)`
/// and multiplied by `√(m_a! m_b!)`.
pub fn brute_force_two_mode(n1: u32, n2: u32, m: &[[Amplitude; 2]; 2]) -> BTreeMap<(u32, u32), Amplitude> {
    let inputs: Vec<usize> = std::iter::repeat_n(0, n1 as usize)
        .chain(std::iter::repeat_n(1, n2 as usize))
        .collect();
    let n = inputs.len();
    let mut sums: BTreeMap<(u32, u32), Amplitude> = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        let mut amp = c(1.0, 0.0);
        let mut to_a = 0;
        for (photon, &input) in inputs.iter().enumerate() {
            let out = ((mask >> photon) & 1) as usize;
            if out == 0 {
                to_a += 1;
            }
            amp *= m[out][input];
        }
        *sums.entry((to_a, n as u32 - to_a)).or_default() += amp;
    }
    let norm_in = (factorial(n1) * factorial(n2)).sqrt();
    sums.into_iter()
        .map(|((a, b), s)| ((a, b), s * (factorial(a) * factorial(b)).sqrt() / norm_in))
        .collect()
}

/// Haar-free but fully general U(2) element.
pub fn random_unitary<R: Rng>(rng: &mut R) -> [[Amplitude; 2]; 2] {
    use std::f64::consts::PI;
    let theta = rng.gen_range(0.0..PI / 2.0);
    let (alpha, psi, chi) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    let g = Amplitude::from_polar(1.0, alpha);
    [
        [
            g * Amplitude::from_polar(theta.cos(), psi),
            g * Amplitude::from_polar(theta.sin(), chi),
        ],
        [
            -g * Amplitude::from_polar(theta.sin(), -chi),
            g * Amplitude::from_polar(theta.cos(), -psi),
        ],
    ]
}

/// Valid beam-splitter coefficients `(ρ, τ)` with `arg τ − arg ρ = ±π/2`.
pub fn random_rbs<R: Rng>(rng: &mut R) -> (Amplitude, Amplitude) {
    use std::f64::consts::{FRAC_PI_2, PI};
    let a = rng.gen_range(0.0..FRAC_PI_2);
    let phi = rng.gen_range(-PI..PI);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (
        Amplitude::from_polar(a.cos(), phi),
        Amplitude::from_polar(a.sin(), phi + sign * FRAC_PI_2),
    )
}

/// Max amplitude difference between two states after removing a global
/// phase from `b` (aligned on the largest amplitude of `a`).
pub fn diff_up_to_phase(a: &PhotonState, b: &PhotonState) -> f64 {
    let (key, amp) = a
        .terms()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(k, v)| (k.clone(), v))
        .expect("non-empty state");
    let other = b.amplitude(&key);
    if other.norm() == 0.0 {
        return f64::INFINITY;
    }
    let phase = amp / other * (other.norm() / amp.norm());
    a.max_abs_difference(&b.scaled(phase))
}
