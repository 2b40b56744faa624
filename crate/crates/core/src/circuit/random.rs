//! Seeded random circuits for cross-checking the engines.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dsl::{format_complex, format_number};
use crate::fock::Amplitude;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomCircuitConfig {
    /// Upper bound on the number of elements (at least one is drawn).
    pub max_elements: usize,
    /// Upper bound on the total number of source photons.
    pub max_photons: u32,
    /// Number of declared ports.
    pub ports: usize,
}

impl Default for RandomCircuitConfig {
    fn default() -> Self {
        RandomCircuitConfig {
            max_elements: 4,
            max_photons: 4,
            ports: 8,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Flow {
    Fresh,
    Live,
    Consumed,
}

fn angle<R: Rng>(rng: &mut R) -> String {
    // quarter-degree grid keeps the text short; arbitrary values also work
    format_number(f64::from(rng.gen_range(-720i32..=720)) * 0.25)
}

fn source<R: Rng>(rng: &mut R, budget: u32) -> (String, u32) {
    let n = rng.gen_range(1..=budget);
    match rng.gen_range(0..4) {
        0 => {
            let pol = if rng.gen_bool(0.5) { "x" } else { "y" };
            (format!("fock {n} pol {pol}"), n)
        }
        1 => (format!("linpol angle={} n={n}", angle(rng)), n),
        2 => {
            let h = if rng.gen_bool(0.5) { "rcp" } else { "lcp" };
            (format!("circpol {h} n={n}"), n)
        }
        _ if budget >= 2 => ("rcp_lcp_pair".to_string(), 2),
        _ => (format!("fock {n}"), n),
    }
}

/// Beam-splitter coefficients `ρ = cos a·e^{iφ}`, `τ = ±i sin a·e^{iφ}`.
fn rbs_params<R: Rng>(rng: &mut R) -> String {
    if rng.gen_bool(0.3) {
        return "split=50".to_string();
    }
    let a = rng.gen_range(0.0..FRAC_PI_2);
    let phi = rng.gen_range(-PI..PI);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let rho = Amplitude::from_polar(a.cos(), phi);
    let tau = Amplitude::from_polar(a.sin(), phi + sign * FRAC_PI_2);
    format!("r={} t={}", format_complex(rho), format_complex(tau))
}

/// One random, valid circuit in `.fpc` text.
pub fn random_circuit_text<R: Rng>(rng: &mut R, cfg: &RandomCircuitConfig) -> String {
    let ports: Vec<String> = (0..cfg.ports.max(3)).map(|i| format!("p{i}")).collect();
    let mut flow = vec![Flow::Fresh; ports.len()];
    let mut out: Vec<String> = ports.iter().map(|p| format!("port {p}")).collect();

    let mut budget = cfg.max_photons.max(1);
    let (text, n) = source(rng, budget);
    out.push(format!("source p0 {text}"));
    flow[0] = Flow::Live;
    budget -= n;
    if budget > 0 && rng.gen_bool(0.6) {
        let (text, _) = source(rng, budget);
        out.push(format!("source p1 {text}"));
        flow[1] = Flow::Live;
    }

    let count = rng.gen_range(1..=cfg.max_elements.max(1));
    for _ in 0..count {
        let live: Vec<usize> = (0..ports.len()).filter(|&i| flow[i] == Flow::Live).collect();
        let fresh: Vec<usize> = (0..ports.len()).filter(|&i| flow[i] == Flow::Fresh).collect();
        let usable: Vec<usize> = live.iter().chain(fresh.iter()).copied().collect();
        let pick = *live.choose(rng).unwrap_or(&usable[0]);
        match rng.gen_range(0..5) {
            0 if usable.len() >= 2 => {
                let mut ins = vec![pick];
                let others: Vec<usize> = usable.iter().copied().filter(|&i| i != pick).collect();
                ins.push(*others.choose(rng).expect("two usable ports"));
                ins.shuffle(rng);
                let spare: Vec<usize> = fresh.iter().copied().filter(|i| !ins.contains(i)).collect();
                let outs = if spare.len() >= 2 && rng.gen_bool(0.5) {
                    spare.choose_multiple(rng, 2).copied().collect()
                } else {
                    let mut o = ins.clone();
                    o.shuffle(rng);
                    o
                };
                for &i in &ins {
                    flow[i] = Flow::Consumed;
                }
                for &i in &outs {
                    flow[i] = Flow::Live;
                }
                out.push(format!(
                    "rbs {} {} {} -> {} {}",
                    rbs_params(rng),
                    ports[ins[0]],
                    ports[ins[1]],
                    ports[outs[0]],
                    ports[outs[1]]
                ));
            }
            1 if fresh.iter().filter(|&&i| i != pick).count() >= 2 => {
                let spare: Vec<usize> = fresh.iter().copied().filter(|&i| i != pick).collect();
                let outs: Vec<usize> = spare.choose_multiple(rng, 2).copied().collect();
                flow[pick] = Flow::Consumed;
                for &i in &outs {
                    flow[i] = Flow::Live;
                }
                out.push(format!(
                    "pbs axis={} {} -> {} {}",
                    angle(rng),
                    ports[pick],
                    ports[outs[0]],
                    ports[outs[1]]
                ));
            }
            2 => {
                flow[pick] = Flow::Live;
                out.push(format!("rotpol angle={} on {}", angle(rng), ports[pick]));
            }
            3 => {
                flow[pick] = Flow::Live;
                out.push(format!("phase deg={} on {}", angle(rng), ports[pick]));
            }
            _ => {
                flow[pick] = Flow::Live;
                out.push(format!(
                    "waveplate phase={} axis={} on {}",
                    angle(rng),
                    angle(rng),
                    ports[pick]
                ));
            }
        }
    }
    let mut text = out.join("\n");
    text.push('\n');
    text
}

/// `count` circuits from a ChaCha8 stream seeded with `seed`.
pub fn random_circuits(seed: u64, count: usize, cfg: &RandomCircuitConfig) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_circuit_text(&mut rng, cfg)).collect()
}
