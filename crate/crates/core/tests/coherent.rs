mod common;

use std::f64::consts::FRAC_PI_2;

use common::{c, mode, occ};
use fockpath::coherent::{
    coherent_fidelity, coherent_fock_coefficients, coherent_product, coherent_state, combine_polarized_coherent,
    poisson_tail, rbs_coherent_output, waveplate_coherent_output, CoherentError, CoherentParams, TAIL_TOLERANCE,
};
use fockpath::elements::balanced_rbs_coefficients;
use fockpath::{Engine, ModeTransform, OperatorEngine, PathEngine};
use proptest::prelude::*;
use statrs::distribution::{DiscreteCDF, Poisson};

proptest! {
    #[test]
    fn tail_matches_statrs(mean in 0.01f64..20.0, n in 0u32..60) {
        let oracle = Poisson::new(mean).unwrap().sf(u64::from(n));
        let ours = poisson_tail(mean, n);
        // statrs goes through the regularized gamma function
        prop_assert!((ours - oracle).abs() <= 1e-12 * oracle.max(1e-300) + 1e-15, "{ours} vs {oracle}");
    }

    #[test]
    fn combined_beams_reconstruct_components(re1 in -3.0f64..3.0, im1 in -3.0f64..3.0, re2 in -3.0f64..3.0, im2 in -3.0f64..3.0) {
        let (g1, g2) = (c(re1, im1), c(re2, im2));
        prop_assume!(g1.norm() + g2.norm() > 1e-9);
        let p = combine_polarized_coherent(g1, g2).unwrap();
        let (x, y) = p.components();
        prop_assert!((x - g1).norm() < 1e-12);
        prop_assert!((y - g2).norm() < 1e-12);
        prop_assert!((0.0..=FRAC_PI_2).contains(&p.theta));
    }

    #[test]
    fn splitter_output_preserves_mean_photon_number(re1 in -2.0f64..2.0, im1 in -2.0f64..2.0, re2 in -2.0f64..2.0, im2 in -2.0f64..2.0) {
        let (r, t) = balanced_rbs_coefficients();
        let (g1, g2) = (c(re1, im1), c(re2, im2));
        let (a, b) = rbs_coherent_output(g1, g2, r, t).unwrap();
        prop_assert!((a.norm_sqr() + b.norm_sqr() - g1.norm_sqr() - g2.norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn thousand_random_reconstructions() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let g1 = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let g2 = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let (x, y) = combine_polarized_coherent(g1, g2).unwrap().components();
        assert!((x - g1).norm() < 1e-12 && (y - g2).norm() < 1e-12);
    }
}

#[test]
fn degenerate_combinations() {
    let p = combine_polarized_coherent(c(0.0, 0.0), c(0.0, 2.0)).unwrap();
    assert_eq!((p.theta, p.delta_phi), (FRAC_PI_2, 0.0));
    assert!((p.gamma - c(0.0, 2.0)).norm() < 1e-15);
    let p = combine_polarized_coherent(c(1.0, 1.0), c(0.0, 0.0)).unwrap();
    assert_eq!((p.theta, p.delta_phi), (0.0, 0.0));
    assert_eq!(
        combine_polarized_coherent(c(0.0, 0.0), c(0.0, 0.0)),
        Err(CoherentError::BothZero)
    );
}

#[test]
fn truncation_checks() {
    assert!(matches!(
        CoherentParams::new(c(2.0, 0.0), 5),
        Err(CoherentError::TruncationTooSmall { .. })
    ));
    let p = CoherentParams::with_default_truncation(c(2.0, 0.0), 80).unwrap();
    assert!(p.neglected_tail() < TAIL_TOLERANCE);
    assert!(poisson_tail(4.0, p.truncation() - 1) >= TAIL_TOLERANCE);
    assert!(matches!(
        CoherentParams::with_default_truncation(c(4.0, 0.0), 8),
        Err(CoherentError::BudgetTooSmall(..))
    ));
    assert_eq!(CoherentParams::new(c(f64::NAN, 0.0), 3), Err(CoherentError::NonFinite));
}

#[test]
fn fock_coefficients_are_poisson() {
    let p = CoherentParams::new(c(0.0, 1.5), 60).unwrap();
    let coeffs = coherent_fock_coefficients(&p);
    let pois = Poisson::new(2.25).unwrap();
    use statrs::distribution::Discrete;
    for (n, a) in coeffs.iter().enumerate().take(20) {
        assert!((a.norm_sqr() - pois.pmf(n as u64)).abs() < 1e-14);
    }
    // phase winds by arg γ per photon
    assert!((coeffs[1] / coeffs[0] - c(0.0, 1.5)).norm() < 1e-14);
}

#[test]
fn beams_through_balanced_splitter_stay_coherent() {
    let (r, t) = balanced_rbs_coefficients();
    let (g1, g2) = (c(0.7, -0.2), c(-0.3, 0.5));
    let p = |g| CoherentParams::new(g, 30).unwrap();
    let input = coherent_product(&[(mode("a.x"), p(g1)), (mode("b.x"), p(g2))]).unwrap();
    let el = ModeTransform::rbs([mode("a.x"), mode("b.x")], [mode("c.x"), mode("d.x")], r, t).unwrap();
    let (o1, o2) = rbs_coherent_output(g1, g2, r, t).unwrap();
    let targets = [(mode("c.x"), p(o1)), (mode("d.x"), p(o2))];
    for out in [
        PathEngine::new(60).apply(&input, &el).unwrap(),
        OperatorEngine::new(60).apply(&input, &el).unwrap(),
    ] {
        assert!(coherent_fidelity(&out, &targets).unwrap() > 1.0 - 1e-10);
    }
}

#[test]
fn retarder_on_coherent_beam() {
    let g = c(0.8, 0.1);
    let p = CoherentParams::new(g, 30).unwrap();
    let s = coherent_state(mode("a.y"), &p);
    let out = PathEngine::new(30)
        .apply(&s, &ModeTransform::phase_shifter(mode("a.y"), 0.9))
        .unwrap();
    let target = CoherentParams::new(waveplate_coherent_output(g, 0.9), 30).unwrap();
    assert!(coherent_fidelity(&out, &[(mode("a.y"), target)]).unwrap() > 1.0 - 1e-12);
    assert!((out.amplitude(&occ(&[])) - (-0.5 * g.norm_sqr()).exp()).norm() < 1e-14);
}
