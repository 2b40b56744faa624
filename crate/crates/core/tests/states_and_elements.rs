mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use common::{c, mode, occ, random_rbs, state};
use fockpath::elements::{thin_sheet_coefficients, validate_rbs_coefficients};
use fockpath::{
    Basis, ElementError, Engine, FockBasisState, ModeId, ModeTransform, PathEngine, PhotonState, Pol, StateError,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn amp() -> impl Strategy<Value = fockpath::Amplitude> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

/// Random state on the modes of ports `a` and `b`, up to three photons per mode.
fn any_state() -> impl Strategy<Value = PhotonState> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), amp()), 1..6).prop_map(|terms| {
        PhotonState::from_terms(
            [mode("a.x"), mode("a.y"), mode("b.x")],
            terms
                .into_iter()
                .map(|((p, q, r), a)| (occ(&[("a.x", p), ("a.y", q), ("b.x", r)]), a)),
        )
    })
}

#[test]
fn mode_labels_round_trip() {
    for label in ["a.x", "a.x'", "port_1.y", "p.y'"] {
        assert_eq!(mode(label).to_string(), label);
    }
    assert!(matches!("a.z".parse::<ModeId>(), Err(StateError::BadModeLabel(_))));
    assert!(matches!("nodot".parse::<ModeId>(), Err(StateError::BadModeLabel(_))));
    assert_eq!(Basis::Lab.axes(), [Pol::X, Pol::Y]);
    assert_eq!(Basis::Rotated.toggled(), Basis::Lab);
}

#[test]
fn normalize_examples() {
    let s = state(&[(&[("a.x", 2)], c(1.0, 0.0)), (&[("a.y", 2)], c(1.0, 0.0))]);
    let n = s.normalize().unwrap();
    assert!((n.amplitude(&occ(&[("a.x", 2)])) - FRAC_1_SQRT_2).norm() < 1e-15);
    assert!(matches!(
        PhotonState::from_terms([], Vec::new()).normalize(),
        Err(StateError::NullState)
    ));
    let bad = state(&[(&[("a.x", 1)], c(f64::NAN, 0.0))]);
    assert!(matches!(bad.normalize(), Err(StateError::NonFinite)));
}

#[test]
fn distributions_and_expectation() {
    // one RCP and one LCP photon: both x or both y
    let s = state(&[
        (&[("a.x", 2)], c(FRAC_1_SQRT_2, 0.0)),
        (&[("a.y", 2)], c(FRAC_1_SQRT_2, 0.0)),
    ]);
    let d = s.number_distribution(&["a"]).unwrap();
    assert_eq!(d.len(), 1);
    assert!((d[&vec![2]] - 1.0).abs() < 1e-15);
    assert!((s.expected_photon_number("a").unwrap() - 2.0).abs() < 1e-15);
    assert!(matches!(
        s.number_distribution(&["zz"]),
        Err(StateError::UnknownPort(_))
    ));
}

#[test]
fn vacuum_is_vacuum() {
    let v = PhotonState::vacuum([mode("a.x"), mode("a.y")]);
    assert_eq!(v.len(), 1);
    assert_eq!(v.amplitude(&FockBasisState::vacuum()), c(1.0, 0.0));
    assert_eq!(v.expected_photon_number("a").unwrap(), 0.0);
}

#[test]
fn product_rejects_shared_modes() {
    let a = state(&[(&[("a.x", 1)], c(1.0, 0.0))]);
    assert!(matches!(a.product(&a), Err(StateError::OverlappingModes(_))));
}

proptest! {
    #[test]
    fn normalized_states_have_unit_norm(s in any_state()) {
        prop_assume!(s.norm_sqr() > 1e-6);
        let n = s.normalize().unwrap();
        prop_assert!((n.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(n.normalize().unwrap().max_abs_difference(&n) < 1e-15);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(a in any_state(), b in any_state()) {
        let ab = a.inner_product(&b);
        let ba = b.inner_product(&a);
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
        prop_assert!((a.inner_product(&a).re - a.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn distributions_sum_to_one(s in any_state()) {
        prop_assume!(s.norm_sqr() > 1e-6);
        let n = s.normalize().unwrap();
        let total: f64 = n.number_distribution(&["a", "b"]).unwrap().values().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let d = n.number_distribution(&["a"]).unwrap();
        let mean: f64 = d.iter().map(|(k, p)| f64::from(k[0]) * p).sum();
        prop_assert!((mean - n.expected_photon_number("a").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip(s in any_state()) {
        let text = serde_json::to_string(&s).unwrap();
        let wire: Vec<fockpath::fock::WireTerm> = serde_json::from_str(&text).unwrap();
        let back = PhotonState::from_wire(&wire).unwrap();
        prop_assert!(back.max_abs_difference(&s) == 0.0);
    }

    #[test]
    fn elements_are_unitary(seed in any::<u64>(), angle in -PI..PI, phase in -PI..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r, t) = random_rbs(&mut rng);
        let lab = ModeId::pair("a", Basis::Lab);
        let all = [
            ModeTransform::rbs([mode("a.x"), mode("b.x")], [mode("c.x"), mode("d.x")], r, t).unwrap(),
            ModeTransform::pbs(lab.clone(), "t", "r", angle).unwrap(),
            ModeTransform::waveplate(lab.clone(), phase, angle).unwrap(),
            ModeTransform::waveplate_in_axes(lab.clone(), phase, angle).unwrap(),
            ModeTransform::polarization_rotation(lab, angle).unwrap(),
            ModeTransform::phase_shifter(mode("a.x"), phase),
        ];
        for el in &all {
            prop_assert!(el.matrix().unitarity_deviation() < 1e-12);
            let back = el.matrix().mul(el.inverse().matrix());
            prop_assert!(back.max_abs_difference(&fockpath::Matrix::identity(el.matrix().dim())) < 1e-12);
        }
    }

    #[test]
    fn plate_in_own_axes_is_plate_then_frame_rotation(angle in -PI..PI, phase in -PI..PI) {
        let lab = ModeId::pair("a", Basis::Lab);
        let plate = ModeTransform::waveplate(lab.clone(), phase, angle).unwrap();
        let frame = ModeTransform::polarization_rotation(lab.clone(), angle).unwrap();
        let direct = ModeTransform::waveplate_in_axes(lab, phase, angle).unwrap();
        let composed = frame.matrix().mul(plate.matrix());
        prop_assert!(composed.max_abs_difference(direct.matrix()) < 1e-12);
        prop_assert_eq!(direct.out_modes(), frame.out_modes());
    }

    #[test]
    fn thin_sheets_are_valid_splitters(phi in -1.5f64..1.5) {
        let (r, t) = thin_sheet_coefficients(phi).unwrap();
        prop_assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((r * t.conj()).re.abs() < 1e-12);
        prop_assert!(((t - r) - 1.0).norm() < 1e-12);
        prop_assert!(validate_rbs_coefficients(r, t).is_ok());
    }
}

#[test]
fn splitter_validation_errors() {
    assert!(matches!(
        validate_rbs_coefficients(c(0.6, 0.0), c(0.8, 0.0)),
        Err(ElementError::PhaseRelation(_))
    ));
    assert!(matches!(
        validate_rbs_coefficients(c(0.7, 0.0), c(0.0, 0.8)),
        Err(ElementError::EnergyConservation(_))
    ));
    assert!(matches!(
        thin_sheet_coefficients(FRAC_PI_2),
        Err(ElementError::SheetPhaseOutOfRange(_))
    ));
    let lab = ModeId::pair("a", Basis::Lab);
    assert!(matches!(
        ModeTransform::pbs(lab.clone(), "t", "t", 0.0),
        Err(ElementError::Layout(_))
    ));
    assert!(matches!(
        ModeTransform::pbs(lab, "a", "r", 0.0),
        Err(ElementError::Layout(_))
    ));
}

#[test]
fn thin_sheet_examples() {
    let (r, t) = thin_sheet_coefficients(0.0).unwrap();
    assert!(r.norm() < 1e-15 && (t - 1.0).norm() < 1e-15);
    let (r, t) = thin_sheet_coefficients(-FRAC_PI_4).unwrap();
    assert!((r - c(-0.5, -0.5)).norm() < 1e-15);
    assert!((t - c(0.5, -0.5)).norm() < 1e-15);
}

#[test]
fn aligned_pbs_routes_x_to_transmitted() {
    let lab = ModeId::pair("a", Basis::Lab);
    let pbs = ModeTransform::pbs(lab, "t", "r", 0.0).unwrap();
    let m = pbs.matrix();
    assert_eq!(pbs.out_modes(), &[mode("r.y'"), mode("t.x'")]);
    assert!((m.get(1, 0) - 1.0).norm() < 1e-15 && (m.get(0, 1) - 1.0).norm() < 1e-15);
    assert!(m.get(0, 0).norm() < 1e-15 && m.get(1, 1).norm() < 1e-15);
}

#[test]
fn phase_shifter_multiplies_by_n_phase() {
    let e = PathEngine::default();
    let two = state(&[(&[("a.x", 2)], c(1.0, 0.0))]);
    for (phase, expect) in [(PI, c(1.0, 0.0)), (FRAC_PI_2, c(-1.0, 0.0)), (0.0, c(1.0, 0.0))] {
        let out = e
            .apply(&two, &ModeTransform::phase_shifter(mode("a.x"), phase))
            .unwrap();
        assert!((out.amplitude(&occ(&[("a.x", 2)])) - expect).norm() < 1e-15);
    }
}

#[test]
fn aligned_half_wave_plate_leaves_rcp_lcp_pair_alone() {
    let pair = state(&[
        (&[("a.x", 2)], c(FRAC_1_SQRT_2, 0.0)),
        (&[("a.y", 2)], c(FRAC_1_SQRT_2, 0.0)),
    ]);
    let hwp = ModeTransform::waveplate(ModeId::pair("a", Basis::Lab), PI, 0.0).unwrap();
    let out = PathEngine::default().apply(&pair, &hwp).unwrap();
    assert!(out.max_abs_difference(&pair) < 1e-15);
}
