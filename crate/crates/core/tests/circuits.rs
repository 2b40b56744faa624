mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::PathBuf;

use common::{c, occ, state};
use fockpath::circuit::random::{random_circuits, RandomCircuitConfig};
use fockpath::circuit::{
    builtin, builtin_names, cross_check, make_source, parse_circuit, run_circuit, CircuitError, Handedness, SourceSpec,
};
use fockpath::{EngineKind, Pol};
use proptest::prelude::*;

fn corpus(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    fs::read_to_string(path).unwrap()
}

fn run(text: &str) -> fockpath::PhotonState {
    run_circuit(&parse_circuit(text).unwrap(), EngineKind::Both, 8)
        .unwrap()
        .state
}

#[test]
fn linpol_source_at_45_degrees() {
    let s = make_source(&SourceSpec::LinPol { angle_deg: 45.0, n: 2 }, "a", 8).unwrap();
    let expect = state(&[
        (&[("a.x", 2)], c(0.5, 0.0)),
        (&[("a.y", 2)], c(0.5, 0.0)),
        (&[("a.x", 1), ("a.y", 1)], c(FRAC_1_SQRT_2, 0.0)),
    ]);
    assert!(s.max_abs_difference(&expect) < 1e-15);
}

#[test]
fn circular_sources() {
    let rcp = make_source(
        &SourceSpec::CircPol {
            handedness: Handedness::Rcp,
            n: 1,
        },
        "a",
        8,
    )
    .unwrap();
    let expect = state(&[
        (&[("a.x", 1)], c(FRAC_1_SQRT_2, 0.0)),
        (&[("a.y", 1)], c(0.0, FRAC_1_SQRT_2)),
    ]);
    assert!(rcp.max_abs_difference(&expect) < 1e-15);
    let pair = make_source(&SourceSpec::RcpLcpPair, "a", 8).unwrap();
    let expect = state(&[
        (&[("a.x", 2)], c(FRAC_1_SQRT_2, 0.0)),
        (&[("a.y", 2)], c(FRAC_1_SQRT_2, 0.0)),
    ]);
    assert!(pair.max_abs_difference(&expect) < 1e-15);
    // two RCP photons carry the unnormalized (1, -1, 2i)/2 pattern
    let two = make_source(
        &SourceSpec::CircPol {
            handedness: Handedness::Rcp,
            n: 2,
        },
        "a",
        8,
    )
    .unwrap();
    let expect = state(&[
        (&[("a.x", 2)], c(0.5, 0.0)),
        (&[("a.y", 2)], c(-0.5, 0.0)),
        (&[("a.x", 1), ("a.y", 1)], c(0.0, FRAC_1_SQRT_2)),
    ]);
    assert!(two.max_abs_difference(&expect) < 1e-15);
}

#[test]
fn fock_and_coherent_sources() {
    let s = make_source(
        &SourceSpec::Fock {
            n: 3,
            pol: Some(Pol::Y),
        },
        "a",
        8,
    )
    .unwrap();
    assert_eq!(s.amplitude(&occ(&[("a.y", 3)])), c(1.0, 0.0));
    let coh = make_source(
        &SourceSpec::Coherent {
            re: 1.0,
            im: 0.0,
            pol: None,
        },
        "a",
        40,
    )
    .unwrap();
    assert!((coh.norm_sqr() - 1.0).abs() < 1e-12);
    assert!((coh.amplitude(&occ(&[])) - (-0.5f64).exp()).norm() < 1e-10);
    assert!(make_source(
        &SourceSpec::Coherent {
            re: 3.0,
            im: 0.0,
            pol: None
        },
        "a",
        8
    )
    .is_err());
}

#[test]
fn every_golden_file_runs_and_engines_agree() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus"].iter().collect();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "fpc") {
            continue;
        }
        let circuit = parse_circuit(&fs::read_to_string(&path).unwrap()).unwrap();
        let max = if circuit.has_coherent_source() { 40 } else { 8 };
        let d = cross_check(&circuit, max).unwrap();
        assert!(d < 1e-10, "{}: {d:e}", path.display());
    }
}

#[test]
fn builtins_match_corpus() {
    for name in builtin_names() {
        let c = builtin(name).unwrap();
        assert_eq!(c.name(), Some(name));
        assert_eq!(c.to_text(), corpus(&format!("{name}.fpc")));
    }
    assert!(builtin("nope").is_none());
}

#[test]
fn aligned_pbs_splits_rcp_lcp_pair_evenly() {
    let out = run(&corpus("rcp_lcp_pbs.fpc"));
    let d = out.number_distribution(&["p4", "p3"]).unwrap();
    assert!((d[&vec![2, 0]] - 0.5).abs() < 1e-12);
    assert!((d[&vec![0, 2]] - 0.5).abs() < 1e-12);
    let hwp = run(&corpus("rcp_lcp_hwp.fpc"));
    let pair = state(&[
        (&[("a.x", 2)], c(FRAC_1_SQRT_2, 0.0)),
        (&[("a.y", 2)], c(FRAC_1_SQRT_2, 0.0)),
    ]);
    assert!(hwp.max_abs_difference(&pair) < 1e-12);
}

#[test]
fn mirrored_mach_zehnder_example() {
    let out = run(&corpus("example5.fpc"));
    let p: f64 = out.number_distribution(&["o3", "o4"]).unwrap()[&vec![1, 1]];
    assert!((p - 1.0).abs() < 1e-12);
}

#[test]
fn unused_ports_are_vacuum() {
    let out = run(&corpus("mzi.fpc"));
    for port in ["b", "c"] {
        assert_eq!(out.expected_photon_number(port).unwrap(), 0.0);
    }
}

#[test]
fn malformed_codes_lines_and_columns() {
    let table = [
        ("unknown_keyword", "E01", 4, 1),
        ("undeclared_port", "E02", 5, 30),
        ("duplicate_source", "E03", 5, 8),
        ("rbs_energy", "E04", 8, 5),
        ("rbs_phase", "E05", 6, 5),
        ("bad_number", "E06", 4, 17),
        ("syntax", "E07", 6, 15),
        ("duplicate_port", "E08", 3, 6),
        ("port_flow", "E09", 7, 1),
    ];
    for (name, code, line, column) in table {
        let e = parse_circuit(&corpus(&format!("malformed/{name}.fpc"))).unwrap_err();
        assert_eq!((e.code.as_str(), e.line, e.column), (code, line, column), "{name}: {e}");
    }
}

#[test]
fn coherent_sources_cannot_meet_polarization_elements() {
    let text = "port a\nport t\nport r\nsource a coherent re=1 im=0\npbs axis=0 a -> t r\n";
    assert_eq!(parse_circuit(text).unwrap_err().code.as_str(), "E10");
    let text = "port a\nsource a coherent re=1 im=0\nrotpol angle=10 on a\n";
    assert_eq!(parse_circuit(text).unwrap_err().code.as_str(), "E10");
}

#[test]
fn photon_budget_is_enforced() {
    let text = "port a\nport b\nport c\nport d\nsource a fock 5\nsource b fock 4\nrbs split=50 a b -> c d\n";
    let err = run_circuit(&parse_circuit(text).unwrap(), EngineKind::Both, 8).unwrap_err();
    assert!(err.is_budget(), "{err}");
    assert!(matches!(err, CircuitError::Budget { total: 9, max: 8 }));
    assert!(run_circuit(&parse_circuit(text).unwrap(), EngineKind::Both, 9).is_ok());
}

#[test]
fn empty_circuit_is_vacuum() {
    let out = run_circuit(&parse_circuit("").unwrap(), EngineKind::Both, 8).unwrap();
    assert_eq!(out.state.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_circuits_conserve_photons_and_agree(seed in any::<u64>()) {
        let cfg = RandomCircuitConfig::default();
        for text in random_circuits(seed, 4, &cfg) {
            let circuit = parse_circuit(&text).unwrap();
            prop_assert_eq!(circuit.to_text(), text.clone());
            let report = run_circuit(&circuit, EngineKind::Both, 8).unwrap();
            prop_assert!(report.discrepancy.unwrap() < 1e-10);
            prop_assert!((report.state.norm_sqr() - 1.0).abs() < 1e-12);
            let totals: std::collections::BTreeSet<u32> = report.state.terms().map(|(b, _)| b.total()).collect();
            prop_assert!(totals.len() <= 1, "mixed totals in\n{}", text);
        }
    }
}
