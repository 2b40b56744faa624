//! Demo circuits compiled into the binary, byte-identical to `corpus/`.

use super::{parse_circuit, Circuit};

/// `(name, text)` for every built-in circuit.
pub const BUILTINS: [(&str, &str); 7] = [
    ("mzi", include_str!("../../corpus/mzi.fpc")),
    ("hom", include_str!("../../corpus/hom.fpc")),
    ("example1", include_str!("../../corpus/example1.fpc")),
    ("example2", include_str!("../../corpus/example2.fpc")),
    ("example3", include_str!("../../corpus/example3.fpc")),
    ("example4", include_str!("../../corpus/example4.fpc")),
    ("example5", include_str!("../../corpus/example5.fpc")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

/// The named demo circuit, parsed.
pub fn builtin(name: &str) -> Option<Circuit> {
    let (_, text) = BUILTINS.iter().find(|(n, _)| *n == name)?;
    let circuit = parse_circuit(text).expect("built-in circuits parse");
    Some(circuit.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses_and_round_trips() {
        for (name, text) in BUILTINS {
            let c = builtin(name).unwrap();
            assert_eq!(c.to_text(), text, "{name}");
        }
        assert!(builtin("nope").is_none());
    }
}
