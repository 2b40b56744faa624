//! The `.fpc` circuit format: one statement per line, whitespace-separated
//! tokens, `key=value` parameters, `#` comments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{
    Circuit, ElementSpec, FlowError, Handedness, PortFlow, PortState, SourceSpec, Splitting, Statement, StatementKind,
};
use crate::elements::{validate_rbs_coefficients, ElementError};
use crate::fock::{Amplitude, Basis, Pol};

/// Diagnostic codes reported by the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    /// E01
    UnknownKeyword,
    /// E02
    UndeclaredPort,
    /// E03
    DuplicateSource,
    /// E04
    RbsEnergy,
    /// E05
    RbsPhase,
    /// E06
    MalformedNumber,
    /// E07
    Syntax,
    /// E08
    DuplicatePort,
    /// E09: a port used after it was consumed, or an output that already
    /// carries light.
    PortFlow,
    /// E10: coherent sources with a polarizing beam splitter or rotation.
    CoherentUnsupported,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::UnknownKeyword => "E01",
            ErrorCode::UndeclaredPort => "E02",
            ErrorCode::DuplicateSource => "E03",
            ErrorCode::RbsEnergy => "E04",
            ErrorCode::RbsPhase => "E05",
            ErrorCode::MalformedNumber => "E06",
            ErrorCode::Syntax => "E07",
            ErrorCode::DuplicatePort => "E08",
            ErrorCode::PortFlow => "E09",
            ErrorCode::CoherentUnsupported => "E10",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A located parse error. Lines and columns are 1-based; columns count
/// characters.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {code} {message}")]
pub struct ParseError {
    pub code: ErrorCode,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(code: ErrorCode, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            code,
            line,
            column,
            message: message.into(),
        }
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v}")
}

/// `re±|im|i`, e.g. `0.6+0i` or `-0.5-0.5i`.
pub fn format_complex(z: Amplitude) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

fn format_pol(pol: Option<Pol>) -> String {
    pol.map(|p| format!(" pol {p}")).unwrap_or_default()
}

fn format_source(spec: &SourceSpec) -> String {
    match spec {
        SourceSpec::Fock { n, pol } => format!("fock {n}{}", format_pol(*pol)),
        SourceSpec::LinPol { angle_deg, n } => format!("linpol angle={} n={n}", format_number(*angle_deg)),
        SourceSpec::CircPol { handedness, n } => format!("circpol {} n={n}", handedness.as_str()),
        SourceSpec::RcpLcpPair => "rcp_lcp_pair".to_string(),
        SourceSpec::Coherent { re, im, pol } => format!(
            "coherent re={} im={}{}",
            format_number(*re),
            format_number(*im),
            format_pol(*pol)
        ),
    }
}

fn format_element(e: &ElementSpec) -> String {
    match e {
        ElementSpec::Rbs {
            splitting,
            inputs,
            outputs,
        } => {
            let params = match splitting {
                Splitting::Balanced => "split=50".to_string(),
                Splitting::Explicit { rho, tau } => {
                    format!("r={} t={}", format_complex(*rho), format_complex(*tau))
                }
            };
            format!(
                "rbs {params} {} {} -> {} {}",
                inputs[0], inputs[1], outputs[0], outputs[1]
            )
        }
        ElementSpec::Pbs {
            axis_deg,
            input,
            transmitted,
            reflected,
        } => format!(
            "pbs axis={} {input} -> {transmitted} {reflected}",
            format_number(*axis_deg)
        ),
        ElementSpec::WavePlate {
            phase_deg,
            axis_deg,
            port,
        } => format!(
            "waveplate phase={} axis={} on {port}",
            format_number(*phase_deg),
            format_number(*axis_deg)
        ),
        ElementSpec::RotPol { angle_deg, port } => {
            format!("rotpol angle={} on {port}", format_number(*angle_deg))
        }
        ElementSpec::Phase { deg, port } => format!("phase deg={} on {port}", format_number(*deg)),
    }
}

pub(crate) fn format_statement(s: &Statement) -> String {
    let body = match &s.kind {
        StatementKind::Blank => String::new(),
        StatementKind::Comment(text) => text.clone(),
        StatementKind::Port(p) => format!("port {p}"),
        StatementKind::Source { port, spec } => format!("source {port} {}", format_source(spec)),
        StatementKind::Element(e) => format_element(e),
    };
    match &s.comment {
        Some(c) if body.is_empty() => c.clone(),
        Some(c) => format!("{body} {c}"),
        None => body,
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(body: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (idx, ch)) in body.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                tokens.push(Token {
                    text: &body[s..idx],
                    column: c + 1,
                });
            }
        } else if start.is_none() {
            start = Some((idx, col));
        }
    }
    if let Some((s, c)) = start {
        tokens.push(Token {
            text: &body[s..],
            column: c + 1,
        });
    }
    tokens
}

fn is_float(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (int, frac) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = digits(int) && digits(frac) && !(int.is_empty() && frac.is_empty());
    let exponent_ok = match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && digits(e)
        }
    };
    mantissa_ok && exponent_ok
}

/// Parses `re±imi`, e.g. `0.6+0i` or `-0.5-0.5i`.
pub fn parse_complex(text: &str) -> Option<Amplitude> {
    let body = text.strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let (re, im) = (&body[..split], &body[split..]);
    if !is_float(re) || !is_float(im) {
        return None;
    }
    let z = Amplitude::new(re.parse().ok()?, im.parse().ok()?);
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, code: ErrorCode, column: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(code, self.line, column, msg)
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(*t)
            }
            None => Err(self.err(ErrorCode::Syntax, self.end_column, format!("expected {what}"))),
        }
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => Err(self.err(ErrorCode::Syntax, t.column, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    fn literal(&mut self, word: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("`{word}`"))?;
        if t.text != word {
            return Err(self.err(
                ErrorCode::Syntax,
                t.column,
                format!("expected `{word}`, found `{}`", t.text),
            ));
        }
        Ok(())
    }

    fn ident(&mut self) -> Result<Token<'a>, ParseError> {
        let t = self.next("a port name")?;
        if !is_ident(t.text) {
            return Err(self.err(
                ErrorCode::Syntax,
                t.column,
                format!("`{}` is not a valid port name", t.text),
            ));
        }
        Ok(t)
    }

    /// `key=value`; returns the value and its column.
    fn keyed(&mut self, key: &str) -> Result<(&'a str, usize), ParseError> {
        let t = self.next(&format!("`{key}=`"))?;
        match t.text.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
            Some(v) => Ok((v, t.column + key.len() + 1)),
            None => Err(self.err(
                ErrorCode::Syntax,
                t.column,
                format!("expected `{key}=`, found `{}`", t.text),
            )),
        }
    }

    fn float_value(&self, text: &str, column: usize) -> Result<f64, ParseError> {
        if !is_float(text) {
            return Err(self.err(ErrorCode::MalformedNumber, column, format!("malformed number `{text}`")));
        }
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(ErrorCode::MalformedNumber, column, format!("malformed number `{text}`")))?;
        if !v.is_finite() {
            return Err(self.err(
                ErrorCode::MalformedNumber,
                column,
                format!("number `{text}` is out of range"),
            ));
        }
        Ok(v)
    }

    fn int_value(&self, text: &str, column: usize) -> Result<u32, ParseError> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.err(
                ErrorCode::MalformedNumber,
                column,
                format!("expected a non-negative integer, found `{text}`"),
            ));
        }
        text.parse().map_err(|_| {
            self.err(
                ErrorCode::MalformedNumber,
                column,
                format!("integer `{text}` is out of range"),
            )
        })
    }

    fn keyed_float(&mut self, key: &str) -> Result<f64, ParseError> {
        let (v, c) = self.keyed(key)?;
        self.float_value(v, c)
    }

    fn keyed_int(&mut self, key: &str) -> Result<u32, ParseError> {
        let (v, c) = self.keyed(key)?;
        self.int_value(v, c)
    }

    fn complex_value(&self, text: &str, column: usize) -> Result<Amplitude, ParseError> {
        parse_complex(text).ok_or_else(|| {
            self.err(
                ErrorCode::MalformedNumber,
                column,
                format!("malformed complex number `{text}`"),
            )
        })
    }

    fn optional_pol(&mut self) -> Result<Option<Pol>, ParseError> {
        if self.peek().is_none() {
            return Ok(None);
        }
        self.literal("pol")?;
        let t = self.next("`x` or `y`")?;
        match t.text {
            "x" => Ok(Some(Pol::X)),
            "y" => Ok(Some(Pol::Y)),
            other => Err(self.err(
                ErrorCode::Syntax,
                t.column,
                format!("source polarization must be `x` or `y`, found `{other}`"),
            )),
        }
    }
}

struct ParserState {
    declared: BTreeSet<String>,
    sourced: BTreeSet<String>,
    flow: PortFlow,
    coherent: Option<usize>,
    polarizing: Option<usize>,
}

impl ParserState {
    fn check_declared(&self, lp: &LineParser<'_>, t: Token<'_>) -> Result<String, ParseError> {
        if !self.declared.contains(t.text) {
            return Err(lp.err(
                ErrorCode::UndeclaredPort,
                t.column,
                format!("port `{}` is not declared", t.text),
            ));
        }
        Ok(t.text.to_string())
    }
}

fn parse_source(lp: &mut LineParser<'_>) -> Result<SourceSpec, ParseError> {
    let kind = lp.next("a source kind")?;
    let spec = match kind.text {
        "fock" => {
            let t = lp.next("a photon count")?;
            let n = lp.int_value(t.text, t.column)?;
            SourceSpec::Fock {
                n,
                pol: lp.optional_pol()?,
            }
        }
        "linpol" => {
            let angle_deg = lp.keyed_float("angle")?;
            let n = lp.keyed_int("n")?;
            SourceSpec::LinPol { angle_deg, n }
        }
        "circpol" => {
            let t = lp.next("`rcp` or `lcp`")?;
            let handedness = match t.text {
                "rcp" => Handedness::Rcp,
                "lcp" => Handedness::Lcp,
                other => {
                    return Err(lp.err(
                        ErrorCode::Syntax,
                        t.column,
                        format!("expected `rcp` or `lcp`, found `{other}`"),
                    ))
                }
            };
            let n = lp.keyed_int("n")?;
            SourceSpec::CircPol { handedness, n }
        }
        "rcp_lcp_pair" => SourceSpec::RcpLcpPair,
        "coherent" => {
            let re = lp.keyed_float("re")?;
            let im = lp.keyed_float("im")?;
            SourceSpec::Coherent {
                re,
                im,
                pol: lp.optional_pol()?,
            }
        }
        other => {
            return Err(lp.err(
                ErrorCode::UnknownKeyword,
                kind.column,
                format!("unknown source kind `{other}`"),
            ))
        }
    };
    lp.finish()?;
    Ok(spec)
}

fn parse_rbs(lp: &mut LineParser<'_>, st: &ParserState) -> Result<ElementSpec, ParseError> {
    let first = lp.peek();
    let splitting = match first {
        Some(t) if t.text.starts_with("split=") => {
            lp.pos += 1;
            if t.text != "split=50" {
                return Err(lp.err(
                    ErrorCode::Syntax,
                    t.column,
                    "only `split=50` is supported; give `r=` and `t=` otherwise",
                ));
            }
            Splitting::Balanced
        }
        _ => {
            let r_col = lp.peek().map(|t| t.column).unwrap_or(lp.end_column);
            let (r, rc) = lp.keyed("r")?;
            let rho = lp.complex_value(r, rc)?;
            let (t, tc) = lp.keyed("t")?;
            let tau = lp.complex_value(t, tc)?;
            match validate_rbs_coefficients(rho, tau) {
                Ok(()) => {}
                Err(ElementError::EnergyConservation(v)) => {
                    return Err(lp.err(ErrorCode::RbsEnergy, r_col, format!("|r|² + |t|² = {v}, expected 1")))
                }
                Err(ElementError::PhaseRelation(v)) => {
                    return Err(lp.err(
                        ErrorCode::RbsPhase,
                        r_col,
                        format!("arg t − arg r = {v}°, expected ±90°"),
                    ))
                }
                Err(e) => return Err(lp.err(ErrorCode::RbsEnergy, r_col, e.to_string())),
            }
            Splitting::Explicit { rho, tau }
        }
    };
    let a = lp.ident()?;
    let b = lp.ident()?;
    lp.literal("->")?;
    let c = lp.ident()?;
    let d = lp.ident()?;
    lp.finish()?;
    Ok(ElementSpec::Rbs {
        splitting,
        inputs: [st.check_declared(lp, a)?, st.check_declared(lp, b)?],
        outputs: [st.check_declared(lp, c)?, st.check_declared(lp, d)?],
    })
}

fn parse_element(keyword: &str, lp: &mut LineParser<'_>, st: &ParserState) -> Result<ElementSpec, ParseError> {
    match keyword {
        "rbs" => parse_rbs(lp, st),
        "pbs" => {
            let axis_deg = lp.keyed_float("axis")?;
            let input = lp.ident()?;
            lp.literal("->")?;
            let t = lp.ident()?;
            let r = lp.ident()?;
            lp.finish()?;
            Ok(ElementSpec::Pbs {
                axis_deg,
                input: st.check_declared(lp, input)?,
                transmitted: st.check_declared(lp, t)?,
                reflected: st.check_declared(lp, r)?,
            })
        }
        "waveplate" => {
            let phase_deg = lp.keyed_float("phase")?;
            let axis_deg = lp.keyed_float("axis")?;
            lp.literal("on")?;
            let p = lp.ident()?;
            lp.finish()?;
            Ok(ElementSpec::WavePlate {
                phase_deg,
                axis_deg,
                port: st.check_declared(lp, p)?,
            })
        }
        "rotpol" => {
            let angle_deg = lp.keyed_float("angle")?;
            lp.literal("on")?;
            let p = lp.ident()?;
            lp.finish()?;
            Ok(ElementSpec::RotPol {
                angle_deg,
                port: st.check_declared(lp, p)?,
            })
        }
        "phase" => {
            let deg = lp.keyed_float("deg")?;
            lp.literal("on")?;
            let p = lp.ident()?;
            lp.finish()?;
            Ok(ElementSpec::Phase {
                deg,
                port: st.check_declared(lp, p)?,
            })
        }
        _ => unreachable!("caller filters keywords"),
    }
}

/// Parses circuit text. Validation (ports, sources, beam-splitter
/// coefficients, port flow) happens here so errors carry a location.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut statements = Vec::new();
    let mut st = ParserState {
        declared: BTreeSet::new(),
        sourced: BTreeSet::new(),
        flow: PortFlow::new([]),
        coherent: None,
        polarizing: None,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let (body, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(&raw[i..])),
            None => (raw, None),
        };
        let tokens = tokenize(body);
        if tokens.is_empty() {
            let kind = match comment {
                Some(_) => StatementKind::Comment(raw.trim_end().to_string()),
                None => StatementKind::Blank,
            };
            statements.push(Statement {
                line,
                kind,
                comment: None,
            });
            continue;
        }
        let mut lp = LineParser {
            line,
            tokens,
            pos: 0,
            end_column: body.trim_end().chars().count() + 1,
        };
        let keyword = lp.next("a keyword")?;
        let kind = match keyword.text {
            "port" => {
                let p = lp.ident()?;
                lp.finish()?;
                if !st.declared.insert(p.text.to_string()) {
                    return Err(lp.err(
                        ErrorCode::DuplicatePort,
                        p.column,
                        format!("port `{}` declared twice", p.text),
                    ));
                }
                st.flow.state.insert(p.text.to_string(), PortState::Fresh);
                StatementKind::Port(p.text.to_string())
            }
            "source" => {
                let p = lp.ident()?;
                let spec = parse_source(&mut lp)?;
                let port = st.check_declared(&lp, p)?;
                if st.sourced.contains(&port) {
                    return Err(lp.err(
                        ErrorCode::DuplicateSource,
                        p.column,
                        format!("port `{port}` already has a source"),
                    ));
                }
                if st.flow.state.get(&port) != Some(&PortState::Fresh) {
                    return Err(lp.err(
                        ErrorCode::PortFlow,
                        p.column,
                        format!("port `{port}` already carries light"),
                    ));
                }
                if spec.is_coherent() {
                    if let Some(l) = st.polarizing {
                        return Err(lp.err(
                            ErrorCode::CoherentUnsupported,
                            keyword.column,
                            format!("coherent sources cannot be combined with the polarizing element on line {l}"),
                        ));
                    }
                    st.coherent.get_or_insert(line);
                }
                st.sourced.insert(port.clone());
                st.flow.state.insert(port.clone(), PortState::Live(Basis::Lab));
                StatementKind::Source { port, spec }
            }
            "rbs" | "pbs" | "waveplate" | "rotpol" | "phase" => {
                let element = parse_element(keyword.text, &mut lp, &st)?;
                if matches!(element, ElementSpec::Pbs { .. } | ElementSpec::RotPol { .. }) {
                    if let Some(l) = st.coherent {
                        return Err(lp.err(
                            ErrorCode::CoherentUnsupported,
                            keyword.column,
                            format!(
                                "`{}` is not supported with the coherent source on line {l}",
                                keyword.text
                            ),
                        ));
                    }
                    st.polarizing.get_or_insert(line);
                }
                st.flow.apply(&element).map_err(|e| {
                    let msg = match e {
                        FlowError::Flow(m) => m,
                        FlowError::Element(e) => e.to_string(),
                    };
                    lp.err(ErrorCode::PortFlow, keyword.column, msg)
                })?;
                StatementKind::Element(element)
            }
            other => {
                return Err(lp.err(
                    ErrorCode::UnknownKeyword,
                    keyword.column,
                    format!("unknown keyword `{other}`"),
                ))
            }
        };
        statements.push(Statement {
            line,
            kind,
            comment: comment.map(str::to_string),
        });
    }
    Ok(Circuit { name: None, statements })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(text: &str) -> (ErrorCode, usize, usize) {
        let e = parse_circuit(text).unwrap_err();
        (e.code, e.line, e.column)
    }

    #[test]
    fn floats() {
        for ok in ["0", "-0", "1.5", ".5", "5.", "+2", "1e-3", "-2.5E+4"] {
            assert!(is_float(ok), "{ok}");
        }
        for bad in ["", "-", ".", "1e", "e3", "1.2.3", "inf", "NaN", "0x10", "1_0"] {
            assert!(!is_float(bad), "{bad}");
        }
    }

    #[test]
    fn complex_literals() {
        let lp = LineParser {
            line: 1,
            tokens: vec![],
            pos: 0,
            end_column: 1,
        };
        assert_eq!(lp.complex_value("0.6+0i", 1).unwrap(), Amplitude::new(0.6, 0.0));
        assert_eq!(lp.complex_value("-0.5-0.5i", 1).unwrap(), Amplitude::new(-0.5, -0.5));
        assert_eq!(lp.complex_value("1e-3+2E-1i", 1).unwrap(), Amplitude::new(1e-3, 0.2));
        assert!(lp.complex_value("0.6", 1).is_err());
        assert!(lp.complex_value("0.6i", 1).is_err());
        assert!(lp.complex_value("0.6+-1i", 1).is_err());
    }

    #[test]
    fn complex_format_round_trips() {
        for z in [
            Amplitude::new(0.6, 0.0),
            Amplitude::new(-0.5, -0.5),
            Amplitude::new(0.0, -0.0),
        ] {
            let lp = LineParser {
                line: 1,
                tokens: vec![],
                pos: 0,
                end_column: 1,
            };
            assert_eq!(lp.complex_value(&format_complex(z), 1).unwrap(), z);
        }
    }

    #[test]
    fn columns_count_characters() {
        let toks = tokenize("  pbs  axis=0");
        assert_eq!(toks[0].column, 3);
        assert_eq!(toks[1].column, 8);
    }

    #[test]
    fn error_codes() {
        assert_eq!(code("port a\nfoo a\n"), (ErrorCode::UnknownKeyword, 2, 1));
        assert_eq!(code("port a\nsource b fock 1\n"), (ErrorCode::UndeclaredPort, 2, 8));
        assert_eq!(
            code("port a\nsource a fock 1\nsource a fock 2\n"),
            (ErrorCode::DuplicateSource, 3, 8)
        );
        assert_eq!(
            code("port a\nport b\nport c\nport d\nrbs r=0.6+0i t=0+0.6i a b -> c d\n").0,
            ErrorCode::RbsEnergy
        );
        assert_eq!(
            code("port a\nport b\nport c\nport d\nrbs r=0.6+0i t=0.8+0i a b -> c d\n"),
            (ErrorCode::RbsPhase, 5, 5)
        );
        assert_eq!(
            code("port a\nwaveplate phase=9o axis=0 on a\n"),
            (ErrorCode::MalformedNumber, 2, 17)
        );
        assert_eq!(code("port a\nwaveplate phase=90 on a\n"), (ErrorCode::Syntax, 2, 20));
        assert_eq!(code("port a\nport a\n"), (ErrorCode::DuplicatePort, 2, 6));
        assert_eq!(
            code("port a\nport b\nport c\npbs axis=0 a -> b c\nwaveplate phase=90 axis=0 on a\n"),
            (ErrorCode::PortFlow, 5, 1)
        );
        assert_eq!(
            code("port a\nport b\nport c\nsource a coherent re=1 im=0\npbs axis=0 a -> b c\n").0,
            ErrorCode::CoherentUnsupported
        );
    }

    #[test]
    fn trailing_comment_and_blank_lines_survive() {
        let text = "# header\n\nport a # input\nsource a fock 2 pol y\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.to_text(), text);
    }

    #[test]
    fn missing_token_reports_line_end() {
        let e = parse_circuit("port a\nrotpol angle=45 on\n").unwrap_err();
        assert_eq!((e.code, e.column), (ErrorCode::Syntax, 19));
    }
}
