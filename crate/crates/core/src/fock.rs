//! Amplitudes, optical modes, Fock basis states and their superpositions.
//!
//! A [`PhotonState`] is a sparse map from occupation-number basis states to
//! complex amplitudes, together with the set of modes it is defined over (the
//! "mode universe"). Modes that are present in the universe but absent from a
//! basis state hold zero photons.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dimensionless complex probability amplitude.
pub type Amplitude = Complex64;

/// Terms whose amplitude magnitude falls below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Default cap on the total photon number of any basis state.
pub const DEFAULT_MAX_PHOTONS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("null state")]
    NullState,
    #[error("unknown port `{0}`")]
    UnknownPort(String),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("invalid mode label `{0}`")]
    BadModeLabel(String),
    #[error("mode `{0}` appears in both factors of a product state")]
    OverlappingModes(String),
}

/// Polarization axis tag. Each tag belongs to exactly one two-axis basis.
///
/// The variant order matches the lexicographic order of the labels
/// (`x`, `x'`, `y`, `y'`), which fixes the serialization order of modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    X,
    XPrime,
    Y,
    YPrime,
}

/// One of the two polarization frames a port can be expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// The laboratory x/y axes.
    Lab,
    /// An x'/y' pair rotated about the propagation axis.
    Rotated,
}

impl Basis {
    /// The (first, second) axes of this basis.
    pub fn axes(self) -> [Pol; 2] {
        match self {
            Basis::Lab => [Pol::X, Pol::Y],
            Basis::Rotated => [Pol::XPrime, Pol::YPrime],
        }
    }

    pub fn toggled(self) -> Basis {
        match self {
            Basis::Lab => Basis::Rotated,
            Basis::Rotated => Basis::Lab,
        }
    }
}

impl Pol {
    pub fn basis(self) -> Basis {
        match self {
            Pol::X | Pol::Y => Basis::Lab,
            Pol::XPrime | Pol::YPrime => Basis::Rotated,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pol::X => "x",
            Pol::XPrime => "x'",
            Pol::Y => "y",
            Pol::YPrime => "y'",
        }
    }
}

impl FromStr for Pol {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" => Ok(Pol::X),
            "x'" => Ok(Pol::XPrime),
            "y" => Ok(Pol::Y),
            "y'" => Ok(Pol::YPrime),
            other => Err(StateError::BadModeLabel(other.to_string())),
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single optical mode: a spatial port and a polarization axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub port: String,
    pub pol: Pol,
}

impl ModeId {
    pub fn new(port: impl Into<String>, pol: Pol) -> Self {
        ModeId { port: port.into(), pol }
    }

    /// Both polarization modes of `port` in the given basis.
    pub fn pair(port: &str, basis: Basis) -> [ModeId; 2] {
        let [a, b] = basis.axes();
        [ModeId::new(port, a), ModeId::new(port, b)]
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.port, self.pol)
    }
}

impl FromStr for ModeId {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (port, pol) = s
            .rsplit_once('.')
            .ok_or_else(|| StateError::BadModeLabel(s.to_string()))?;
        if port.is_empty() {
            return Err(StateError::BadModeLabel(s.to_string()));
        }
        Ok(ModeId::new(port, pol.parse()?))
    }
}

/// Occupation numbers of a multimode number state. Modes with zero photons
/// are not stored, so two equal states always compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState(BTreeMap<ModeId, u32>);

impl FockBasisState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (ModeId, u32)>,
    {
        let mut s = Self::default();
        for (mode, n) in counts {
            let total = s.count(&mode) + n;
            s.set(mode, total);
        }
        s
    }

    pub fn count(&self, mode: &ModeId) -> u32 {
        self.0.get(mode).copied().unwrap_or(0)
    }

    pub fn set(&mut self, mode: ModeId, n: u32) {
        if n == 0 {
            self.0.remove(&mode);
        } else {
            self.0.insert(mode, n);
        }
    }

    /// Removes `mode` and returns the photons it held.
    pub fn take(&mut self, mode: &ModeId) -> u32 {
        self.0.remove(mode).unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    /// Photons in all polarization modes of `port`.
    pub fn port_count(&self, port: &str) -> u32 {
        self.0.iter().filter(|(m, _)| m.port == port).map(|(_, n)| *n).sum()
    }

    /// Occupied modes with their counts, in mode order.
    pub fn iter(&self) -> impl Iterator<Item = (&ModeId, u32)> {
        self.0.iter().map(|(m, n)| (m, *n))
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("|vac>");
        }
        for (m, n) in &self.0 {
            write!(f, "|{n}>_{m}")?;
        }
        Ok(())
    }
}

/// A superposition of Fock basis states over a fixed set of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    modes: BTreeSet<ModeId>,
    terms: BTreeMap<FockBasisState, Amplitude>,
}

impl PhotonState {
    /// The vacuum over `modes`.
    pub fn vacuum<I: IntoIterator<Item = ModeId>>(modes: I) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(FockBasisState::vacuum(), Amplitude::new(1.0, 0.0));
        PhotonState {
            modes: modes.into_iter().collect(),
            terms,
        }
    }

    /// A single basis state with amplitude one.
    pub fn basis<I: IntoIterator<Item = ModeId>>(modes: I, occupancy: FockBasisState) -> Self {
        Self::from_terms(modes, [(occupancy, Amplitude::new(1.0, 0.0))])
    }

    /// Builds a state from raw terms without normalizing. Repeated basis
    /// states are summed and every occupied mode joins the mode universe.
    pub fn from_terms<M, T>(modes: M, terms: T) -> Self
    where
        M: IntoIterator<Item = ModeId>,
        T: IntoIterator<Item = (FockBasisState, Amplitude)>,
    {
        let mut modes: BTreeSet<ModeId> = modes.into_iter().collect();
        let mut map: BTreeMap<FockBasisState, Amplitude> = BTreeMap::new();
        for (basis, amp) in terms {
            modes.extend(basis.0.keys().cloned());
            *map.entry(basis).or_default() += amp;
        }
        let mut state = PhotonState { modes, terms: map };
        state.prune();
        state
    }

    pub fn modes(&self) -> &BTreeSet<ModeId> {
        &self.modes
    }

    /// Port labels present in the mode universe.
    pub fn ports(&self) -> BTreeSet<&str> {
        self.modes.iter().map(|m| m.port.as_str()).collect()
    }

    pub fn has_port(&self, port: &str) -> bool {
        self.modes.iter().any(|m| m.port == port)
    }

    /// Adds vacuum modes to the universe.
    pub fn with_modes<I: IntoIterator<Item = ModeId>>(mut self, modes: I) -> Self {
        self.modes.extend(modes);
        self
    }

    /// Replaces the mode universe. Occupied modes are always kept.
    pub(crate) fn set_modes(&mut self, modes: BTreeSet<ModeId>) {
        self.modes = modes;
        for basis in self.terms.keys() {
            self.modes.extend(basis.0.keys().cloned());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockBasisState, Amplitude)> {
        self.terms.iter().map(|(b, a)| (b, *a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, basis: &FockBasisState) -> Amplitude {
        self.terms.get(basis).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number over the support.
    pub fn max_total_photons(&self) -> u32 {
        self.terms.keys().map(|b| b.total()).max().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    fn prune(&mut self) {
        // NaN terms survive so that `normalize` can report them
        self.terms
            .retain(|_, a| a.norm().is_nan() || a.norm() >= PRUNE_THRESHOLD);
    }

    /// Rescales by one positive real factor so that the squared norm is one.
    pub fn normalize(&self) -> Result<PhotonState, StateError> {
        if !self.is_finite() {
            return Err(StateError::NonFinite);
        }
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NullState);
        }
        let mut out = self.scaled(Amplitude::new(1.0 / norm, 0.0));
        out.prune();
        Ok(out)
    }

    pub fn scaled(&self, factor: Amplitude) -> PhotonState {
        PhotonState {
            modes: self.modes.clone(),
            terms: self.terms.iter().map(|(b, a)| (b.clone(), a * factor)).collect(),
        }
    }

    /// Tensor product of states over disjoint mode sets.
    pub fn product(&self, other: &PhotonState) -> Result<PhotonState, StateError> {
        if let Some(m) = self.modes.intersection(&other.modes).next() {
            return Err(StateError::OverlappingModes(m.to_string()));
        }
        let mut terms = BTreeMap::new();
        for (b1, a1) in &self.terms {
            for (b2, a2) in &other.terms {
                let mut b = b1.clone();
                for (m, n) in b2.iter() {
                    b.set(m.clone(), n);
                }
                terms.insert(b, a1 * a2);
            }
        }
        let mut out = PhotonState {
            modes: self.modes.union(&other.modes).cloned().collect(),
            terms,
        };
        out.prune();
        Ok(out)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PhotonState) -> Amplitude {
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms, true)
        } else {
            (&other.terms, &self.terms, false)
        };
        small
            .iter()
            .filter_map(|(b, a)| large.get(b).map(|c| (*a, *c)))
            .map(|(a, c)| if conj_small { a.conj() * c } else { c.conj() * a })
            .sum()
    }

    /// Joint photon-number distribution over the listed ports, marginalized
    /// over all others. Keys list counts in the order of `ports`.
    pub fn number_distribution(&self, ports: &[&str]) -> Result<BTreeMap<Vec<u32>, f64>, StateError> {
        for p in ports {
            if !self.has_port(p) {
                return Err(StateError::UnknownPort(p.to_string()));
            }
        }
        let mut dist = BTreeMap::new();
        for (basis, amp) in &self.terms {
            let key: Vec<u32> = ports.iter().map(|p| basis.port_count(p)).collect();
            *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(dist)
    }

    pub fn expected_photon_number(&self, port: &str) -> Result<f64, StateError> {
        if !self.has_port(port) {
            return Err(StateError::UnknownPort(port.to_string()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(b, a)| b.port_count(port) as f64 * a.norm_sqr())
            .sum())
    }

    /// Largest amplitude difference over the union of both supports.
    pub fn max_abs_difference(&self, other: &PhotonState) -> f64 {
        let keys: BTreeSet<&FockBasisState> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|b| (self.amplitude(b) - other.amplitude(b)).norm())
            .fold(0.0, f64::max)
    }

    /// Wire form used for JSON output.
    pub fn to_wire(&self) -> Vec<WireTerm> {
        self.terms
            .iter()
            .map(|(b, a)| WireTerm {
                occupancy: b.iter().map(|(m, n)| (m.to_string(), n)).collect(),
                re: a.re,
                im: a.im,
            })
            .collect()
    }

    pub fn from_wire(terms: &[WireTerm]) -> Result<PhotonState, StateError> {
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            let mut occ = Vec::new();
            for (label, n) in &t.occupancy {
                occ.push((label.parse::<ModeId>()?, *n));
            }
            parsed.push((FockBasisState::from_counts(occ), Amplitude::new(t.re, t.im)));
        }
        Ok(PhotonState::from_terms([], parsed))
    }
}

/// Free-function form of [`PhotonState::normalize`].
pub fn normalize(state: &PhotonState) -> Result<PhotonState, StateError> {
    state.normalize()
}

/// Free-function form of [`PhotonState::inner_product`].
pub fn inner_product(a: &PhotonState, b: &PhotonState) -> Amplitude {
    a.inner_product(b)
}

/// One serialized term: `{"occupancy": {"port.pol": n}, "re": r, "im": i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireTerm {
    pub occupancy: BTreeMap<String, u32>,
    pub re: f64,
    pub im: f64,
}

impl Serialize for PhotonState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_wire().serialize(serializer)
    }
}

impl fmt::Display for PhotonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (b, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, b)?;
        }
        Ok(())
    }
}
