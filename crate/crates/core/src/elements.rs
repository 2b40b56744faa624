//! Optical elements as unitary mode transforms.
//!
//! A [`ModeTransform`] maps an ordered list of input modes onto an ordered
//! list of output modes through a unitary matrix indexed `[out, in]`: entry
//! `(j, i)` is the single-photon amplitude to go from input mode `i` to output
//! mode `j`. Creation operators transform with the same matrix,
//! `a_in† = Σ_j M[j, in] a_j†`.
//!
//! Polarization rotations use `x' = cosθ·x + sinθ·y` and
//! `y' = −sinθ·x + cosθ·y`, so an x photon lands on y' with amplitude
//! `−sinθ`. Angles are radians.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::fock::{Amplitude, ModeId, Pol};

/// Tolerance for user-supplied coefficients and matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("energy conservation violated: |r|^2 + |t|^2 = {0}")]
    EnergyConservation(f64),
    #[error("r and t must differ in phase by 90 degrees (difference is {0} degrees)")]
    PhaseRelation(f64),
    #[error("element not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("malformed element layout: {0}")]
    Layout(String),
    #[error("thin-sheet transmission phase must lie strictly inside (-90, 90) degrees, got {0} rad")]
    SheetPhaseOutOfRange(f64),
}

/// Dense square complex matrix, row-major, indexed `[out, in]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl Matrix {
    pub fn from_rows(rows: &[&[Amplitude]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Amplitude::default(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Amplitude::new(1.0, 0.0);
        }
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, out: usize, input: usize) -> Amplitude {
        self.entries[out * self.dim + input]
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut entries = vec![Amplitude::default(); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.get(r, c).conj();
            }
        }
        Matrix { dim: n, entries }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut entries = vec![Amplitude::default(); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = (0..n).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        Matrix { dim: n, entries }
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Matrix::identity(self.dim);
        p.entries
            .iter()
            .zip(&id.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_difference(&self, other: &Matrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// The `[[a, b], [c, d]]` entries of a 2×2 matrix.
    pub fn as_2x2(&self) -> Option<[[Amplitude; 2]; 2]> {
        (self.dim == 2).then(|| [[self.get(0, 0), self.get(0, 1)], [self.get(1, 0), self.get(1, 1)]])
    }
}

/// What kind of element a transform came from, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementKind {
    RegularBeamSplitter {
        rho: Amplitude,
        tau: Amplitude,
    },
    PolarizingBeamSplitter {
        axis: f64,
    },
    /// Output expressed in the laboratory frame of the input.
    WavePlate {
        retardance: f64,
        axis: f64,
    },
    /// Output expressed in the plate's own fast/slow axes.
    WavePlateAxes {
        retardance: f64,
        axis: f64,
    },
    PolarizationRotation {
        angle: f64,
    },
    PhaseShifter {
        phase: f64,
    },
    Identity,
    Custom,
}

/// A unitary acting on one or two modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeTransform {
    in_modes: Vec<ModeId>,
    out_modes: Vec<ModeId>,
    matrix: Matrix,
    kind: ElementKind,
}

fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

/// Polarization rotation matrix, rows `(x', y')`, columns `(x, y)`.
fn rotation_matrix(theta: f64) -> Matrix {
    let (s, co) = theta.sin_cos();
    Matrix::from_rows(&[&[c(co, 0.0), c(s, 0.0)], &[c(-s, 0.0), c(co, 0.0)]])
}

fn retarder_matrix(retardance: f64) -> Matrix {
    Matrix::from_rows(&[
        &[c(1.0, 0.0), c(0.0, 0.0)],
        &[c(0.0, 0.0), Amplitude::from_polar(1.0, retardance)],
    ])
}

/// Wraps an angle into `(−π, π]`.
fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

fn check_distinct(modes: &[ModeId], what: &str) -> Result<(), ElementError> {
    for (i, a) in modes.iter().enumerate() {
        if modes[i + 1..].contains(a) {
            return Err(ElementError::Layout(format!("{what} mode {a} listed twice")));
        }
    }
    Ok(())
}

fn check_pol_pair(pair: &[ModeId; 2]) -> Result<(), ElementError> {
    let [a, b] = pair;
    let same_basis = a.pol.basis() == b.pol.basis();
    let ordered = a.pol.basis().axes() == [a.pol, b.pol];
    if a.port != b.port || !same_basis || !ordered {
        return Err(ElementError::Layout(format!(
            "expected the two polarization modes of one port in axis order, got {a} and {b}"
        )));
    }
    Ok(())
}

/// Checks the lossless beam-splitter constraints on `(ρ, τ)`.
pub fn validate_rbs_coefficients(rho: Amplitude, tau: Amplitude) -> Result<(), ElementError> {
    let energy = rho.norm_sqr() + tau.norm_sqr();
    if !energy.is_finite() || (energy - 1.0).abs() > UNITARY_TOLERANCE {
        return Err(ElementError::EnergyConservation(energy));
    }
    if rho.norm() > 1e-12 && tau.norm() > 1e-12 {
        let diff = wrap_angle(tau.arg() - rho.arg());
        if (diff.abs() - FRAC_PI_2).abs() > UNITARY_TOLERANCE {
            return Err(ElementError::PhaseRelation(diff.to_degrees()));
        }
    }
    Ok(())
}

/// Coefficients of the balanced splitter, `ρ = 1/√2`, `τ = i/√2`.
pub fn balanced_rbs_coefficients() -> (Amplitude, Amplitude) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (c(h, 0.0), c(0.0, h))
}

/// Reflection and transmission of a thin lossless dielectric sheet with
/// transmission phase `phi_tau`: `τ = cos φ · e^{iφ}` and `ρ = τ − 1`.
pub fn thin_sheet_coefficients(phi_tau: f64) -> Result<(Amplitude, Amplitude), ElementError> {
    if !(phi_tau > -FRAC_PI_2 && phi_tau < FRAC_PI_2) {
        return Err(ElementError::SheetPhaseOutOfRange(phi_tau));
    }
    let tau = Amplitude::from_polar(phi_tau.cos(), phi_tau);
    let rho = tau - 1.0;
    Ok((rho, tau))
}

impl ModeTransform {
    /// Wraps an arbitrary matrix after checking shape and unitarity.
    pub fn from_matrix(
        in_modes: Vec<ModeId>,
        out_modes: Vec<ModeId>,
        matrix: Matrix,
        kind: ElementKind,
    ) -> Result<Self, ElementError> {
        let n = in_modes.len();
        if !(1..=2).contains(&n) || out_modes.len() != n || matrix.dim() != n {
            return Err(ElementError::Layout(format!(
                "{} inputs, {} outputs, {}x{} matrix",
                n,
                out_modes.len(),
                matrix.dim(),
                matrix.dim()
            )));
        }
        check_distinct(&in_modes, "input")?;
        check_distinct(&out_modes, "output")?;
        let dev = matrix.unitarity_deviation();
        if !dev.is_finite() || dev > UNITARY_TOLERANCE {
            return Err(ElementError::NotUnitary(dev));
        }
        Ok(ModeTransform {
            in_modes,
            out_modes,
            matrix,
            kind,
        })
    }

    /// Regular beam splitter `[[ρ, τ], [τ, ρ]]` from inputs `(1, 2)` to
    /// outputs `(3, 4)`.
    pub fn rbs(
        inputs: [ModeId; 2],
        outputs: [ModeId; 2],
        rho: Amplitude,
        tau: Amplitude,
    ) -> Result<Self, ElementError> {
        validate_rbs_coefficients(rho, tau)?;
        let matrix = Matrix::from_rows(&[&[rho, tau], &[tau, rho]]);
        Self::from_matrix(
            inputs.to_vec(),
            outputs.to_vec(),
            matrix,
            ElementKind::RegularBeamSplitter { rho, tau },
        )
    }

    /// Ideal polarizing beam splitter with transmission axis at `axis`.
    ///
    /// `input` is the polarization pair of the entrance port. Outputs are
    /// ordered `(reflected y', transmitted x')` and carry zero relative phase.
    pub fn pbs(
        input: [ModeId; 2],
        transmitted_port: &str,
        reflected_port: &str,
        axis: f64,
    ) -> Result<Self, ElementError> {
        check_pol_pair(&input)?;
        if transmitted_port == reflected_port || transmitted_port == input[0].port || reflected_port == input[0].port {
            return Err(ElementError::Layout(
                "polarizing beam splitter needs one input port and two distinct output ports".into(),
            ));
        }
        let r = rotation_matrix(axis);
        // rows: reflected (y'), transmitted (x')
        let matrix = Matrix::from_rows(&[&[r.get(1, 0), r.get(1, 1)], &[r.get(0, 0), r.get(0, 1)]]);
        Self::from_matrix(
            input.to_vec(),
            vec![
                ModeId::new(reflected_port, Pol::YPrime),
                ModeId::new(transmitted_port, Pol::XPrime),
            ],
            matrix,
            ElementKind::PolarizingBeamSplitter { axis },
        )
    }

    /// Wave plate with slow-axis retardance `retardance` and fast axis at
    /// `axis`, acting in place on a port's polarization pair:
    /// `R(−θ)·diag(1, e^{iφ})·R(θ)`.
    pub fn waveplate(modes: [ModeId; 2], retardance: f64, axis: f64) -> Result<Self, ElementError> {
        check_pol_pair(&modes)?;
        let matrix = rotation_matrix(-axis)
            .mul(&retarder_matrix(retardance))
            .mul(&rotation_matrix(axis));
        Self::from_matrix(
            modes.to_vec(),
            modes.to_vec(),
            matrix,
            ElementKind::WavePlate { retardance, axis },
        )
    }

    /// Wave plate whose output is reported along the plate's own fast and
    /// slow axes, `diag(1, e^{iφ})·R(θ)`; outputs switch to the other basis.
    pub fn waveplate_in_axes(modes: [ModeId; 2], retardance: f64, axis: f64) -> Result<Self, ElementError> {
        check_pol_pair(&modes)?;
        let matrix = retarder_matrix(retardance).mul(&rotation_matrix(axis));
        let out = ModeId::pair(&modes[0].port, modes[0].pol.basis().toggled());
        Self::from_matrix(
            modes.to_vec(),
            out.to_vec(),
            matrix,
            ElementKind::WavePlateAxes { retardance, axis },
        )
    }

    /// Re-expresses a port's polarization in a frame rotated by `angle`.
    /// Output labels switch between the lab and rotated bases.
    pub fn polarization_rotation(modes: [ModeId; 2], angle: f64) -> Result<Self, ElementError> {
        check_pol_pair(&modes)?;
        let out = ModeId::pair(&modes[0].port, modes[0].pol.basis().toggled());
        Self::from_matrix(
            modes.to_vec(),
            out.to_vec(),
            rotation_matrix(angle),
            ElementKind::PolarizationRotation { angle },
        )
    }

    /// Single-mode phase `e^{iφ}`; an n-photon term picks up `e^{inφ}`.
    pub fn phase_shifter(mode: ModeId, phase: f64) -> Self {
        ModeTransform {
            in_modes: vec![mode.clone()],
            out_modes: vec![mode],
            matrix: Matrix::from_rows(&[&[Amplitude::from_polar(1.0, phase)]]),
            kind: ElementKind::PhaseShifter { phase },
        }
    }

    pub fn identity(modes: Vec<ModeId>) -> Result<Self, ElementError> {
        let n = modes.len();
        Self::from_matrix(modes.clone(), modes, Matrix::identity(n), ElementKind::Identity)
    }

    /// The inverse element, mapping the outputs back onto the inputs.
    pub fn inverse(&self) -> ModeTransform {
        ModeTransform {
            in_modes: self.out_modes.clone(),
            out_modes: self.in_modes.clone(),
            matrix: self.matrix.adjoint(),
            kind: ElementKind::Custom,
        }
    }

    pub fn in_modes(&self) -> &[ModeId] {
        &self.in_modes
    }

    pub fn out_modes(&self) -> &[ModeId] {
        &self.out_modes
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> &ElementKind {
        &self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn xy(port: &str) -> [ModeId; 2] {
        ModeId::pair(port, crate::fock::Basis::Lab)
    }

    fn rbs_io() -> ([ModeId; 2], [ModeId; 2]) {
        (
            [ModeId::new("1", Pol::X), ModeId::new("2", Pol::X)],
            [ModeId::new("3", Pol::X), ModeId::new("4", Pol::X)],
        )
    }

    #[test]
    fn balanced_and_unbalanced_rbs_are_valid() {
        let (i, o) = rbs_io();
        let (r, t) = balanced_rbs_coefficients();
        assert!(ModeTransform::rbs(i.clone(), o.clone(), r, t).is_ok());
        assert!(ModeTransform::rbs(i, o, c(0.6, 0.0), c(0.0, 0.8)).is_ok());
    }

    #[test]
    fn rbs_errors_are_distinct() {
        let (i, o) = rbs_io();
        assert!(matches!(
            ModeTransform::rbs(i.clone(), o.clone(), c(0.6, 0.0), c(0.8, 0.0)),
            Err(ElementError::PhaseRelation(_))
        ));
        assert!(matches!(
            ModeTransform::rbs(i, o, c(0.6, 0.0), c(0.0, 0.7)),
            Err(ElementError::EnergyConservation(_))
        ));
    }

    #[test]
    fn rbs_with_zero_coefficient_skips_phase_check() {
        let (i, o) = rbs_io();
        assert!(ModeTransform::rbs(i, o, c(1.0, 0.0), c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn thin_sheet_examples() {
        let (r, t) = thin_sheet_coefficients(0.0).unwrap();
        assert!(r.norm() < 1e-15 && (t - 1.0).norm() < 1e-15);
        let (r, t) = thin_sheet_coefficients(-FRAC_PI_4).unwrap();
        assert!((r - c(-0.5, -0.5)).norm() < 1e-15);
        assert!((t - c(0.5, -0.5)).norm() < 1e-15);
        assert!((r.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((wrap_angle(r.arg() - t.arg()) + FRAC_PI_2).abs() < 1e-12);
        assert!(thin_sheet_coefficients(FRAC_PI_2).is_err());
        assert!(thin_sheet_coefficients(-FRAC_PI_2).is_err());
        assert!(thin_sheet_coefficients(f64::NAN).is_err());
    }

    #[test]
    fn constructors_are_unitary() {
        let (i, o) = rbs_io();
        let (r, t) = thin_sheet_coefficients(0.3).unwrap();
        let all = [
            ModeTransform::rbs(i, o, r, t).unwrap(),
            ModeTransform::pbs(xy("a"), "t", "r", 0.7).unwrap(),
            ModeTransform::waveplate(xy("a"), 1.1, -0.4).unwrap(),
            ModeTransform::waveplate_in_axes(xy("a"), 1.1, -0.4).unwrap(),
            ModeTransform::polarization_rotation(xy("a"), 2.0).unwrap(),
            ModeTransform::phase_shifter(ModeId::new("a", Pol::X), 0.3),
        ];
        for t in &all {
            assert!(t.matrix().unitarity_deviation() < 1e-12, "{:?}", t.kind());
        }
    }

    #[test]
    fn waveplate_composition_law() {
        for &(phi, theta) in &[(0.3, 0.2), (FRAC_PI_2, FRAC_PI_4), (PI, -1.0), (2.5, 3.0)] {
            let once = ModeTransform::waveplate(xy("a"), phi, theta).unwrap();
            let twice = ModeTransform::waveplate(xy("a"), 2.0 * phi, theta).unwrap();
            let composed = once.matrix().mul(once.matrix());
            assert!(composed.max_abs_difference(twice.matrix()) < 1e-12);
        }
    }

    #[test]
    fn half_wave_plate_at_45_swaps_x_and_y() {
        let m = ModeTransform::waveplate(xy("a"), PI, FRAC_PI_4).unwrap();
        assert!((m.matrix().get(1, 0) - 1.0).norm() < 1e-15);
        assert!(m.matrix().get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn rotation_inverse_is_identity() {
        let fwd = ModeTransform::polarization_rotation(xy("a"), 0.9).unwrap();
        let back = ModeTransform::polarization_rotation([fwd.out_modes()[0].clone(), fwd.out_modes()[1].clone()], -0.9)
            .unwrap();
        assert_eq!(back.out_modes(), &xy("a"));
        assert!(back.matrix().mul(fwd.matrix()).max_abs_difference(&Matrix::identity(2)) < 1e-15);
        let zero = ModeTransform::polarization_rotation(xy("a"), 0.0).unwrap();
        assert_eq!(zero.matrix(), &Matrix::identity(2));
    }

    #[test]
    fn single_photon_rotation_sign_convention() {
        let r = ModeTransform::polarization_rotation(xy("a"), FRAC_PI_4).unwrap();
        assert!((r.matrix().get(0, 0) - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((r.matrix().get(1, 0) + FRAC_1_SQRT_2).norm() < 1e-15);
    }

    #[test]
    fn pbs_after_counter_rotation_matches_aligned_pbs() {
        for &theta in &[0.1, FRAC_PI_4, 1.2, -0.6] {
            let rot = ModeTransform::polarization_rotation(xy("a"), -theta).unwrap();
            let pbs = ModeTransform::pbs(
                [rot.out_modes()[0].clone(), rot.out_modes()[1].clone()],
                "t",
                "r",
                theta,
            )
            .unwrap();
            let aligned = ModeTransform::pbs(xy("a"), "t", "r", 0.0).unwrap();
            assert!(pbs.matrix().mul(rot.matrix()).max_abs_difference(aligned.matrix()) < 1e-12);
        }
    }

    #[test]
    fn pbs_layout_errors() {
        assert!(ModeTransform::pbs(xy("a"), "a", "r", 0.0).is_err());
        assert!(ModeTransform::pbs(xy("a"), "t", "t", 0.0).is_err());
        let bad = [ModeId::new("a", Pol::X), ModeId::new("b", Pol::Y)];
        assert!(ModeTransform::pbs(bad, "t", "r", 0.0).is_err());
    }

    #[test]
    fn phase_shifter_zero_is_identity() {
        let p = ModeTransform::phase_shifter(ModeId::new("a", Pol::X), 0.0);
        assert_eq!(p.matrix(), &Matrix::identity(1));
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = Matrix::from_rows(&[&[c(1.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(
            ModeTransform::from_matrix(xy("a").to_vec(), xy("a").to_vec(), m, ElementKind::Custom),
            Err(ElementError::NotUnitary(_))
        ));
    }
}
