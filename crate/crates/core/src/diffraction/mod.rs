//! Single-photon focusing by a paraboloidal mirror.
//!
//! The mirror surface is `z = (x² + y²)/(4f)` with a circular aperture of
//! radius `R`. A photon leaving a point source at `z1` reaches the image plane
//! at `z2` (with `1/z1 + 1/z2 = 1/f`) along every path through the aperture;
//! each path contributes `exp(i 2π L / λ)`. In the paraxial limit the sum
//! becomes the Fourier integral of the aperture,
//!
//! ```text
//! A(x̃, ỹ) = ∬_{r ≤ R} exp(−i 2π (x̃ x + ỹ y) / (λ z2)) dx dy
//!         = R J1(2π R ρ̃ / (λ z2)) / (ρ̃ / (λ z2)),
//! ```
//!
//! with `(x̃, ỹ)` measured from the geometric image. The leftover quartic
//! term `φ(r) = 2π r⁴ / (32 λ f³)` is a spherical aberration that can be
//! switched into the integrand. The constant phase from the source and image
//! positions is dropped; amplitudes are raw integrals in m².

pub mod bessel;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use bessel::{j0, j1, J1_FIRST_ZERO};
use quadrature::GaussLegendre;

/// Radial nodes for circularly symmetric integrals.
pub const DEFAULT_RADIAL_NODES: usize = 256;
/// Largest relative change allowed when the node count is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffractionError {
    #[error("invalid mirror geometry: {0}")]
    InvalidGeometry(String),
    #[error("point ({0}, {1}) lies outside the aperture")]
    OutsideAperture(f64, f64),
    #[error("source in the focal plane images to infinity")]
    ImageAtInfinity,
    #[error("radial coordinate {0} outside [0, R]")]
    RadiusOutOfRange(f64),
    #[error("quadrature did not converge: doubling nodes changed the result by {0:e} (relative)")]
    NonConvergent(f64),
}

/// A point in space, metres.
pub type Point3 = [f64; 3];

/// Mirror, wavelength and conjugate planes, all in metres.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorGeometry {
    focal: f64,
    aperture: f64,
    wavelength: f64,
    z1: f64,
    z2: f64,
    source: (f64, f64),
}

fn positive(name: &str, v: f64) -> Result<(), DiffractionError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(DiffractionError::InvalidGeometry(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Image-plane distance for an object at `z1`: `1/(1/f − 1/z1)`.
pub fn image_distance(z1: f64, focal: f64) -> Result<f64, DiffractionError> {
    let inv = 1.0 / focal - 1.0 / z1;
    if inv == 0.0 || z1 == focal {
        return Err(DiffractionError::ImageAtInfinity);
    }
    Ok(1.0 / inv)
}

/// Geometric image of a source at `(x1, y1, z1)`: `−(z2/z1)(x1, y1)`.
pub fn geometric_image_point(source: (f64, f64), z1: f64, z2: f64) -> (f64, f64) {
    let m = -z2 / z1;
    (m * source.0, m * source.1)
}

impl MirrorGeometry {
    /// Geometry with the image plane derived from the object distance.
    pub fn new(focal: f64, aperture: f64, wavelength: f64, z1: f64) -> Result<Self, DiffractionError> {
        positive("focal length", focal)?;
        positive("aperture radius", aperture)?;
        positive("wavelength", wavelength)?;
        positive("object distance", z1)?;
        let z2 = image_distance(z1, focal)?;
        positive("image distance", z2)?;
        Ok(MirrorGeometry {
            focal,
            aperture,
            wavelength,
            z1,
            z2,
            source: (0.0, 0.0),
        })
    }

    /// Geometry with the object plane derived from the image distance.
    pub fn from_image_distance(focal: f64, aperture: f64, wavelength: f64, z2: f64) -> Result<Self, DiffractionError> {
        positive("image distance", z2)?;
        let z1 = image_distance(z2, focal)?;
        let mut g = Self::new(focal, aperture, wavelength, z1)?;
        g.z2 = z2;
        Ok(g)
    }

    pub fn with_source(mut self, x1: f64, y1: f64) -> Self {
        self.source = (x1, y1);
        self
    }

    pub fn focal(&self) -> f64 {
        self.focal
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn source(&self) -> (f64, f64) {
        self.source
    }

    pub fn numerical_aperture(&self) -> f64 {
        self.aperture / self.focal
    }

    /// Paraboloid coefficient `α = 1/(4f)`.
    pub fn alpha(&self) -> f64 {
        0.25 / self.focal
    }

    /// Radius of the first dark ring, `3.8317·λ z2 / (2π R)`.
    pub fn airy_radius(&self) -> f64 {
        J1_FIRST_ZERO * self.wavelength * self.z2 / (2.0 * PI * self.aperture)
    }

    /// Source and geometric image as points.
    pub fn source_point(&self) -> Point3 {
        [self.source.0, self.source.1, self.z1]
    }

    pub fn image_point(&self) -> Point3 {
        let (x, y) = geometric_image_point(self.source, self.z1, self.z2);
        [x, y, self.z2]
    }

    fn check_aperture(&self, x: f64, y: f64) -> Result<(), DiffractionError> {
        if x * x + y * y > self.aperture * self.aperture * (1.0 + 1e-12) {
            return Err(DiffractionError::OutsideAperture(x, y));
        }
        Ok(())
    }

    fn sag(&self, x: f64, y: f64) -> f64 {
        self.alpha() * (x * x + y * y)
    }
}

fn distance(a: Point3, b: Point3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Exact source → mirror → observer path length.
pub fn exact_path_length(
    r1: Point3,
    mirror: (f64, f64),
    r2: Point3,
    geometry: &MirrorGeometry,
) -> Result<f64, DiffractionError> {
    let (x, y) = mirror;
    geometry.check_aperture(x, y)?;
    let r = [x, y, geometry.sag(x, y)];
    Ok(distance(r1, r) + distance(r, r2))
}

/// Path length with each square root expanded to first order,
///
/// `z1 + z2 + (x1²+y1²)/(2z1) + (x2²+y2²)/(2z2) − (x1/z1 + x2/z2)x − (y1/z1 + y2/z2)y
///  + ½(1/z1 + 1/z2)(x² + y² + z²) − 2z`, with `z` the mirror sag.
pub fn paraxial_path_length(
    r1: Point3,
    mirror: (f64, f64),
    r2: Point3,
    geometry: &MirrorGeometry,
) -> Result<f64, DiffractionError> {
    let (x, y) = mirror;
    geometry.check_aperture(x, y)?;
    let z = geometry.sag(x, y);
    let [x1, y1, z1] = r1;
    let [x2, y2, z2] = r2;
    Ok(
        z1 + z2 + (x1 * x1 + y1 * y1) / (2.0 * z1) + (x2 * x2 + y2 * y2) / (2.0 * z2)
            - (x1 / z1 + x2 / z2) * x
            - (y1 / z1 + y2 / z2) * y
            + 0.5 * (1.0 / z1 + 1.0 / z2) * (x * x + y * y + z * z)
            - 2.0 * z,
    )
}

/// Spherical-aberration phase `2π r⁴ / (32 λ f³)` at radius `rho`.
pub fn aberration_phase(rho: f64, geometry: &MirrorGeometry) -> Result<f64, DiffractionError> {
    if !(0.0..=geometry.aperture * (1.0 + 1e-12)).contains(&rho) {
        return Err(DiffractionError::RadiusOutOfRange(rho));
    }
    let f = geometry.focal;
    Ok(2.0 * PI * rho.powi(4) / (32.0 * geometry.wavelength * f * f * f))
}

/// Aberration at the rim in terms of the numerical aperture,
/// `(π/16)(f/λ)·NA⁴`.
pub fn rim_aberration_phase(geometry: &MirrorGeometry) -> f64 {
    PI / 16.0 * (geometry.focal / geometry.wavelength) * geometry.numerical_aperture().powi(4)
}

/// Closed-form focal amplitude at radial offset `rho2` from the geometric
/// image: `R J1(2πRρ̃/(λz2)) / (ρ̃/(λz2))`, equal to `πR²` at the centre.
pub fn airy_amplitude_closed(rho2: f64, geometry: &MirrorGeometry) -> f64 {
    let r = geometry.aperture;
    if rho2 == 0.0 {
        return PI * r * r;
    }
    let scale = rho2 / (geometry.wavelength * geometry.z2);
    r * j1(2.0 * PI * r * scale) / scale
}

/// `2π ∫₀^R e^{iφ(r)} J0(k ρ̃ r) r dr` with `k = 2π/(λ z2)`.
pub fn focal_amplitude_radial(
    rho2: f64,
    geometry: &MirrorGeometry,
    include_aberration: bool,
    nodes: usize,
) -> Complex64 {
    let k = 2.0 * PI / (geometry.wavelength * geometry.z2);
    let rule = GaussLegendre::new(nodes);
    let sum: Complex64 = rule
        .mapped(0.0, geometry.aperture)
        .map(|(r, w)| {
            let phase = if include_aberration {
                2.0 * PI * r.powi(4) / (32.0 * geometry.wavelength * geometry.focal.powi(3))
            } else {
                0.0
            };
            Complex64::from_polar(w * r * j0(k * rho2 * r), phase)
        })
        .sum();
    sum * (2.0 * PI)
}

/// The aperture integral in polar coordinates with a tensor-product rule,
/// `∫₀^R ∫₀^{2π} e^{i(φ(r) − k(x̃ r cos θ + ỹ r sin θ))} r dθ dr`.
pub fn focal_amplitude_disc(
    position: (f64, f64),
    geometry: &MirrorGeometry,
    include_aberration: bool,
    nodes: usize,
) -> Complex64 {
    let k = 2.0 * PI / (geometry.wavelength * geometry.z2);
    let rule = GaussLegendre::new(nodes);
    let angles: Vec<(f64, f64, f64)> = rule
        .mapped(0.0, 2.0 * PI)
        .map(|(t, w)| {
            let (s, c) = t.sin_cos();
            (c, s, w)
        })
        .collect();
    let (xt, yt) = position;
    let mut total = Complex64::new(0.0, 0.0);
    for (r, wr) in rule.mapped(0.0, geometry.aperture) {
        let base = if include_aberration {
            2.0 * PI * r.powi(4) / (32.0 * geometry.wavelength * geometry.focal.powi(3))
        } else {
            0.0
        };
        let ring: Complex64 = angles
            .iter()
            .map(|&(c, s, wt)| Complex64::from_polar(wt, base - k * r * (xt * c + yt * s)))
            .sum();
        total += ring * (wr * r);
    }
    total
}

fn converged(coarse: Complex64, fine: Complex64, scale: f64) -> Result<Complex64, DiffractionError> {
    let rel = (fine - coarse).norm() / scale;
    if rel > CONVERGENCE_TOLERANCE {
        return Err(DiffractionError::NonConvergent(rel));
    }
    Ok(fine)
}

/// Focal amplitude at `(x̃, ỹ)` by numerical quadrature. Without aberration
/// the radial rule is used; with it, the polar rule over the disc. Either way
/// the node count is doubled once and the change, measured against the peak
/// value `πR²`, must stay below [`CONVERGENCE_TOLERANCE`].
pub fn focal_amplitude_quadrature(
    position: (f64, f64),
    geometry: &MirrorGeometry,
    include_aberration: bool,
) -> Result<Complex64, DiffractionError> {
    focal_amplitude_with_nodes(position, geometry, include_aberration, DEFAULT_RADIAL_NODES)
}

/// As [`focal_amplitude_quadrature`] with `radial_nodes` radial nodes; the
/// disc rule uses half as many per axis.
pub fn focal_amplitude_with_nodes(
    position: (f64, f64),
    geometry: &MirrorGeometry,
    include_aberration: bool,
    radial_nodes: usize,
) -> Result<Complex64, DiffractionError> {
    let scale = PI * geometry.aperture * geometry.aperture;
    if include_aberration {
        let n = (radial_nodes / 2).max(8);
        let coarse = focal_amplitude_disc(position, geometry, true, n);
        let fine = focal_amplitude_disc(position, geometry, true, 2 * n);
        converged(coarse, fine, scale).map(|_| coarse)
    } else {
        let n = radial_nodes.max(8);
        let rho2 = position.0.hypot(position.1);
        let coarse = focal_amplitude_radial(rho2, geometry, false, n);
        let fine = focal_amplitude_radial(rho2, geometry, false, 2 * n);
        converged(coarse, fine, scale).map(|_| coarse)
    }
}

/// One sample of the focal-plane amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldSample {
    pub rho2_m: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Amplitude at `n_samples` uniformly spaced radii in `[0, r_max]`.
pub fn airy_profile(
    geometry: &MirrorGeometry,
    n_samples: usize,
    r_max: f64,
    include_aberration: bool,
) -> Result<Vec<FieldSample>, DiffractionError> {
    airy_profile_with_nodes(geometry, n_samples, r_max, include_aberration, DEFAULT_RADIAL_NODES)
}

pub fn airy_profile_with_nodes(
    geometry: &MirrorGeometry,
    n_samples: usize,
    r_max: f64,
    include_aberration: bool,
    radial_nodes: usize,
) -> Result<Vec<FieldSample>, DiffractionError> {
    if !(r_max.is_finite() && r_max >= 0.0) {
        return Err(DiffractionError::InvalidGeometry(format!(
            "profile extent {r_max} must be non-negative"
        )));
    }
    let step = if n_samples > 1 {
        r_max / (n_samples - 1) as f64
    } else {
        0.0
    };
    (0..n_samples)
        .map(|i| {
            let rho = step * i as f64;
            let a = focal_amplitude_with_nodes((rho, 0.0), geometry, include_aberration, radial_nodes)?;
            Ok(FieldSample {
                rho2_m: rho,
                re: a.re,
                im: a.im,
                abs: a.norm(),
            })
        })
        .collect()
}
