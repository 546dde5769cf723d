//! Numerics on the torus `T = C / (Z + Z tau)`.
//!
//! - [`TorusModulus`] caches the nome and the Weierstrass invariants.
//! - [`theta`] evaluates the odd theta function `[z]` (classical `theta_1(pi z)`),
//!   whose zeros are exactly the lattice points.
//! - [`weierstrass`] builds `wp` and its derivatives from the logarithmic
//!   derivative of `[z]`.
//! - [`embedding`] holds the two degree-`(n+1)` embeddings `T -> P^n`.
//! - [`contour`] integrates logarithmic derivatives along closed contours.

use alloc::string::String;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

pub mod contour;
pub mod embedding;
pub mod theta;
pub mod weierstrass;

pub use embedding::{EllipticEmbedding, EmbeddingKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EllipticError {
    #[error("modulus must satisfy Im tau > {floor}, got tau = {tau}")]
    InvalidModulus { tau: Complex64, floor: f64 },
    #[error("non-finite argument {0}")]
    NonFinite(Complex64),
    #[error("argument {0} is within the pole tolerance of a lattice point")]
    Pole(Complex64),
    #[error("expected {expected} points, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("torus points belong to different moduli")]
    ModulusMismatch,
    #[error("{0}")]
    Parameter(String),
}

pub(crate) type Result<T> = core::result::Result<T, EllipticError>;

/// Default distance below which two torus points are considered equal.
pub const TORUS_TOL: f64 = 1e-8;
/// Default distance to a lattice point below which `wp` reports a pole.
pub const POLE_TOL: f64 = 1e-9;

/// The period `tau` with its cached series data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusModulus {
    tau: Complex64,
    nome: Complex64,
    g2: Complex64,
    g3: Complex64,
    /// `[0]''' / (3 [0]')`, the constant that removes the constant Laurent
    /// term of `-(log [z])''`.
    wp_offset: Complex64,
}

impl TorusModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_floor(tau, 0.0)
    }

    /// Like [`TorusModulus::new`] but rejects `Im tau <= floor`.
    pub fn with_floor(tau: Complex64, floor: f64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= floor.max(0.0) {
            return Err(EllipticError::InvalidModulus { tau, floor: floor.max(0.0) });
        }
        let i = Complex64::i();
        let nome = (i * PI * tau).exp();
        let (g2, g3) = weierstrass::eisenstein_invariants(tau);
        let mut m = Self { tau, nome, g2, g3, wp_offset: Complex64::new(0.0, 0.0) };
        let d = theta::series(&m, Complex64::new(0.0, 0.0));
        m.wp_offset = d[3] / (3.0 * d[1]);
        Ok(m)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// `q = exp(pi i tau)`.
    pub fn nome(&self) -> Complex64 {
        self.nome
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    pub(crate) fn wp_offset(&self) -> Complex64 {
        self.wp_offset
    }

    /// Real coordinates `(a, b)` with `z = a + b tau`.
    pub fn lattice_coords(&self, z: Complex64) -> (f64, f64) {
        let b = z.im / self.tau.im;
        (z.re - b * self.tau.re, b)
    }

    pub fn from_coords(&self, a: f64, b: f64) -> Complex64 {
        Complex64::new(a, 0.0) + self.tau * b
    }

    /// Representative in `{a + b tau : a, b in [0, 1)}`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (a, b) = self.lattice_coords(z);
        let (a, b) = (a - Float::floor(a), b - Float::floor(b));
        // floor can land exactly on 1.0 after subtraction for tiny negatives
        let a = if a >= 1.0 { 0.0 } else { a };
        let b = if b >= 1.0 { 0.0 } else { b };
        self.from_coords(a, b)
    }

    /// Splits `z = z0 + A + B tau` with integer `A, B` and `z0` in the cell
    /// centred at the origin.
    pub fn reduce_centered(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (a, b) = self.lattice_coords(z);
        let bb = Float::round(b);
        let aa = Float::round(a);
        let z0 = self.from_coords(a - aa, b - bb);
        (z0, aa as i64, bb as i64)
    }

    /// Euclidean distance from `z` to the nearest lattice point.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        lattice_distance(self.tau, z)
    }

    pub fn point(&self, z: Complex64) -> TorusPoint {
        TorusPoint { u: self.reduce(z), tau: self.tau }
    }

    /// Equality on the torus within `tol`.
    pub fn eq_within(&self, p: Complex64, q: Complex64, tol: f64) -> bool {
        self.lattice_distance(p - q) < tol
    }
}

/// A point of `T`, stored as its representative in the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    u: Complex64,
    tau: Complex64,
}

impl TorusPoint {
    pub fn value(&self) -> Complex64 {
        self.u
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }
}

/// `p == q` on the torus, using the 9 neighbouring cells to find the nearest
/// lattice translate of `p - q`.
pub fn torus_eq(p: &TorusPoint, q: &TorusPoint, tol: f64) -> Result<bool> {
    if p.tau != q.tau {
        return Err(EllipticError::ModulusMismatch);
    }
    Ok(lattice_distance(p.tau, p.u - q.u) < tol)
}

// Centred reduction first, then the nearest of the 9 neighbouring translates.
fn lattice_distance(tau: Complex64, z: Complex64) -> f64 {
    let b = z.im / tau.im;
    let a = z.re - b * tau.re;
    let z0 = z - Complex64::new(Float::round(a), 0.0) - tau * Float::round(b);
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            best = best.min((z0 + Complex64::new(i as f64, 0.0) + tau * j as f64).norm());
        }
    }
    best
}

/// Translation `a` taking one hyperplane-section divisor to another:
/// `a = (sum(dst) - sum(src)) / len`, principal division, then reduced.
pub fn translation_between(modulus: &TorusModulus, src: &[Complex64], dst: &[Complex64]) -> Result<TorusPoint> {
    if src.len() != dst.len() || src.is_empty() {
        return Err(EllipticError::SizeMismatch { expected: src.len(), got: dst.len() });
    }
    let diff: Complex64 = dst.iter().sum::<Complex64>() - src.iter().sum::<Complex64>();
    Ok(modulus.point(diff / src.len() as f64))
}
