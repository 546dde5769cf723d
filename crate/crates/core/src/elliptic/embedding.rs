//! Degree-`(n+1)` embeddings `T -> P^n`.
//!
//! Both are evaluated through entire "homogenized" coordinate functions:
//!
//! - Weierstrass: `F_0 = [u]^{n+1}`, `F_k = wp^{(k-1)}(u) [u]^{n+1}`.
//! - KMNOY with base points `u_1..u_{n+1}` and parameter `eps`:
//!   `F_k = [u - u_k - eps] prod_{j != k} [u - u_j]`, i.e. the ratios
//!   `[u - u_k - eps] / [u - u_k]` times a common factor.
//!
//! All coordinates of one embedding share their quasi-periodicity factor, so
//! the projective image is well defined on `T`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{theta, weierstrass, EllipticError, Result, TorusModulus, TorusPoint, POLE_TOL};
use crate::linalg::{normalize_max_modulus, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingKind {
    /// `u -> (1 : wp : wp' : ... : wp^{(n-1)})`.
    Weierstrass,
    /// Theta-ratio embedding sending `base[k]` to the `k`-th coordinate point.
    Kmnoy { base: Vec<Complex64>, eps: Complex64 },
    /// `map` applied after `inner`.
    Projected { inner: Box<EllipticEmbedding>, map: CMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticEmbedding {
    n: usize,
    modulus: TorusModulus,
    kind: EmbeddingKind,
}

impl EllipticEmbedding {
    pub fn weierstrass(modulus: TorusModulus, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(EllipticError::Parameter("n must be at least 1".into()));
        }
        Ok(Self { n, modulus, kind: EmbeddingKind::Weierstrass })
    }

    /// `base` holds `u_1, ..., u_{n+1}` as raw representatives.
    pub fn kmnoy(modulus: TorusModulus, base: Vec<Complex64>, eps: Complex64) -> Result<Self> {
        if base.len() < 2 {
            return Err(EllipticError::SizeMismatch { expected: 2, got: base.len() });
        }
        if modulus.lattice_distance(eps) < POLE_TOL {
            return Err(EllipticError::Parameter(format!("eps = {eps} lies on the lattice")));
        }
        for i in 0..base.len() {
            for j in 0..i {
                if modulus.lattice_distance(base[i] - base[j]) < POLE_TOL {
                    return Err(EllipticError::Parameter(format!("base points {} and {} coincide", j + 1, i + 1)));
                }
            }
        }
        Ok(Self { n: base.len() - 1, modulus, kind: EmbeddingKind::Kmnoy { base, eps } })
    }

    pub fn projected(inner: EllipticEmbedding, map: CMatrix) -> Result<Self> {
        let d = inner.n + 1;
        if map.rows() != d || map.cols() != d {
            return Err(EllipticError::SizeMismatch { expected: d, got: map.rows() });
        }
        Ok(Self { n: inner.n, modulus: inner.modulus, kind: EmbeddingKind::Projected { inner: Box::new(inner), map } })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &TorusModulus {
        &self.modulus
    }

    pub fn kind(&self) -> &EmbeddingKind {
        &self.kind
    }

    /// Homogeneous image of `u`, normalized to max-modulus 1.
    pub fn embed(&self, u: Complex64) -> Result<Vec<Complex64>> {
        let (mut v, _) = self.homogeneous(u)?;
        if v.iter().all(|x| x.norm() == 0.0) {
            return Err(EllipticError::Pole(u));
        }
        normalize_max_modulus(&mut v);
        Ok(v)
    }

    /// Images of several points as columns.
    pub fn embed_all(&self, us: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        us.iter().map(|&u| self.embed(u)).collect()
    }

    /// Entire coordinates `F(u) = exp(log_scale) * mantissa`, split so that
    /// large quasi-periodicity factors do not overflow.
    pub fn homogeneous(&self, u: Complex64) -> Result<(Vec<Complex64>, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        match &self.kind {
            EmbeddingKind::Weierstrass => {
                let (z0, _, _) = self.modulus.reduce_centered(u);
                let mut out = vec![zero; self.n + 1];
                if self.modulus.lattice_distance(u) < POLE_TOL {
                    out[self.n] = Complex64::new(1.0, 0.0);
                    return Ok((out, zero));
                }
                // the periodic wp part lets us evaluate the theta power at z0
                let t = theta::series(&self.modulus, z0)[0];
                let tp = t.powu(self.n as u32 + 1);
                out[0] = tp;
                let d = weierstrass::wp_derivatives(&self.modulus, u, self.n - 1)?;
                for (k, x) in d.into_iter().enumerate() {
                    out[k + 1] = x * tp;
                }
                Ok((out, zero))
            }
            EmbeddingKind::Kmnoy { base, eps } => {
                let parts = |z: Complex64| theta::theta_log_parts(&self.modulus, z);
                let common: Vec<(Complex64, Complex64)> = base.iter().map(|&b| parts(u - b)).collect::<Result<_>>()?;
                let mut mant = Vec::with_capacity(base.len());
                let mut logs = Vec::with_capacity(base.len());
                for k in 0..base.len() {
                    let (mk, lk) = parts(u - base[k] - eps)?;
                    let mut m = mk;
                    let mut l = lk;
                    for (j, &(mj, lj)) in common.iter().enumerate() {
                        if j != k {
                            m *= mj;
                            l += lj;
                        }
                    }
                    mant.push(m);
                    logs.push(l);
                }
                let top = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
                let reference = Complex64::new(top, 0.0);
                let out = mant.iter().zip(&logs).map(|(m, l)| m * (l - reference).exp()).collect();
                Ok((out, reference))
            }
            EmbeddingKind::Projected { inner, map } => {
                let (v, s) = inner.homogeneous(u)?;
                Ok((map.mul_vec(&v), s))
            }
        }
    }

    /// Entire coordinates and their `u`-derivatives, unscaled. Intended for
    /// contour integrals over a cell near the origin.
    pub fn homogeneous_with_derivative(&self, u: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = self.n;
        match &self.kind {
            EmbeddingKind::Weierstrass => {
                let (t, dt) = theta::theta_with_derivative(&self.modulus, u)?;
                let p = n as u32 + 1;
                let tp = t.powu(p);
                let dtp = t.powu(p - 1) * dt * p as f64;
                let w = weierstrass::wp_derivatives(&self.modulus, u, n)?;
                let mut val = vec![tp];
                let mut der = vec![dtp];
                for k in 0..n {
                    val.push(w[k] * tp);
                    der.push(w[k + 1] * tp + w[k] * dtp);
                }
                Ok((val, der))
            }
            EmbeddingKind::Kmnoy { base, eps } => {
                let common: Vec<(Complex64, Complex64)> =
                    base.iter().map(|&b| theta::theta_with_derivative(&self.modulus, u - b)).collect::<Result<_>>()?;
                let mut val = Vec::with_capacity(n + 1);
                let mut der = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let mut factors = common.clone();
                    factors[k] = theta::theta_with_derivative(&self.modulus, u - base[k] - eps)?;
                    let v: Complex64 = factors.iter().map(|f| f.0).product();
                    let d: Complex64 = (0..factors.len())
                        .map(|i| factors.iter().enumerate().map(|(j, f)| if i == j { f.1 } else { f.0 }).product::<Complex64>())
                        .sum();
                    val.push(v);
                    der.push(d);
                }
                Ok((val, der))
            }
            EmbeddingKind::Projected { inner, map } => {
                let (v, d) = inner.homogeneous_with_derivative(u)?;
                Ok((map.mul_vec(&v), map.mul_vec(&d)))
            }
        }
    }

    /// `(n+1) v` as an undivided representative: `0` or `eps + sum u_k`.
    pub fn v_times_rank(&self) -> Complex64 {
        match &self.kind {
            EmbeddingKind::Weierstrass => Complex64::new(0.0, 0.0),
            EmbeddingKind::Kmnoy { base, eps } => eps + base.iter().sum::<Complex64>(),
            EmbeddingKind::Projected { inner, .. } => inner.v_times_rank(),
        }
    }

    /// `v` with the principal division by `n + 1`, lattice reduced.
    pub fn base_point_v(&self) -> TorusPoint {
        self.modulus.point(self.v_times_rank() / (self.n as f64 + 1.0))
    }

    /// Zeros of one hyperplane section: those of `F_0` for the two basic
    /// embeddings, and of the inner embedding for projected ones (every
    /// hyperplane section has the same sum modulo the lattice).
    pub fn reference_divisor(&self) -> Vec<Complex64> {
        match &self.kind {
            EmbeddingKind::Weierstrass => vec![Complex64::new(0.0, 0.0); self.n + 1],
            EmbeddingKind::Kmnoy { base, eps } => {
                let mut d = base.clone();
                d[0] += eps;
                d
            }
            EmbeddingKind::Projected { inner, .. } => inner.reference_divisor(),
        }
    }
}
