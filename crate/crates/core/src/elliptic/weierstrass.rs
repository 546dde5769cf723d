//! Weierstrass `wp` for the lattice `Z + Z tau`.
//!
//! `wp = -(log [u])'' + c(tau)` and `wp' = -(log [u])'''` come straight from
//! the theta series; higher derivatives are reduced to `P(wp) + wp' Q(wp)`
//! with the differential equation `wp'^2 = 4 wp^3 - g2 wp - g3`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::{theta, EllipticError, Result, TorusModulus, POLE_TOL};

/// `(g2, g3)` from the Eisenstein series `E4`, `E6` in `Q = exp(2 pi i tau)`.
pub fn eisenstein_invariants(tau: Complex64) -> (Complex64, Complex64) {
    let big_q = (2.0 * PI * Complex64::i() * tau).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..2000 {
        qn *= big_q;
        let nf = n as f64;
        let r = qn / (1.0 - qn);
        let t4 = r * (240.0 * Float::powi(nf, 3));
        let t6 = r * (504.0 * Float::powi(nf, 5));
        e4 += t4;
        e6 -= t6;
        if t6.norm() < 1e-18 && n > 2 {
            break;
        }
    }
    let p4 = Float::powi(PI, 4);
    let p6 = Float::powi(PI, 6);
    (e4 * (4.0 * p4 / 3.0), e6 * (8.0 * p6 / 27.0))
}

/// `wp^{(order)}(u)`.
pub fn wp(m: &TorusModulus, u: Complex64, order: usize) -> Result<Complex64> {
    Ok(wp_derivatives(m, u, order)?[order])
}

/// `[wp(u), wp'(u), ..., wp^{(max_order)}(u)]`.
pub fn wp_derivatives(m: &TorusModulus, u: Complex64, max_order: usize) -> Result<Vec<Complex64>> {
    if !u.re.is_finite() || !u.im.is_finite() {
        return Err(EllipticError::NonFinite(u));
    }
    if m.lattice_distance(u) < POLE_TOL {
        return Err(EllipticError::Pole(u));
    }
    let (z0, _, _) = m.reduce_centered(u);
    let d = theta::series(m, z0);
    let l1 = d[1] / d[0];
    let l2 = d[2] / d[0];
    let l3 = d[3] / d[0];
    let log2 = l2 - l1 * l1;
    let log3 = l3 - 3.0 * l2 * l1 + 2.0 * l1 * l1 * l1;
    let x = -log2 + m.wp_offset();
    let y = -log3;
    let mut out = vec![x];
    if max_order >= 1 {
        out.push(y);
    }
    if max_order >= 2 {
        // order 1: P = 0, Q = 1
        let mut p: Vec<Complex64> = vec![];
        let mut q: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
        for _ in 2..=max_order {
            let (np, nq) = differentiate(&p, &q, m.g2(), m.g3());
            p = np;
            q = nq;
            out.push(eval(&p, x) + y * eval(&q, x));
        }
    }
    Ok(out)
}

// d/du [P(wp) + wp' Q(wp)] = wp' P'(wp) + (6 wp^2 - g2/2) Q + (4 wp^3 - g2 wp - g3) Q'
fn differentiate(p: &[Complex64], q: &[Complex64], g2: Complex64, g3: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let one = Complex64::new(1.0, 0.0);
    let wpp = [-g2 / 2.0, Complex64::new(0.0, 0.0), 6.0 * one];
    let cubic = [-g3, -g2, Complex64::new(0.0, 0.0), 4.0 * one];
    let new_p = add(&mul(&wpp, q), &mul(&cubic, &deriv(q)));
    (new_p, deriv(p))
}

fn eval(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn deriv(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len().max(b.len())];
    for (k, &x) in a.iter().enumerate() {
        out[k] += x;
    }
    for (k, &x) in b.iter().enumerate() {
        out[k] += x;
    }
    out
}
