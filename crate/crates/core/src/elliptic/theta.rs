//! The odd theta function `[z] = theta_1(pi z, q)` with `q = exp(pi i tau)`:
//!
//! `[z] = 2 sum_{k >= 0} (-1)^k q^{(k+1/2)^2} sin((2k+1) pi z)`.
//!
//! Arguments are first reduced to the centred cell and the quasi-periodicity
//! factor is applied in closed form, so the series is only ever summed for
//! `|Im z| <= Im tau / 2`.

use core::f64::consts::PI;

use num_complex::Complex64;

use super::{EllipticError, Result, TorusModulus};

const MAX_TERMS: usize = 400;
const REL_CUTOFF: f64 = 1e-16;

/// `[z0], [z0]', [z0]'', [z0]'''` by direct summation (no reduction).
pub fn series(m: &TorusModulus, z0: Complex64) -> [Complex64; 4] {
    let i = Complex64::i();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    let mut running_max = 0.0f64;
    for k in 0..MAX_TERMS {
        let kf = k as f64 + 0.5;
        let a = 2.0 * kf * PI;
        let weight = (i * PI * m.tau() * kf * kf).exp() * if k % 2 == 0 { 2.0 } else { -2.0 };
        let (s, c) = ((a * z0).sin(), (a * z0).cos());
        let terms = [weight * s, weight * c * a, -weight * s * (a * a), -weight * c * (a * a * a)];
        let size = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        for (x, t) in acc.iter_mut().zip(terms) {
            *x += t;
        }
        running_max = running_max.max(size);
        if k >= 1 && size <= REL_CUTOFF * running_max {
            break;
        }
    }
    acc
}

/// Splits `[z] = exp(log_factor) * mantissa` where `mantissa` is the series at
/// the centred representative (sign included). Useful when products of many
/// theta values would overflow.
pub fn theta_log_parts(m: &TorusModulus, z: Complex64) -> Result<(Complex64, Complex64)> {
    let (mantissa, _, log_factor) = reduced(m, z, false)?;
    Ok((mantissa, log_factor))
}

/// `[z]`.
pub fn theta(m: &TorusModulus, z: Complex64) -> Result<Complex64> {
    let (v, _, lf) = reduced(m, z, false)?;
    Ok(v * lf.exp())
}

/// `([z], [z]')`.
pub fn theta_with_derivative(m: &TorusModulus, z: Complex64) -> Result<(Complex64, Complex64)> {
    let (v, d, lf) = reduced(m, z, true)?;
    let f = lf.exp();
    Ok((v * f, d * f))
}

// [z0 + A + B tau] = (-1)^(A+B) exp(-i pi tau B^2 - 2 pi i B z0) [z0]
fn reduced(m: &TorusModulus, z: Complex64, want_derivative: bool) -> Result<(Complex64, Complex64, Complex64)> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(EllipticError::NonFinite(z));
    }
    let (z0, a, b) = m.reduce_centered(z);
    let i = Complex64::i();
    let bf = b as f64;
    let log_factor = -i * PI * m.tau() * (bf * bf) - 2.0 * PI * i * bf * z0;
    let sign = if (a + b).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let d = series(m, z0);
    let value = d[0] * sign;
    let deriv = if want_derivative { (d[1] - 2.0 * PI * i * bf * d[0]) * sign } else { Complex64::new(0.0, 0.0) };
    Ok((value, deriv, log_factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn moduli() -> [TorusModulus; 3] {
        [TorusModulus::new(c(0.0, 1.0)).unwrap(), TorusModulus::new(c(0.31, 1.17)).unwrap(), TorusModulus::new(c(-0.4, 0.9)).unwrap()]
    }

    #[test]
    fn zero_at_lattice_points() {
        for m in moduli() {
            assert_eq!(theta(&m, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
            let lattice_pt = c(2.0, 0.0) + m.tau() * 3.0;
            let scale = theta(&m, lattice_pt + 0.5).unwrap().norm();
            assert!(theta(&m, lattice_pt).unwrap().norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn odd_and_quasi_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in moduli() {
            let q = m.nome();
            for _ in 0..50 {
                let z = m.from_coords(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let t = theta(&m, z).unwrap();
                assert!((theta(&m, -z).unwrap() + t).norm() < 1e-12);
                assert!((theta(&m, z + 1.0).unwrap() + t).norm() < 1e-12);
                let expect = -t / q * (-2.0 * PI * Complex64::i() * z).exp();
                let got = theta(&m, z + m.tau()).unwrap();
                assert!((got - expect).norm() < 1e-12 * expect.norm().max(1.0));
            }
        }
    }

    #[test]
    fn series_derivatives_match_finite_differences() {
        let m = TorusModulus::new(c(0.31, 1.17)).unwrap();
        let z = c(0.13, 0.21);
        let h = 1e-5;
        let d = series(&m, z);
        let sp = series(&m, z + h);
        let sm = series(&m, z - h);
        for k in 0..3 {
            let fd = (sp[k] - sm[k]) / (2.0 * h);
            assert!((fd - d[k + 1]).norm() < 1e-6 * d[k + 1].norm().max(1.0));
        }
    }

    #[test]
    fn reduced_derivative_matches_finite_difference() {
        let m = TorusModulus::new(c(0.31, 1.17)).unwrap();
        let z = c(1.7, 2.9);
        let h = 1e-6;
        let (_, d) = theta_with_derivative(&m, z).unwrap();
        let fd = (theta(&m, z + h).unwrap() - theta(&m, z - h).unwrap()) / (2.0 * h);
        assert!((fd - d).norm() < 1e-6 * d.norm());
    }

    #[test]
    fn log_parts_recombine() {
        let m = TorusModulus::new(c(0.0, 1.0)).unwrap();
        let z = c(-3.3, 4.2);
        let (v, lf) = theta_log_parts(&m, z).unwrap();
        assert!((v * lf.exp() - theta(&m, z).unwrap()).norm() < 1e-12 * v.norm() * lf.exp().norm());
    }

    #[test]
    fn rejects_non_finite() {
        let m = TorusModulus::new(c(0.0, 1.0)).unwrap();
        assert!(theta(&m, c(f64::NAN, 0.0)).is_err());
    }
}
