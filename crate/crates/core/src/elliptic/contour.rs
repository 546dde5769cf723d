//! Argument-principle integrals of `f'/f`.

use core::f64::consts::PI;

use num_complex::Complex64;

use super::Result;

const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// `(1/2 pi i) ∮ f'/f` and `(1/2 pi i) ∮ u f'/f`: the number of zeros inside
/// the contour and their sum (poles count negatively).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMoments {
    pub count: Complex64,
    pub sum: Complex64,
}

/// Moments over the boundary of the parallelogram with vertices
/// `corner, corner + 1, corner + 1 + tau, corner + tau`, using composite
/// 8-point Gauss-Legendre with `panels` panels per edge. `f` returns
/// `(value, derivative)`.
pub fn parallelogram_moments<F>(f: F, corner: Complex64, tau: Complex64, panels: usize) -> Result<ZeroMoments>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let one = Complex64::new(1.0, 0.0);
    let vertices = [corner, corner + one, corner + one + tau, corner + tau, corner];
    let mut count = Complex64::new(0.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let panels = panels.max(1);
    for edge in vertices.windows(2) {
        let (a, b) = (edge[0], edge[1]);
        let step = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + step * (p as f64 + 0.5);
            let half = step * 0.5;
            for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                for z in [mid + half * x, mid - half * x] {
                    let (v, d) = f(z)?;
                    let g = d / v * half * w;
                    count += g;
                    sum += g * z;
                }
            }
        }
    }
    let scale = Complex64::new(0.0, 2.0 * PI);
    Ok(ZeroMoments { count: count / scale, sum: sum / scale })
}

/// `(1/2 pi i) ∮ f'/f` over the circle `|z - center| = radius`, trapezoid
/// rule with `samples` points.
pub fn winding_number<F>(f: F, center: Complex64, radius: f64, samples: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..samples {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
        let (v, d) = f(center + e * radius)?;
        acc += d / v * e * radius;
    }
    Ok(acc / samples as f64)
}
