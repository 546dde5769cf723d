//! End-to-end checks that the geometric action on point configurations agrees
//! with the torus action, up to a projective map `G`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::config::{apply_generator, apply_word, fit_pgl, genericity_check, pgl_residual, solve_pgl, PointConfig, Tolerances};
use crate::elliptic::{theta, translation_between, EllipticEmbedding, TorusModulus, TorusPoint};
use crate::lattice::{LatticeSignature, WeylWord};
use crate::linalg::{projective_distance, projective_matrix_distance, CMatrix, Scalar};
use crate::torus::{kmnoy_step, predict_word, weierstrass_step, word_trajectory, ParamKind, TorusParams};
use crate::Error;

type Result<T> = core::result::Result<T, Error>;

/// Tolerances used by the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    pub config: Tolerances,
    /// Pass threshold for [`VerificationReport::max_residual`].
    pub residual: f64,
    /// Rejection threshold on the smallest scaled minor when sampling.
    pub min_genericity: f64,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self { config: Tolerances::default(), residual: 1e-6, min_genericity: 1e-6 }
    }
}

/// Which flavour of parameters to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Weierstrass,
    Kmnoy,
}

fn uniform_point<R: Rng + ?Sized>(m: &TorusModulus, rng: &mut R) -> Complex64 {
    m.from_coords(rng.gen::<f64>(), rng.gen::<f64>())
}

/// Points of the fundamental domain, uniformly distributed.
pub fn random_points<R: Rng + ?Sized>(m: &TorusModulus, count: usize, rng: &mut R) -> Vec<Complex64> {
    (0..count).map(|_| uniform_point(m, rng)).collect()
}

/// Random parameters whose embedded configuration is generic, by rejection.
pub fn sample_params<R: Rng + ?Sized>(
    sig: LatticeSignature,
    modulus: TorusModulus,
    kind: SampleKind,
    opts: &HarnessOptions,
    rng: &mut R,
) -> Result<TorusParams> {
    let mut last = None;
    for _ in 0..1000 {
        let u = random_points(&modulus, sig.m(), rng);
        let eps = uniform_point(&modulus, rng);
        let params = match kind {
            SampleKind::Weierstrass => TorusParams::weierstrass(sig, modulus, u),
            SampleKind::Kmnoy => TorusParams::kmnoy(sig, modulus, u, eps),
        };
        let Ok(params) = params else { continue };
        let cfg = PointConfig::new(sig, CMatrix::from_columns(&params.points()?))?;
        let report = genericity_check(&cfg, &opts.config);
        if report.min_scaled_minor > opts.min_genericity {
            return Ok(params);
        }
        last = Some(report.min_scaled_minor);
    }
    Err(Error::InvalidParams(alloc::format!("no generic sample found; best smallest minor {:?}", last)))
}

/// Configuration `(iota(u_1), ..., iota(u_m))` with probe points `iota(t)` as
/// fibers.
pub fn build_config(params: &TorusParams, probes: &[Complex64]) -> Result<PointConfig> {
    let emb = params.embedding()?;
    let cols = emb.embed_all(params.u())?;
    let fibers = emb.embed_all(probes)?;
    Ok(PointConfig::with_fibers(params.sig(), CMatrix::from_columns(&cols), fibers)?)
}

/// Outcome of [`verify_word`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub word: WeylWord,
    /// Translation `s` of each generator step.
    pub shifts: Vec<Complex64>,
    pub total_shift: Complex64,
    /// `G` with `G(P_i') ~ iota'(u_i')`, normalized to max-modulus 1.
    pub g: CMatrix,
    /// Worst projective distance over the `m` marked points used for the fit.
    pub fit_residual: f64,
    /// Worst projective distance over the held-out probes.
    pub probe_residual: f64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Geometric action of `word` versus the composed torus steps.
///
/// The map `G` is fitted on the marked points only; `probes` are general
/// points of the curve, which must land on `iota'(t - s_total)`.
pub fn verify_word(word: &WeylWord, params: &TorusParams, probes: &[Complex64], opts: &HarnessOptions) -> Result<VerificationReport> {
    let cfg = build_config(params, probes)?;
    let image = apply_word(word, &cfg, &opts.config)?;
    let traj = word_trajectory(word, params)?;
    let end = traj.end();
    let s = traj.total_shift();
    let dst = end.points()?;
    let src: Vec<Vec<Scalar>> = image.points().columns().map(<[Scalar]>::to_vec).collect();
    let g = fit_pgl(&src, &dst, &opts.config)?;
    let fit_residual = pgl_residual(&g, &src, &dst);
    let emb = end.embedding()?;
    let mut probe_residual: f64 = 0.0;
    for (x, &t) in image.fibers().iter().zip(probes) {
        let expect = emb.embed(t - s)?;
        probe_residual = probe_residual.max(projective_distance(&g.apply(x), &expect));
    }
    let max_residual = fit_residual.max(probe_residual);
    Ok(VerificationReport {
        word: word.clone(),
        shifts: traj.shifts.clone(),
        total_shift: s,
        g: g.matrix().normalized(),
        fit_residual,
        probe_residual,
        max_residual,
        pass: max_residual <= opts.residual,
    })
}

/// Recovers every translation `S` (mod the lattice) for which some projective
/// map sends the geometric image of a Weierstrass configuration under `word`
/// to `iota(u_i^w - S)` and each probe to `iota(t - S)`. Here `u^w` are the
/// lattice predictions before any normalizing shift. The solutions form a
/// coset of the `(n+1)`-torsion.
pub fn measure_shift(word: &WeylWord, params: &TorusParams, probes: &[Complex64], opts: &HarnessOptions) -> Result<Vec<TorusPoint>> {
    if params.kind() != ParamKind::Weierstrass {
        return Err(Error::InvalidParams("shift measurement needs Weierstrass parameters".into()));
    }
    if probes.is_empty() {
        return Err(Error::InvalidParams("at least one probe is required".into()));
    }
    let m = *params.modulus();
    let emb = params.embedding()?;
    let cfg = build_config(params, probes)?;
    let image = apply_word(word, &cfg, &opts.config)?;
    let (raw, _) = predict_word(word, params)?;
    let src: Vec<Vec<Scalar>> = image.points().columns().map(<[Scalar]>::to_vec).collect();

    // residual map and a holomorphic scalar equation in S
    let fit = |s: Complex64| -> Result<(crate::config::ProjectiveMap, Vec<Vec<Scalar>>)> {
        let dst = raw.iter().map(|&u| emb.embed(u - s)).collect::<core::result::Result<Vec<_>, _>>()?;
        Ok((fit_pgl(&src, &dst, &opts.config)?, dst))
    };
    let h = |s: Complex64| -> Result<Complex64> {
        let (g, _) = fit(s)?;
        let p = g.apply(&image.fibers()[0]);
        let y = emb.embed(probes[0] - s)?;
        Ok(p[1] / p[0] - y[1] / y[0])
    };
    let full_residual = |s: Complex64| -> Result<f64> {
        let (g, dst) = fit(s)?;
        let mut r = pgl_residual(&g, &src, &dst);
        for (x, &t) in image.fibers().iter().zip(probes) {
            r = r.max(projective_distance(&g.apply(x), &emb.embed(t - s)?));
        }
        Ok(r)
    };

    let newton = |mut s: Complex64| -> Option<Complex64> {
        let step = 1e-6;
        for _ in 0..60 {
            let (Ok(f0), Ok(fp), Ok(fm)) = (h(s), h(s + step), h(s - step)) else { return None };
            let delta = f0 / ((fp - fm) / (2.0 * step));
            if !delta.re.is_finite() || !delta.im.is_finite() {
                return None;
            }
            s -= delta;
            if delta.norm() < 1e-13 {
                return matches!(full_residual(s), Ok(r) if r < 1e-9).then_some(s);
            }
        }
        None
    };

    // one root from a coarse grid, then its (n+1)-torsion coset, each polished
    let grid = 12;
    let seed = (0..grid * grid)
        .find_map(|k| newton(m.from_coords(((k / grid) as f64 + 0.5) / grid as f64, ((k % grid) as f64 + 0.5) / grid as f64)));
    let mut found: Vec<TorusPoint> = Vec::new();
    let Some(seed) = seed else { return Ok(found) };
    let r = params.sig().n() + 1;
    for a in 0..r {
        for b in 0..r {
            let start = seed + m.from_coords(a as f64 / r as f64, b as f64 / r as f64);
            let polished = newton(start);
            if let Some(s) = polished {
                let p = m.point(s);
                if !found.iter().any(|q| m.eq_within(q.value(), p.value(), 1e-6)) {
                    found.push(p);
                }
            }
        }
    }
    Ok(found)
}

/// Which closed-form decomposition `G = G_2 G_1` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionCase {
    /// Generator `0` on Weierstrass parameters.
    WeierstrassCremona,
    /// Generator `n+1` on KMNOY parameters.
    KmnoyLastSwap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub g1: CMatrix,
    pub g2: CMatrix,
    /// `G` solved from the point correspondences.
    pub solved: CMatrix,
    /// Entrywise distance between `G_2 G_1` and `solved` after scaling.
    pub distance: f64,
    pub pass: bool,
}

/// Compares the closed-form factors against a solved `G`.
pub fn verify_g_decomposition(
    case: DecompositionCase,
    params: &TorusParams,
    opts: &HarnessOptions,
    tol: f64,
) -> Result<DecompositionReport> {
    let sig = params.sig();
    let n = sig.n();
    let dim = n + 1;
    let cfg = build_config(params, &[])?;
    let (g, end) = match case {
        DecompositionCase::WeierstrassCremona => {
            let (end, _) = weierstrass_step(0, params)?;
            (0, end)
        }
        DecompositionCase::KmnoyLastSwap => (n + 1, kmnoy_step(n + 1, params)?),
    };
    let image = apply_generator(g, &cfg, &opts.config)?;
    let src: Vec<Vec<Scalar>> = image.points().columns().map(<[Scalar]>::to_vec).collect();
    let solved = solve_pgl(&src, &end.points()?, &opts.config)?;
    let (g1, g2) = match case {
        DecompositionCase::WeierstrassCremona => weierstrass_factors(&cfg, params, &end)?,
        DecompositionCase::KmnoyLastSwap => kmnoy_factors(params)?,
    };
    debug_assert_eq!(g1.rows(), dim);
    let product = g2.mul(&g1);
    let distance = projective_matrix_distance(solved.matrix(), &product);
    Ok(DecompositionReport { g1, g2, solved: solved.matrix().normalized(), distance, pass: distance < tol })
}

// G_1 = diag(det A^{(k)}) with column k of the frame replaced by the pole
// image e_n; G_2 = Abar diag(Abar^{-1} iota(-s)).
fn weierstrass_factors(cfg: &PointConfig, params: &TorusParams, end: &TorusParams) -> Result<(CMatrix, CMatrix)> {
    let n = params.sig().n();
    let dim = n + 1;
    let frame: Vec<Vec<Scalar>> = (0..dim).map(|k| cfg.points().column(k).to_vec()).collect();
    let mut pole = vec![Scalar::new(0.0, 0.0); dim];
    pole[n] = Scalar::new(1.0, 0.0);
    let d1: Vec<Scalar> = (0..dim)
        .map(|k| {
            let mut cols = frame.clone();
            cols[k] = pole.clone();
            CMatrix::from_columns(&cols).det()
        })
        .collect();
    let emb = end.embedding()?;
    let (_, s) = weierstrass_step(0, params)?;
    let abar = CMatrix::from_columns(&emb.embed_all(&end.u()[..dim])?);
    let weights = abar.solve(&emb.embed(-s)?).ok_or_else(|| Error::InvalidParams("frame of the new configuration is singular".into()))?;
    Ok((CMatrix::diag(&d1), abar.mul(&CMatrix::diag(&weights))))
}

// r_k = [u_{n+2} - u_k - eps] / [u_{n+2} - u_k]:
// G_1 = diag(-1/r_1, ..., -1/r_n, 1) N, N = I with last column
// (-r_1/r_{n+1}, ..., -r_n/r_{n+1}, 1/r_{n+1});
// G_2 = diag([u_{n+2} - u_k - eps] / [u_{n+1} - u_k], [-eps] / [u_{n+1} - u_{n+2}]).
fn kmnoy_factors(params: &TorusParams) -> Result<(CMatrix, CMatrix)> {
    let n = params.sig().n();
    let m = params.modulus();
    let u = params.u();
    let eps = params.eps().ok_or_else(|| Error::InvalidParams("expected KMNOY parameters".into()))?;
    let th = |z: Complex64| theta::theta(m, z);
    let r: Vec<Scalar> = (0..=n).map(|k| Ok(th(u[n + 1] - u[k] - eps)? / th(u[n + 1] - u[k])?)).collect::<Result<_>>()?;
    let mut nmat = CMatrix::identity(n + 1);
    for k in 0..n {
        nmat.column_mut(n)[k] = -r[k] / r[n];
    }
    nmat.column_mut(n)[n] = r[n].inv();
    let mut left: Vec<Scalar> = r[..n].iter().map(|x| -x.inv()).collect();
    left.push(Scalar::new(1.0, 0.0));
    let g1 = CMatrix::diag(&left).mul(&nmat);
    let mut d2: Vec<Scalar> = (0..n).map(|k| Ok(th(u[n + 1] - u[k] - eps)? / th(u[n] - u[k])?)).collect::<Result<_>>()?;
    d2.push(th(-eps)? / th(u[n] - u[n + 1])?);
    Ok((g1, CMatrix::diag(&d2)))
}

/// Outcome of [`verify_embedding_translation`].
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationReport {
    pub a: TorusPoint,
    pub g: CMatrix,
    /// Worst projective distance on the held-out samples.
    pub residual: f64,
    pub pass: bool,
}

/// Two embeddings of the same torus with the same degree differ by a
/// translation `a` and a projective map: `embed_b(u + a) ~ G embed_a(u)`.
/// `a` comes from the hyperplane-section divisors, `G` from `n + 2` samples,
/// and the check runs on `held_out` further samples.
pub fn verify_embedding_translation<R: Rng + ?Sized>(
    emb_a: &EllipticEmbedding,
    emb_b: &EllipticEmbedding,
    held_out: usize,
    opts: &HarnessOptions,
    tol: f64,
    rng: &mut R,
) -> Result<TranslationReport> {
    if emb_a.n() != emb_b.n() || emb_a.modulus() != emb_b.modulus() {
        return Err(Error::InvalidParams("embeddings differ in dimension or modulus".into()));
    }
    let m = *emb_a.modulus();
    let a = translation_between(&m, &emb_a.reference_divisor(), &emb_b.reference_divisor())?;
    let fit_samples = random_points(&m, emb_a.n() + 2, rng);
    let src = emb_a.embed_all(&fit_samples)?;
    let dst = fit_samples.iter().map(|&u| emb_b.embed(u + a.value())).collect::<core::result::Result<Vec<_>, _>>()?;
    let g = fit_pgl(&src, &dst, &opts.config)?;
    let check = random_points(&m, held_out, rng);
    let mut residual: f64 = 0.0;
    for &u in &check {
        residual = residual.max(projective_distance(&g.apply(&emb_a.embed(u)?), &emb_b.embed(u + a.value())?));
    }
    Ok(TranslationReport { a, g: g.matrix().normalized(), residual, pass: residual < tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(kind: SampleKind, n: usize, m: usize, seed: u64) -> (TorusParams, Vec<Complex64>) {
        let sig = LatticeSignature::new(n, m).unwrap();
        let modulus = TorusModulus::new(c(0.31, 1.17)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_params(sig, modulus, kind, &HarnessOptions::default(), &mut rng).unwrap();
        let probes = random_points(&modulus, 5, &mut rng);
        (p, probes)
    }

    #[test]
    fn identity_word_gives_identity_map() {
        for kind in [SampleKind::Weierstrass, SampleKind::Kmnoy] {
            let (p, probes) = setup(kind, 2, 5, 1);
            let r = verify_word(&WeylWord::identity(), &p, &probes, &HarnessOptions::default()).unwrap();
            assert!(r.max_residual < 1e-12, "{r:?}");
            assert!(projective_matrix_distance(&r.g, &CMatrix::identity(3)) < 1e-12);
        }
    }

    #[test]
    fn generators_pass() {
        for kind in [SampleKind::Weierstrass, SampleKind::Kmnoy] {
            for (n, m) in [(2, 5), (3, 6)] {
                let (p, probes) = setup(kind, n, m, 2);
                for g in 0..m {
                    let r = verify_word(&WeylWord::new(vec![g]), &p, &probes, &HarnessOptions::default()).unwrap();
                    assert!(r.pass, "{kind:?} ({n},{m}) generator {g}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn kmnoy_cremona_map_is_identity() {
        let (p, probes) = setup(SampleKind::Kmnoy, 2, 5, 3);
        let r = verify_word(&WeylWord::new(vec![0]), &p, &probes, &HarnessOptions::default()).unwrap();
        assert!(projective_matrix_distance(&r.g, &CMatrix::identity(3)) < 1e-8, "{:?}", r.g);
    }

    #[test]
    fn measured_shift_contains_closed_form() {
        let (p, probes) = setup(SampleKind::Weierstrass, 2, 5, 4);
        let found = measure_shift(&WeylWord::new(vec![0]), &p, &probes, &HarnessOptions::default()).unwrap();
        let (_, s) = weierstrass_step(0, &p).unwrap();
        let m = p.modulus();
        assert!(found.iter().any(|q| m.eq_within(q.value(), s, 1e-8)), "{found:?} vs {s}");
        assert_eq!(found.len(), 9);
    }

    #[test]
    fn decompositions_match() {
        let (p, _) = setup(SampleKind::Weierstrass, 2, 5, 5);
        let r = verify_g_decomposition(DecompositionCase::WeierstrassCremona, &p, &HarnessOptions::default(), 1e-7).unwrap();
        assert!(r.pass, "{}", r.distance);
        let (p, _) = setup(SampleKind::Kmnoy, 2, 5, 5);
        let r = verify_g_decomposition(DecompositionCase::KmnoyLastSwap, &p, &HarnessOptions::default(), 1e-7).unwrap();
        assert!(r.pass, "{}", r.distance);
    }

    #[test]
    fn translation_between_embeddings() {
        let (p, _) = setup(SampleKind::Kmnoy, 2, 5, 6);
        let emb = p.embedding().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = verify_embedding_translation(&emb, &emb, 20, &HarnessOptions::default(), 1e-7, &mut rng).unwrap();
        assert!(r.pass && r.a.value().norm() < 1e-15);
        assert!(projective_matrix_distance(&r.g, &CMatrix::identity(3)) < 1e-9);
        let q = EllipticEmbedding::weierstrass(*p.modulus(), 2).unwrap();
        let r = verify_embedding_translation(&emb, &q, 20, &HarnessOptions::default(), 1e-7, &mut rng).unwrap();
        assert!(r.pass, "{}", r.residual);
    }
}
