//! Torus parameters of a configuration and their transformation under the
//! Weyl group.
//!
//! A configuration on an embedded elliptic curve is recorded by the points
//! `u_1..u_m` with `iota(u_i) = P_i` and by `v` with `(n+1) v` the sum of a
//! hyperplane section. Values are raw complex representatives; they are
//! reduced only when compared, so affine updates never flip branches.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::elliptic::{EllipticEmbedding, EllipticError, TorusModulus, TorusPoint, POLE_TOL};
use crate::lattice::{word_pullback, ActionMatrix, LatticeError, LatticeSignature, WeylWord};
use crate::Error;

type Result<T> = core::result::Result<T, Error>;

/// Which embedding the parameters refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    Weierstrass,
    Kmnoy { eps: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusParams {
    sig: LatticeSignature,
    modulus: TorusModulus,
    u: Vec<Complex64>,
    kind: ParamKind,
}

impl TorusParams {
    /// Weierstrass parameters; `v = 0`.
    pub fn weierstrass(sig: LatticeSignature, modulus: TorusModulus, u: Vec<Complex64>) -> Result<Self> {
        Self::build(sig, modulus, u, ParamKind::Weierstrass)
    }

    pub fn kmnoy(sig: LatticeSignature, modulus: TorusModulus, u: Vec<Complex64>, eps: Complex64) -> Result<Self> {
        if modulus.lattice_distance(eps) < POLE_TOL {
            return Err(EllipticError::Parameter(format!("eps = {eps} lies on the lattice")).into());
        }
        Self::build(sig, modulus, u, ParamKind::Kmnoy { eps })
    }

    fn build(sig: LatticeSignature, modulus: TorusModulus, u: Vec<Complex64>, kind: ParamKind) -> Result<Self> {
        if u.len() != sig.m() {
            return Err(EllipticError::SizeMismatch { expected: sig.m(), got: u.len() }.into());
        }
        for i in 0..u.len() {
            if !u[i].re.is_finite() || !u[i].im.is_finite() {
                return Err(EllipticError::NonFinite(u[i]).into());
            }
            for j in 0..i {
                if modulus.lattice_distance(u[i] - u[j]) < POLE_TOL {
                    return Err(EllipticError::Parameter(format!("u_{} and u_{} coincide on the torus", j + 1, i + 1)).into());
                }
            }
        }
        Ok(Self { sig, modulus, u, kind })
    }

    pub fn sig(&self) -> LatticeSignature {
        self.sig
    }

    pub fn modulus(&self) -> &TorusModulus {
        &self.modulus
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    /// `u_1..u_m` as raw representatives.
    pub fn u(&self) -> &[Complex64] {
        &self.u
    }

    pub fn eps(&self) -> Option<Complex64> {
        match self.kind {
            ParamKind::Kmnoy { eps } => Some(eps),
            ParamKind::Weierstrass => None,
        }
    }

    /// `(n+1) v`, undivided.
    pub fn v_times_rank(&self) -> Complex64 {
        match self.kind {
            ParamKind::Weierstrass => Complex64::new(0.0, 0.0),
            ParamKind::Kmnoy { eps } => eps + self.u[..=self.sig.n()].iter().sum::<Complex64>(),
        }
    }

    pub fn v(&self) -> TorusPoint {
        self.modulus.point(self.v_times_rank() / (self.sig.n() as f64 + 1.0))
    }

    pub fn embedding(&self) -> Result<EllipticEmbedding> {
        let n = self.sig.n();
        Ok(match self.kind {
            ParamKind::Weierstrass => EllipticEmbedding::weierstrass(self.modulus, n)?,
            ParamKind::Kmnoy { eps } => EllipticEmbedding::kmnoy(self.modulus, self.u[..=n].to_vec(), eps)?,
        })
    }

    /// Images `iota(u_i)` of all marked points.
    pub fn points(&self) -> Result<Vec<Vec<Complex64>>> {
        Ok(self.embedding()?.embed_all(&self.u)?)
    }

    /// Equality of all parameters modulo the lattice.
    pub fn torus_distance(&self, other: &TorusParams) -> f64 {
        let mut d = self.u.iter().zip(&other.u).map(|(a, b)| self.modulus.lattice_distance(a - b)).fold(0.0, f64::max);
        if let (Some(a), Some(b)) = (self.eps(), other.eps()) {
            d = d.max(self.modulus.lattice_distance(a - b));
        }
        d
    }
}

/// Points predicted by a pull-back matrix `b`: returns `u'` and `(n+1) v'`.
///
/// `u_i' = b_i^0 (n+1) v + sum_j b_i^j u_j` and likewise for `v'` with the
/// coefficients of `E`.
pub fn predict_points(b: &ActionMatrix, params: &TorusParams) -> Result<(Vec<Complex64>, Complex64)> {
    if b.sig() != params.sig {
        return Err(LatticeError::SignatureMismatch.into());
    }
    let nv = params.v_times_rank();
    let image = |k: usize| -> Complex64 {
        let col = b.b_row(k);
        let mut acc = nv * col[0] as f64;
        for (j, &c) in col.iter().enumerate().skip(1) {
            acc += params.u[j - 1] * c as f64;
        }
        acc
    };
    let u = (1..=params.sig.m()).map(image).collect();
    Ok((u, image(0)))
}

/// `(n+1) s = (n+1) v' - (n+1) v`, undivided.
pub fn shift_s(b: &ActionMatrix, params: &TorusParams) -> Result<Complex64> {
    let (_, nv) = predict_points(b, params)?;
    Ok(nv - params.v_times_rank())
}

/// The closed-form shift of a Weierstrass generator step:
/// `-(n-1)/(n+1) sum_{j <= n+1} u_j` for the Cremona generator, `0` for swaps.
pub fn weierstrass_shift(g: usize, params: &TorusParams) -> Result<Complex64> {
    params.sig.check_generator(g)?;
    let n = params.sig.n();
    if g != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sum: Complex64 = params.u[..=n].iter().sum();
    Ok(-sum * ((n as f64 - 1.0) / (n as f64 + 1.0)))
}

/// One generator on Weierstrass parameters. Returns the new parameters
/// (already translated by `-s` so that `v` stays `0`) and `s`.
pub fn weierstrass_step(g: usize, params: &TorusParams) -> Result<(TorusParams, Complex64)> {
    if params.kind != ParamKind::Weierstrass {
        return Err(EllipticError::Parameter("expected Weierstrass parameters".into()).into());
    }
    let s = weierstrass_shift(g, params)?;
    let mut u = params.u.clone();
    if g == 0 {
        let n = params.sig.n();
        let sum: Complex64 = params.u[..=n].iter().sum();
        for x in &mut u[..=n] {
            *x -= sum;
        }
        for x in &mut u {
            *x -= s;
        }
    } else {
        u.swap(g - 1, g);
    }
    Ok((TorusParams { u, ..params.clone() }, s))
}

/// One generator on KMNOY parameters (the translation part is trivial).
pub fn kmnoy_step(g: usize, params: &TorusParams) -> Result<TorusParams> {
    let ParamKind::Kmnoy { eps } = params.kind else {
        return Err(EllipticError::Parameter("expected KMNOY parameters".into()).into());
    };
    params.sig.check_generator(g)?;
    let n = params.sig.n();
    let mut u = params.u.clone();
    let mut eps = eps;
    if g == 0 {
        for x in &mut u[..=n] {
            *x += eps;
        }
        eps = -eps;
    } else {
        if g == n + 1 {
            eps += u[n] - u[n + 1];
        }
        u.swap(g - 1, g);
    }
    Ok(TorusParams { u, kind: ParamKind::Kmnoy { eps }, ..params.clone() })
}

/// Left-to-right composition of [`kmnoy_step`].
pub fn kmnoy_word(word: &WeylWord, params: &TorusParams) -> Result<TorusParams> {
    word.validate(params.sig)?;
    let mut cur = params.clone();
    for &g in word.letters() {
        cur = kmnoy_step(g, &cur)?;
    }
    Ok(cur)
}

/// Parameters after each prefix of a word, with the per-generator shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `states[0]` is the input; `states[k]` follows the first `k` letters.
    pub states: Vec<TorusParams>,
    pub shifts: Vec<Complex64>,
}

impl Trajectory {
    pub fn end(&self) -> &TorusParams {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// Sum of the per-generator shifts. Translations commute, so a general
    /// point `t` ends at `t - total_shift`.
    pub fn total_shift(&self) -> Complex64 {
        self.shifts.iter().sum()
    }
}

/// Composes generator steps for either kind of parameters.
pub fn word_trajectory(word: &WeylWord, params: &TorusParams) -> Result<Trajectory> {
    word.validate(params.sig)?;
    let mut states = Vec::with_capacity(word.len() + 1);
    let mut shifts = Vec::with_capacity(word.len());
    states.push(params.clone());
    for &g in word.letters() {
        let cur = states.last().expect("non-empty");
        let (next, s) = match cur.kind {
            ParamKind::Weierstrass => weierstrass_step(g, cur)?,
            ParamKind::Kmnoy { .. } => (kmnoy_step(g, cur)?, Complex64::new(0.0, 0.0)),
        };
        states.push(next);
        shifts.push(s);
    }
    Ok(Trajectory { states, shifts })
}

/// Lattice prediction for a whole word: `u'` and `(n+1) v'` from the
/// pull-back matrix.
pub fn predict_word(word: &WeylWord, params: &TorusParams) -> Result<(Vec<Complex64>, Complex64)> {
    let b = word_pullback(params.sig, word)?;
    predict_points(&b, params)
}
