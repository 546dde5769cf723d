//! Exact model of the bi-lattice `(H^2, H_2)` of `P^n` blown up at `m` points.
//!
//! Divisor classes are coefficient vectors on the basis `(E, E_1, ..., E_m)`
//! and curve classes on `(e, e_1, ..., e_m)`, paired by
//! `<E, e> = 1`, `<E_i, e_j> = -delta_ij` and zero otherwise. Generator `0` is
//! the reflection in `alpha_0 = E - E_1 - ... - E_{n+1}` and generator `i > 0`
//! the reflection in `alpha_i = E_i - E_{i+1}`.
//!
//! All arithmetic is checked `i128`; coefficients grow exponentially with word
//! length for indefinite types and an overflow is reported instead of wrapping.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub type Coeff = i128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid signature n={n}, m={m}: need n >= 1 and m >= n + 2")]
    InvalidSignature { n: usize, m: usize },
    #[error("index {index} out of range (expected {min}..={max})")]
    IndexOutOfRange { index: usize, min: usize, max: usize },
    #[error("lattice signatures do not match")]
    SignatureMismatch,
    #[error("coefficient vector has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(Coeff),
    #[error("no word of length <= {depth} reaches the requested class")]
    NotFound { depth: usize },
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

type Result<T> = core::result::Result<T, LatticeError>;

fn add(a: Coeff, b: Coeff) -> Result<Coeff> {
    a.checked_add(b).ok_or(LatticeError::Overflow)
}

fn mul(a: Coeff, b: Coeff) -> Result<Coeff> {
    a.checked_mul(b).ok_or(LatticeError::Overflow)
}

/// The pair `(n, m)`: dimension of the ambient projective space and number of
/// blown-up points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSignature {
    n: usize,
    m: usize,
}

impl LatticeSignature {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 1 || m < n + 2 {
            return Err(LatticeError::InvalidSignature { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Rank of the Picard lattice, `m + 1`.
    pub fn rank(&self) -> usize {
        self.m + 1
    }

    /// Number of simple roots (and generators), `m`.
    pub fn generator_count(&self) -> usize {
        self.m
    }

    pub fn check_generator(&self, i: usize) -> Result<()> {
        if i < self.m {
            Ok(())
        } else {
            Err(LatticeError::IndexOutOfRange { index: i, min: 0, max: self.m - 1 })
        }
    }

    fn check_point(&self, i: usize) -> Result<()> {
        if (1..=self.m).contains(&i) {
            Ok(())
        } else {
            Err(LatticeError::IndexOutOfRange { index: i, min: 1, max: self.m })
        }
    }
}

macro_rules! lattice_vector {
    ($name:ident, $hyper:literal, $exc:literal) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            sig: LatticeSignature,
            coeffs: Vec<Coeff>,
        }

        impl $name {
            pub fn new(sig: LatticeSignature, coeffs: Vec<Coeff>) -> Result<Self> {
                if coeffs.len() != sig.rank() {
                    return Err(LatticeError::WrongLength { got: coeffs.len(), expected: sig.rank() });
                }
                Ok(Self { sig, coeffs })
            }

            pub fn zero(sig: LatticeSignature) -> Self {
                Self { sig, coeffs: vec![0; sig.rank()] }
            }

            /// The unit vector at basis position `k` (`0` is the hyperplane / line class).
            pub fn basis(sig: LatticeSignature, k: usize) -> Result<Self> {
                if k > sig.m {
                    return Err(LatticeError::IndexOutOfRange { index: k, min: 0, max: sig.m });
                }
                let mut c = Self::zero(sig);
                c.coeffs[k] = 1;
                Ok(c)
            }

            pub fn sig(&self) -> LatticeSignature {
                self.sig
            }

            pub fn coeffs(&self) -> &[Coeff] {
                &self.coeffs
            }

            pub fn into_coeffs(self) -> Vec<Coeff> {
                self.coeffs
            }

            pub fn checked_add(&self, other: &Self) -> Result<Self> {
                if self.sig != other.sig {
                    return Err(LatticeError::SignatureMismatch);
                }
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| add(a, b)).collect::<Result<Vec<_>>>()?;
                Ok(Self { sig: self.sig, coeffs })
            }

            pub fn checked_scale(&self, k: Coeff) -> Result<Self> {
                let coeffs = self.coeffs.iter().map(|&a| mul(a, k)).collect::<Result<Vec<_>>>()?;
                Ok(Self { sig: self.sig, coeffs })
            }

            /// Parses a symbolic sum such as `"2E - E_1 - 3*E_4"`.
            pub fn parse(sig: LatticeSignature, s: &str) -> Result<Self> {
                let coeffs = parse_symbolic(sig, s, $hyper, $exc)?;
                Ok(Self { sig, coeffs })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_symbolic(f, &self.coeffs, $hyper, $exc)
            }
        }
    };
}

lattice_vector!(DivisorClass, 'E', "E_");
lattice_vector!(CurveClass, 'e', "e_");

impl DivisorClass {
    /// `E`, the total transform of a hyperplane.
    pub fn hyperplane(sig: LatticeSignature) -> Self {
        let mut c = Self::zero(sig);
        c.coeffs[0] = 1;
        c
    }

    /// `E_i`, the exceptional class over the `i`-th point (1-based).
    pub fn exceptional(sig: LatticeSignature, i: usize) -> Result<Self> {
        sig.check_point(i)?;
        Self::basis(sig, i)
    }
}

impl CurveClass {
    pub fn line(sig: LatticeSignature) -> Self {
        let mut c = Self::zero(sig);
        c.coeffs[0] = 1;
        c
    }

    pub fn exceptional_line(sig: LatticeSignature, i: usize) -> Result<Self> {
        sig.check_point(i)?;
        Self::basis(sig, i)
    }

    /// `(n+1) e - e_1 - ... - e_m`, the class of an elliptic curve of degree
    /// `n + 1` through all blown-up points.
    pub fn anticanonical(sig: LatticeSignature) -> Self {
        let mut coeffs = vec![-1; sig.rank()];
        coeffs[0] = (sig.n + 1) as Coeff;
        Self { sig, coeffs }
    }
}

fn parse_symbolic(sig: LatticeSignature, s: &str, hyper: char, exc: &str) -> Result<Vec<Coeff>> {
    let err = || LatticeError::Parse { what: "class", input: String::from(s) };
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() || compact == "0" {
        return Ok(vec![0; sig.rank()]);
    }
    let mut coeffs = vec![0; sig.rank()];
    let bytes = compact.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let mut sign: Coeff = 1;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
        } else if pos != 0 {
            return Err(err());
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let mult: Coeff = if pos > start { compact[start..pos].parse().map_err(|_| err())? } else { 1 };
        if pos < bytes.len() && bytes[pos] == b'*' {
            pos += 1;
        }
        let rest = &compact[pos..];
        let index = if rest.starts_with(exc) {
            pos += exc.len();
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let i: usize = compact[start..pos].parse().map_err(|_| err())?;
            sig.check_point(i)?;
            i
        } else if rest.starts_with(hyper) {
            pos += hyper.len_utf8();
            0
        } else {
            return Err(err());
        };
        coeffs[index] = add(coeffs[index], mul(sign, mult)?)?;
    }
    Ok(coeffs)
}

fn write_symbolic(f: &mut fmt::Formatter<'_>, coeffs: &[Coeff], hyper: char, exc: &str) -> fmt::Result {
    let mut first = true;
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sep = match (first, c < 0) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        f.write_str(sep)?;
        let a = c.unsigned_abs();
        if a != 1 {
            write!(f, "{a}")?;
        }
        if k == 0 {
            write!(f, "{hyper}")?;
        } else {
            write!(f, "{exc}{k}")?;
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Intersection pairing `H^2 x H_2 -> Z`.
pub fn pairing(d: &DivisorClass, c: &CurveClass) -> Result<Coeff> {
    if d.sig != c.sig {
        return Err(LatticeError::SignatureMismatch);
    }
    let mut acc = mul(d.coeffs[0], c.coeffs[0])?;
    for (&a, &b) in d.coeffs[1..].iter().zip(&c.coeffs[1..]) {
        acc = acc.checked_sub(mul(a, b)?).ok_or(LatticeError::Overflow)?;
    }
    Ok(acc)
}

/// Simple root `alpha_i`.
pub fn root(sig: LatticeSignature, i: usize) -> Result<DivisorClass> {
    sig.check_generator(i)?;
    let mut c = DivisorClass::zero(sig);
    if i == 0 {
        c.coeffs[0] = 1;
        for k in 1..=sig.n + 1 {
            c.coeffs[k] = -1;
        }
    } else {
        c.coeffs[i] = 1;
        c.coeffs[i + 1] = -1;
    }
    Ok(c)
}

/// Simple coroot `alpha_i^vee`.
pub fn coroot(sig: LatticeSignature, i: usize) -> Result<CurveClass> {
    sig.check_generator(i)?;
    let mut c = CurveClass::zero(sig);
    if i == 0 {
        c.coeffs[0] = sig.n as Coeff - 1;
        for k in 1..=sig.n + 1 {
            c.coeffs[k] = -1;
        }
    } else {
        c.coeffs[i] = 1;
        c.coeffs[i + 1] = -1;
    }
    Ok(c)
}

/// `D + <D, alpha_i^vee> alpha_i`.
pub fn reflect_divisor(i: usize, d: &DivisorClass) -> Result<DivisorClass> {
    let sig = d.sig;
    let k = pairing(d, &coroot(sig, i)?)?;
    d.checked_add(&root(sig, i)?.checked_scale(k)?)
}

/// `d + <alpha_i, d> alpha_i^vee`.
pub fn reflect_curve(i: usize, c: &CurveClass) -> Result<CurveClass> {
    let sig = c.sig;
    let k = pairing(&root(sig, i)?, c)?;
    c.checked_add(&coroot(sig, i)?.checked_scale(k)?)
}

/// Reflection in an arbitrary real root: `D + <D, beta^vee> beta`.
pub fn reflect_divisor_in(beta: &DivisorClass, beta_vee: &CurveClass, d: &DivisorClass) -> Result<DivisorClass> {
    let k = pairing(d, beta_vee)?;
    d.checked_add(&beta.checked_scale(k)?)
}

/// A word in the generators, applied left to right. Letter `0` is the
/// Cremona generator `r_{1..n+1}`, letter `i >= 1` the swap `r_{i,i+1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylWord(Vec<usize>);

impl WeylWord {
    pub fn new(letters: Vec<usize>) -> Self {
        Self(letters)
    }

    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, sig: LatticeSignature) -> Result<()> {
        self.0.iter().try_for_each(|&g| sig.check_generator(g))
    }

    /// The inverse element (every generator is an involution).
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn then(&self, other: &WeylWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }

    pub fn push(&mut self, g: usize) {
        self.0.push(g);
    }
}

impl From<Vec<usize>> for WeylWord {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for WeylWord {
    type Err = LatticeError;

    /// Comma-separated generator indices; the empty string is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(Self::identity());
        }
        t.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| LatticeError::Parse { what: "word", input: String::from(s) }))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Square integer matrix acting on coefficient column vectors of `H^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionMatrix {
    sig: LatticeSignature,
    /// Row-major, `rank x rank`.
    entries: Vec<Coeff>,
}

impl ActionMatrix {
    pub fn identity(sig: LatticeSignature) -> Self {
        let r = sig.rank();
        let mut entries = vec![0; r * r];
        for k in 0..r {
            entries[k * r + k] = 1;
        }
        Self { sig, entries }
    }

    pub fn from_rows(sig: LatticeSignature, rows: &[Vec<Coeff>]) -> Result<Self> {
        let r = sig.rank();
        if rows.len() != r || rows.iter().any(|row| row.len() != r) {
            return Err(LatticeError::WrongLength { got: rows.len(), expected: r });
        }
        Ok(Self { sig, entries: rows.iter().flatten().copied().collect() })
    }

    /// Matrix of a single generator.
    pub fn generator(sig: LatticeSignature, g: usize) -> Result<Self> {
        Self::identity(sig).then_generator(g)
    }

    pub fn sig(&self) -> LatticeSignature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.rank()
    }

    pub fn get(&self, row: usize, col: usize) -> Coeff {
        self.entries[row * self.dim() + col]
    }

    pub fn rows(&self) -> Vec<Vec<Coeff>> {
        self.entries.chunks(self.dim()).map(|r| r.to_vec()).collect()
    }

    /// Column `k`, i.e. the image of the `k`-th basis class.
    pub fn column(&self, k: usize) -> DivisorClass {
        let r = self.dim();
        DivisorClass { sig: self.sig, coeffs: (0..r).map(|i| self.entries[i * r + k]).collect() }
    }

    fn from_columns(sig: LatticeSignature, cols: &[DivisorClass]) -> Self {
        let r = sig.rank();
        let mut entries = vec![0; r * r];
        for (k, c) in cols.iter().enumerate() {
            for i in 0..r {
                entries[i * r + k] = c.coeffs[i];
            }
        }
        Self { sig, entries }
    }

    /// Post-compose with generator `g`: returns `R_g * self`.
    pub fn then_generator(&self, g: usize) -> Result<Self> {
        let cols = (0..self.dim()).map(|k| reflect_divisor(g, &self.column(k))).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_columns(self.sig, &cols))
    }

    pub fn apply(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.sig != self.sig {
            return Err(LatticeError::SignatureMismatch);
        }
        let r = self.dim();
        let mut coeffs = vec![0; r];
        for (i, out) in coeffs.iter_mut().enumerate() {
            for k in 0..r {
                *out = add(*out, mul(self.entries[i * r + k], d.coeffs[k])?)?;
            }
        }
        Ok(DivisorClass { sig: self.sig, coeffs })
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &ActionMatrix) -> Result<Self> {
        if self.sig != rhs.sig {
            return Err(LatticeError::SignatureMismatch);
        }
        let r = self.dim();
        let mut entries = vec![0; r * r];
        for i in 0..r {
            for j in 0..r {
                let mut acc: Coeff = 0;
                for k in 0..r {
                    acc = add(acc, mul(self.entries[i * r + k], rhs.entries[k * r + j])?)?;
                }
                entries[i * r + j] = acc;
            }
        }
        Ok(Self { sig: self.sig, entries })
    }

    pub fn transpose(&self) -> Self {
        let r = self.dim();
        let mut entries = vec![0; r * r];
        for i in 0..r {
            for j in 0..r {
                entries[j * r + i] = self.entries[i * r + j];
            }
        }
        Self { sig: self.sig, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.sig)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<Coeff> {
        bareiss_det(self.dim(), self.entries.clone())
    }

    /// Exact inverse of a unimodular matrix via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant()?;
        if det != 1 && det != -1 {
            return Err(LatticeError::NotUnimodular(det));
        }
        let r = self.dim();
        let mut entries = vec![0; r * r];
        for i in 0..r {
            for j in 0..r {
                let mut minor = Vec::with_capacity((r - 1) * (r - 1));
                for a in (0..r).filter(|&a| a != i) {
                    for b in (0..r).filter(|&b| b != j) {
                        minor.push(self.entries[a * r + b]);
                    }
                }
                let cof = bareiss_det(r - 1, minor)?;
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                // adjugate is the transposed cofactor matrix
                entries[j * r + i] = mul(cof, det)?;
            }
        }
        Ok(Self { sig: self.sig, entries })
    }

    /// The induced action on `H_2`, obtained as the adjoint that preserves the
    /// pairing: `J (M^{-1})^T J` with `J = diag(1, -1, ..., -1)`.
    pub fn curve_action(&self) -> Result<CurveActionMatrix> {
        let inv = self.inverse()?;
        Ok(CurveActionMatrix::from_pullback(&inv))
    }

    /// The coefficients `(b^0, b^1, ..., b^m)` of `M(E_k)` (column `k`).
    pub fn b_row(&self, k: usize) -> Vec<Coeff> {
        self.column(k).coeffs
    }
}

/// Action on `H_2` derived from a divisor action (never stored independently).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveActionMatrix {
    sig: LatticeSignature,
    entries: Vec<Coeff>,
}

impl CurveActionMatrix {
    fn from_pullback(inv: &ActionMatrix) -> Self {
        let r = inv.dim();
        let t = inv.transpose();
        let sign = |k: usize| if k == 0 { 1 } else { -1 };
        let mut entries = vec![0; r * r];
        for i in 0..r {
            for j in 0..r {
                entries[i * r + j] = sign(i) * t.entries[i * r + j] * sign(j);
            }
        }
        Self { sig: inv.sig, entries }
    }

    pub fn apply(&self, c: &CurveClass) -> Result<CurveClass> {
        if c.sig != self.sig {
            return Err(LatticeError::SignatureMismatch);
        }
        let r = self.sig.rank();
        let mut coeffs = vec![0; r];
        for (i, out) in coeffs.iter_mut().enumerate() {
            for k in 0..r {
                *out = add(*out, mul(self.entries[i * r + k], c.coeffs[k])?)?;
            }
        }
        Ok(CurveClass { sig: self.sig, coeffs })
    }
}

fn bareiss_det(r: usize, mut a: Vec<Coeff>) -> Result<Coeff> {
    if r == 0 {
        return Ok(1);
    }
    let mut sign: Coeff = 1;
    let mut prev: Coeff = 1;
    for k in 0..r - 1 {
        if a[k * r + k] == 0 {
            let Some(p) = (k + 1..r).find(|&p| a[p * r + k] != 0) else {
                return Ok(0);
            };
            for c in 0..r {
                a.swap(k * r + c, p * r + c);
            }
            sign = -sign;
        }
        for i in k + 1..r {
            for j in k + 1..r {
                let num = mul(a[i * r + j], a[k * r + k])?.checked_sub(mul(a[i * r + k], a[k * r + j])?).ok_or(LatticeError::Overflow)?;
                a[i * r + j] = num / prev;
            }
        }
        prev = a[k * r + k];
    }
    mul(sign, a[(r - 1) * r + (r - 1)])
}

/// `w_*` on `H^2` for a word applied left to right: `R_{g_k} ... R_{g_1}`.
pub fn word_pushforward(sig: LatticeSignature, word: &WeylWord) -> Result<ActionMatrix> {
    word.validate(sig)?;
    word.letters().iter().try_fold(ActionMatrix::identity(sig), |m, &g| m.then_generator(g))
}

/// `w^* = (w_*)^{-1}`, computed as the push-forward of the reversed word.
pub fn word_pullback(sig: LatticeSignature, word: &WeylWord) -> Result<ActionMatrix> {
    word_pushforward(sig, &word.reversed())
}

/// `w_*` on `H_2`, by applying [`reflect_curve`] letter by letter.
pub fn word_pushforward_curve(word: &WeylWord, c: &CurveClass) -> Result<CurveClass> {
    word.validate(c.sig)?;
    word.letters().iter().try_fold(c.clone(), |acc, &g| reflect_curve(g, &acc))
}

/// Symmetric 0/1 adjacency of the Dynkin diagram `T_{2, n+1, m-n-1}`.
pub fn dynkin_adjacency(sig: LatticeSignature) -> Result<Vec<Vec<u8>>> {
    let m = sig.m;
    let mut adj = vec![vec![0u8; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && pairing(&root(sig, i)?, &coroot(sig, j)?)? == 1 {
                adj[i][j] = 1;
            }
        }
    }
    Ok(adj)
}

/// One element of a breadth-first orbit enumeration: `word` pushes the start
/// class forward to `class`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitEntry {
    pub class: DivisorClass,
    pub word: WeylWord,
}

/// All classes `w_*(start)` for words of length `<= depth`, in BFS order,
/// each with a shortest word reaching it.
pub fn orbit(start: &DivisorClass, depth: usize) -> Result<Vec<OrbitEntry>> {
    let sig = start.sig;
    let mut seen: BTreeMap<Vec<Coeff>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.coeffs.clone(), ());
    queue.push_back((OrbitEntry { class: start.clone(), word: WeylWord::identity() }, 0usize));
    while let Some((entry, d)) = queue.pop_front() {
        if d < depth {
            for g in 0..sig.m {
                let next = reflect_divisor(g, &entry.class)?;
                if seen.insert(next.coeffs.clone(), ()).is_none() {
                    let mut word = entry.word.clone();
                    word.push(g);
                    queue.push_back((OrbitEntry { class: next, word }, d + 1));
                }
            }
        }
        out.push(entry);
    }
    Ok(out)
}

/// Bounded test for membership in the Weyl orbit of `alpha_0` (the classes of
/// nodal hypersurfaces). The orbit is infinite for affine and indefinite types,
/// so `false` only means "not reached by a word of length `<= depth`".
pub fn is_real_root_orbit_member(d: &DivisorClass, depth: usize) -> Result<bool> {
    let a0 = root(d.sig, 0)?;
    Ok(orbit(&a0, depth)?.iter().any(|e| e.class == *d))
}

/// A word `w` with `w_*(alpha_0) = target`, if one of length `<= depth` exists.
pub fn root_word(target: &DivisorClass, depth: usize) -> Result<WeylWord> {
    let a0 = root(target.sig, 0)?;
    orbit(&a0, depth)?.into_iter().find(|e| e.class == *target).map(|e| e.word).ok_or(LatticeError::NotFound { depth })
}

/// Word for the reflection in the real root `w_*(alpha_0)`: `w^{-1}`, then
/// generator `0`, then `w`.
pub fn reflection_word(w: &WeylWord) -> WeylWord {
    w.reversed().then(&WeylWord::new(vec![0])).then(w)
}

/// Word realizing `r_{i,j}` (swap of points `i < j`) by adjacent swaps.
pub fn transposition_word(sig: LatticeSignature, i: usize, j: usize) -> Result<WeylWord> {
    sig.check_point(i)?;
    sig.check_point(j)?;
    if i >= j {
        return Err(LatticeError::IndexOutOfRange { index: i, min: 1, max: j.saturating_sub(1) });
    }
    let mut letters: Vec<usize> = (i..j).collect();
    letters.extend((i..j - 1).rev());
    Ok(WeylWord(letters))
}

/// Word realizing `r_{i_0, ..., i_n}` (Cremona transformation centred at the
/// given points): permute the points to the front, apply generator `0`, and
/// permute back.
pub fn cremona_word(sig: LatticeSignature, indices: &[usize]) -> Result<WeylWord> {
    let p = frame_permutation_word(sig, indices)?;
    Ok(p.then(&WeylWord::new(vec![0])).then(&p.reversed()))
}

/// Adjacent swaps that move the points `indices` (ascending, 1-based) into
/// slots `1..=n+1`, keeping their relative order.
pub fn frame_permutation_word(sig: LatticeSignature, indices: &[usize]) -> Result<WeylWord> {
    if indices.len() != sig.n + 1 {
        return Err(LatticeError::WrongLength { got: indices.len(), expected: sig.n + 1 });
    }
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(LatticeError::Parse { what: "ascending index set", input: alloc::format!("{indices:?}") });
        }
    }
    for &i in indices {
        sig.check_point(i)?;
    }
    let mut slots: Vec<usize> = (1..=sig.m).collect();
    let mut letters = Vec::new();
    for (target, &label) in indices.iter().enumerate() {
        let mut pos = slots.iter().position(|&s| s == label).expect("label present");
        while pos > target {
            // generator `pos` swaps slots pos and pos+1 (1-based), i.e. 0-based pos-1 and pos
            slots.swap(pos - 1, pos);
            letters.push(pos);
            pos -= 1;
        }
    }
    Ok(WeylWord(letters))
}

/// The class annihilated by every simple coroot, normalized to be primitive
/// with positive `E` coefficient. For `(n, m) = (2, 9)` this is the null root
/// `3E - E_1 - ... - E_9` of the affine `E_8` system.
pub fn invariant_class(sig: LatticeSignature) -> DivisorClass {
    let n = sig.n as Coeff;
    let g = gcd(n + 1, n - 1);
    let mut coeffs = vec![-(n - 1) / g; sig.rank()];
    coeffs[0] = (n + 1) / g;
    DivisorClass { sig, coeffs }
}

fn gcd(a: Coeff, b: Coeff) -> Coeff {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Word for the translation `r_{delta - alpha_i} r_{alpha_i}` where `delta` is
/// [`invariant_class`]. Only meaningful when `delta - alpha_i` is a real root,
/// which is found by bounded orbit search.
pub fn translation_word(sig: LatticeSignature, i: usize, depth: usize) -> Result<WeylWord> {
    let beta = invariant_class(sig).checked_add(&root(sig, i)?.checked_scale(-1)?)?;
    let w = root_word(&beta, depth)?;
    Ok(reflection_word(&w).then(&WeylWord::new(vec![i])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(n: usize, m: usize) -> LatticeSignature {
        LatticeSignature::new(n, m).unwrap()
    }

    fn cls(s: LatticeSignature, v: &[Coeff]) -> DivisorClass {
        DivisorClass::new(s, v.to_vec()).unwrap()
    }

    #[test]
    fn signature_bounds() {
        assert!(LatticeSignature::new(2, 3).is_err());
        assert!(LatticeSignature::new(0, 5).is_err());
        assert!(LatticeSignature::new(2, 4).is_ok());
    }

    #[test]
    fn pairing_basics() {
        let s = sig(2, 5);
        assert_eq!(pairing(&DivisorClass::hyperplane(s), &CurveClass::line(s)).unwrap(), 1);
        let e1 = DivisorClass::exceptional(s, 1).unwrap();
        assert_eq!(pairing(&e1, &CurveClass::exceptional_line(s, 1).unwrap()).unwrap(), -1);
        assert_eq!(pairing(&e1, &CurveClass::exceptional_line(s, 2).unwrap()).unwrap(), 0);
        for i in 0..s.m() {
            assert_eq!(pairing(&root(s, i).unwrap(), &coroot(s, i).unwrap()).unwrap(), -2);
        }
        let other = sig(2, 6);
        assert_eq!(pairing(&DivisorClass::hyperplane(s), &CurveClass::line(other)), Err(LatticeError::SignatureMismatch));
    }

    #[test]
    fn roots_and_coroots() {
        assert_eq!(root(sig(2, 4), 0).unwrap().coeffs(), &[1, -1, -1, -1, 0]);
        assert_eq!(root(sig(3, 7), 1).unwrap().coeffs(), &[0, 1, -1, 0, 0, 0, 0, 0]);
        assert_eq!(coroot(sig(3, 6), 0).unwrap().coeffs(), &[2, -1, -1, -1, -1, 0, 0]);
        assert!(root(sig(2, 4), 4).is_err());
    }

    #[test]
    fn reflection_examples() {
        let s = sig(2, 5);
        let e1 = DivisorClass::exceptional(s, 1).unwrap();
        assert_eq!(reflect_divisor(1, &e1).unwrap(), DivisorClass::exceptional(s, 2).unwrap());
        let e = DivisorClass::hyperplane(s);
        assert_eq!(reflect_divisor(0, &e).unwrap().coeffs(), &[2, -1, -1, -1, 0, 0]);
        let delta = CurveClass::anticanonical(s);
        assert_eq!(reflect_curve(0, &delta).unwrap(), delta);
    }

    #[test]
    fn symbolic_round_trip() {
        let s = sig(2, 9);
        let d = DivisorClass::parse(s, "2E - E_1 - E_2 -E_3").unwrap();
        assert_eq!(d.coeffs(), &[2, -1, -1, -1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(alloc::format!("{d}"), "2E - E_1 - E_2 - E_3");
        assert_eq!(DivisorClass::parse(s, "3*E_9 + E").unwrap().coeffs()[9], 3);
        assert_eq!(DivisorClass::parse(s, "0").unwrap(), DivisorClass::zero(s));
        assert!(DivisorClass::parse(s, "E_10").is_err());
        assert!(DivisorClass::parse(s, "F").is_err());
        assert_eq!(alloc::format!("{}", CurveClass::anticanonical(sig(2, 5))), "3e - e_1 - e_2 - e_3 - e_4 - e_5");
    }

    #[test]
    fn word_parsing() {
        assert_eq!("0,1, 2".parse::<WeylWord>().unwrap().letters(), &[0, 1, 2]);
        assert!("".parse::<WeylWord>().unwrap().is_empty());
        assert!("0,,1".parse::<WeylWord>().is_err());
        assert!(WeylWord::new(vec![5]).validate(sig(2, 5)).is_err());
    }

    #[test]
    fn pushforward_identities() {
        let s = sig(2, 6);
        assert!(word_pushforward(s, &WeylWord::identity()).unwrap().is_identity());
        assert!(word_pushforward(s, &WeylWord::new(vec![0, 0])).unwrap().is_identity());
        assert_eq!(
            word_pushforward(s, &WeylWord::new(vec![1, 2, 1])).unwrap(),
            word_pushforward(s, &WeylWord::new(vec![2, 1, 2])).unwrap()
        );
    }

    #[test]
    fn pullback_is_inverse() {
        let s = sig(3, 7);
        let w = WeylWord::new(vec![0, 4, 3, 0, 1, 5, 0]);
        let push = word_pushforward(s, &w).unwrap();
        let pull = word_pullback(s, &w).unwrap();
        assert!(pull.compose(&push).unwrap().is_identity());
        assert_eq!(push.inverse().unwrap(), pull);
        let single = WeylWord::new(vec![0]);
        assert_eq!(word_pullback(s, &single).unwrap(), word_pushforward(s, &single).unwrap());
        let b0 = word_pullback(sig(2, 5), &single).unwrap().b_row(0);
        assert_eq!(b0, vec![2, -1, -1, -1, 0, 0]);
    }

    #[test]
    fn dynkin_shape() {
        let s = sig(2, 9);
        let adj = dynkin_adjacency(s).unwrap();
        // alpha_0 hangs off alpha_3; the rest is the path alpha_1 - ... - alpha_8
        let neighbours = |i: usize| (0..9).filter(|&j| adj[i][j] == 1).collect::<Vec<_>>();
        assert_eq!(neighbours(0), vec![3]);
        assert_eq!(neighbours(1), vec![2]);
        assert_eq!(neighbours(3), vec![0, 2, 4]);
        assert_eq!(neighbours(8), vec![7]);
        let edges: usize = adj.iter().flatten().map(|&x| x as usize).sum();
        assert_eq!(edges, 2 * 8); // a tree on 9 vertices
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(adj[i][j], adj[j][i]);
            }
        }
    }

    #[test]
    fn orbit_membership() {
        let s = sig(2, 9);
        let a0 = root(s, 0).unwrap();
        assert!(is_real_root_orbit_member(&a0, 0).unwrap());
        assert!(is_real_root_orbit_member(&a0.checked_scale(-1).unwrap(), 1).unwrap());
        // alpha_1 sits three edges from alpha_0 (alpha_0 - alpha_3 - alpha_2 - alpha_1),
        // so it first appears at depth 6
        let a1 = root(s, 1).unwrap();
        assert!(!is_real_root_orbit_member(&a1, 5).unwrap());
        assert!(is_real_root_orbit_member(&a1, 6).unwrap());
        let two_a0 = a0.checked_scale(2).unwrap();
        assert!(!is_real_root_orbit_member(&two_a0, 6).unwrap());
    }

    #[test]
    fn root_word_reaches_target() {
        let s = sig(2, 9);
        let target = cls(s, &[1, 0, 0, 0, -1, -1, -1, 0, 0, 0]);
        let w = root_word(&target, 9).unwrap();
        assert_eq!(word_pushforward(s, &w).unwrap().apply(&root(s, 0).unwrap()).unwrap(), target);
    }

    #[test]
    fn derived_transpositions() {
        let s = sig(2, 6);
        let w = transposition_word(s, 2, 5).unwrap();
        let m = word_pushforward(s, &w).unwrap();
        let e2 = DivisorClass::exceptional(s, 2).unwrap();
        let e5 = DivisorClass::exceptional(s, 5).unwrap();
        let e3 = DivisorClass::exceptional(s, 3).unwrap();
        assert_eq!(m.apply(&e2).unwrap(), e5);
        assert_eq!(m.apply(&e5).unwrap(), e2);
        assert_eq!(m.apply(&e3).unwrap(), e3);
    }

    #[test]
    fn derived_cremona_is_reflection() {
        let s = sig(2, 6);
        let idx = [2, 4, 6];
        let w = cremona_word(s, &idx).unwrap();
        let m = word_pushforward(s, &w).unwrap();
        let beta = DivisorClass::parse(s, "E - E_2 - E_4 - E_6").unwrap();
        let beta_vee = CurveClass::parse(s, "e - e_2 - e_4 - e_6").unwrap();
        for k in 0..s.rank() {
            let b = DivisorClass::basis(s, k).unwrap();
            assert_eq!(m.apply(&b).unwrap(), reflect_divisor_in(&beta, &beta_vee, &b).unwrap());
        }
    }

    #[test]
    fn curve_action_matches_direct_reflections() {
        let s = sig(3, 7);
        let w = WeylWord::new(vec![0, 4, 2, 0, 5, 6, 0, 3]);
        let ca = word_pushforward(s, &w).unwrap().curve_action().unwrap();
        for k in 0..s.rank() {
            let c = CurveClass::basis(s, k).unwrap();
            assert_eq!(ca.apply(&c).unwrap(), word_pushforward_curve(&w, &c).unwrap());
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let s = sig(2, 5);
        let m = word_pushforward(s, &WeylWord::new(vec![0, 3, 0])).unwrap();
        assert_eq!(m.determinant().unwrap().abs(), 1);
        let singular = ActionMatrix::from_rows(s, &vec![vec![1; 6]; 6]).unwrap();
        assert_eq!(singular.determinant().unwrap(), 0);
        assert_eq!(singular.inverse(), Err(LatticeError::NotUnimodular(0)));
    }

    #[test]
    fn overflow_is_reported() {
        let s = sig(2, 5);
        let huge = DivisorClass::new(s, vec![Coeff::MAX, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(reflect_divisor(0, &huge), Err(LatticeError::Overflow));
    }

    #[test]
    fn translation_is_unipotent() {
        let s = sig(2, 9);
        let t = translation_word(s, 1, 32).unwrap();
        assert_eq!(t.len(), 58);
        let m = word_pushforward(s, &t).unwrap();
        let n = m.compose(&ActionMatrix::identity(s)).unwrap();
        // (M - I)^3 = 0 but M != I
        let r = s.rank();
        let rows: Vec<Vec<Coeff>> = (0..r).map(|i| (0..r).map(|j| n.get(i, j) - if i == j { 1 } else { 0 }).collect()).collect();
        let nil = ActionMatrix::from_rows(s, &rows).unwrap();
        let cube = nil.compose(&nil).unwrap().compose(&nil).unwrap();
        assert!(cube.rows().iter().flatten().all(|&x| x == 0));
        assert!(!m.is_identity());
        let delta = invariant_class(s);
        assert_eq!(m.apply(&delta).unwrap(), delta);
    }
}
