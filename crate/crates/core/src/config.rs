//! Point configurations in `P^n` and the birational action of the generators.
//!
//! A [`PointConfig`] holds the `(n+1) x m` matrix whose columns are the
//! homogeneous coordinates of the blown-up points, plus any number of extra
//! "fiber" points that are transported along (general points of `P^n`).
//! Columns are only meaningful up to scalar; every operation leaves each
//! column divided by its largest-modulus entry.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::lattice::{LatticeError, LatticeSignature, WeylWord};
use crate::linalg::{norm, normalize_max_modulus, projective_distance, CMatrix, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix shape {rows}x{cols} does not match n={n}, m={m}")]
    Shape { rows: usize, cols: usize, n: usize, m: usize },
    #[error("frame points {indices:?} are linearly dependent")]
    SingularFrame { indices: Vec<usize> },
    #[error("point {column} lies on a coordinate hyperplane of the Cremona frame")]
    OnFrameHyperplane { column: usize },
    #[error("configuration is degenerate (scaled minor {min_minor:e})")]
    Degenerate { min_minor: f64 },
    #[error("correspondences are inconsistent (residual {residual:e})")]
    Inconsistent { residual: f64 },
    #[error("need at least {need} correspondences, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("degenerate configuration after prefix [{prefix}] of the word: {source}")]
    DegenerateAt {
        prefix: WeylWord,
        #[source]
        source: Box<ConfigError>,
    },
}

type Result<T> = core::result::Result<T, ConfigError>;

/// Numerical thresholds shared by configuration and verification code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Minimum scaled `|det|` for a frame or minor to count as nonsingular.
    pub det: f64,
    /// Projective-equality threshold (sine of the Fubini-Study angle).
    pub projective: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { det: 1e-10, projective: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    sig: LatticeSignature,
    points: CMatrix,
    fibers: Vec<Vec<Scalar>>,
}

impl PointConfig {
    pub fn new(sig: LatticeSignature, points: CMatrix) -> Result<Self> {
        Self::with_fibers(sig, points, Vec::new())
    }

    pub fn with_fibers(sig: LatticeSignature, points: CMatrix, fibers: Vec<Vec<Scalar>>) -> Result<Self> {
        let (n, m) = (sig.n(), sig.m());
        if points.rows() != n + 1 || points.cols() != m || fibers.iter().any(|x| x.len() != n + 1) {
            return Err(ConfigError::Shape { rows: points.rows(), cols: points.cols(), n, m });
        }
        let mut cfg = Self { sig, points, fibers };
        cfg.normalize_columns();
        Ok(cfg)
    }

    pub fn sig(&self) -> LatticeSignature {
        self.sig
    }

    pub fn points(&self) -> &CMatrix {
        &self.points
    }

    /// Column `i` (1-based, matching `P_i`).
    pub fn point(&self, i: usize) -> &[Scalar] {
        self.points.column(i - 1)
    }

    pub fn fibers(&self) -> &[Vec<Scalar>] {
        &self.fibers
    }

    fn normalize_columns(&mut self) {
        for j in 0..self.points.cols() {
            normalize_max_modulus(self.points.column_mut(j));
        }
        for x in &mut self.fibers {
            normalize_max_modulus(x);
        }
    }

    /// Applies a projective map to every point and fiber point.
    pub fn transform(&self, map: &ProjectiveMap) -> Self {
        let mut out = Self {
            sig: self.sig,
            points: map.matrix.mul(&self.points),
            fibers: self.fibers.iter().map(|x| map.matrix.mul_vec(x)).collect(),
        };
        out.normalize_columns();
        out
    }

    /// Largest projective distance between corresponding columns and fibers.
    pub fn distance(&self, other: &PointConfig) -> f64 {
        let cols = self.points.columns().zip(other.points.columns()).map(|(a, b)| projective_distance(a, b));
        let fib = self.fibers.iter().zip(&other.fibers).map(|(a, b)| projective_distance(a, b));
        cols.chain(fib).fold(0.0, f64::max)
    }
}

/// Element of `PGL(n+1)`, stored as a representative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    matrix: CMatrix,
}

impl ProjectiveMap {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        let mut y = self.matrix.mul_vec(x);
        normalize_max_modulus(&mut y);
        y
    }

    pub fn compose(&self, first: &ProjectiveMap) -> ProjectiveMap {
        ProjectiveMap { matrix: self.matrix.mul(&first.matrix) }
    }

    pub fn inverse(&self) -> Option<ProjectiveMap> {
        self.matrix.inverse().map(|matrix| ProjectiveMap { matrix })
    }

    /// Representative scaled so its largest-modulus entry is 1.
    pub fn normalized(&self) -> ProjectiveMap {
        ProjectiveMap { matrix: self.matrix.normalized() }
    }
}

/// `r_{i,j}`: exchange columns `i` and `j` (1-based). Fibers are unchanged.
pub fn swap(i: usize, j: usize, cfg: &PointConfig) -> Result<PointConfig> {
    let m = cfg.sig.m();
    for k in [i, j] {
        if !(1..=m).contains(&k) {
            return Err(LatticeError::IndexOutOfRange { index: k, min: 1, max: m }.into());
        }
    }
    let mut out = cfg.clone();
    out.points.swap_columns(i - 1, j - 1);
    Ok(out)
}

/// `r_{i_0, ..., i_n}`: the standard Cremona transformation with respect to
/// the points `indices` (ascending, 1-based).
///
/// For the frame `{1, ..., n+1}` the configuration is first brought to
/// `A_frame^{-1} (A | x)` and then every entry outside the identity block is
/// inverted. Other frames are handled by conjugating with the column
/// permutation that moves the frame to the front.
pub fn cremona(indices: &[usize], cfg: &PointConfig, tol: &Tolerances) -> Result<PointConfig> {
    let sig = cfg.sig;
    let (n, m) = (sig.n(), sig.m());
    if indices.len() != n + 1 {
        return Err(LatticeError::WrongLength { got: indices.len(), expected: n + 1 }.into());
    }
    for (k, &i) in indices.iter().enumerate() {
        if !(1..=m).contains(&i) || (k > 0 && indices[k - 1] >= i) {
            return Err(LatticeError::IndexOutOfRange { index: i, min: 1, max: m }.into());
        }
    }
    let standard: Vec<usize> = (1..=n + 1).collect();
    if indices == standard.as_slice() {
        return cremona_standard(cfg, tol);
    }
    // column order: frame first, then the remaining columns in order
    let mut order: Vec<usize> = indices.iter().map(|&i| i - 1).collect();
    order.extend((0..m).filter(|j| !indices.contains(&(j + 1))));
    let permuted = PointConfig { sig, points: cfg.points.select_columns(&order), fibers: cfg.fibers.clone() };
    let image = cremona_standard(&permuted, tol).map_err(|e| match e {
        ConfigError::OnFrameHyperplane { column } if column > 0 => ConfigError::OnFrameHyperplane { column: order[column - 1] + 1 },
        other => other,
    })?;
    let mut points = CMatrix::zeros(n + 1, m);
    for (slot, &orig) in order.iter().enumerate() {
        points.column_mut(orig).copy_from_slice(image.points.column(slot));
    }
    Ok(PointConfig { sig, points, fibers: image.fibers })
}

fn cremona_standard(cfg: &PointConfig, tol: &Tolerances) -> Result<PointConfig> {
    let sig = cfg.sig;
    let (n, m) = (sig.n(), sig.m());
    let frame_idx: Vec<usize> = (0..=n).collect();
    let frame = cfg.points.select_columns(&frame_idx);
    if scaled_det(&frame) <= tol.det {
        return Err(ConfigError::SingularFrame { indices: (1..=n + 1).collect() });
    }
    let lu = frame.lu().ok_or(ConfigError::SingularFrame { indices: (1..=n + 1).collect() })?;
    let invert = |v: &[Scalar], column: usize| -> Result<Vec<Scalar>> {
        let mut y = lu.solve(v);
        normalize_max_modulus(&mut y);
        if y.iter().any(|a| a.norm() <= tol.det) {
            return Err(ConfigError::OnFrameHyperplane { column });
        }
        Ok(y.iter().map(|a| a.inv()).collect())
    };
    let mut points = CMatrix::identity(n + 1);
    let mut rest = Vec::with_capacity(m);
    for j in n + 1..m {
        rest.push(invert(cfg.points.column(j), j + 1)?);
    }
    let fibers = cfg.fibers.iter().map(|x| invert(x, 0)).collect::<Result<Vec<_>>>()?;
    let mut cols: Vec<Vec<Scalar>> = (0..=n).map(|k| points.column(k).to_vec()).collect();
    cols.extend(rest);
    points = CMatrix::from_columns(&cols);
    let mut out = PointConfig { sig, points, fibers };
    out.normalize_columns();
    Ok(out)
}

/// Applies one generator: `0` is `r_{1..n+1}`, `g >= 1` is `r_{g, g+1}`.
pub fn apply_generator(g: usize, cfg: &PointConfig, tol: &Tolerances) -> Result<PointConfig> {
    cfg.sig.check_generator(g)?;
    if g == 0 {
        let idx: Vec<usize> = (1..=cfg.sig.n() + 1).collect();
        cremona(&idx, cfg, tol)
    } else {
        swap(g, g + 1, cfg)
    }
}

/// Left-to-right composition of the generators in `word`. A degenerate
/// intermediate configuration aborts with the prefix applied so far.
pub fn apply_word(word: &WeylWord, cfg: &PointConfig, tol: &Tolerances) -> Result<PointConfig> {
    word.validate(cfg.sig)?;
    let mut cur = cfg.clone();
    for (k, &g) in word.letters().iter().enumerate() {
        cur = apply_generator(g, &cur, tol).map_err(|e| ConfigError::DegenerateAt { prefix: word.prefix(k), source: Box::new(e) })?;
    }
    Ok(cur)
}

/// `|det| / prod |column|`, a scale-free measure of linear independence.
pub fn scaled_det(m: &CMatrix) -> f64 {
    let denom: f64 = m.columns().map(norm).product();
    if denom == 0.0 {
        return 0.0;
    }
    m.det().norm() / denom
}

/// Map taking the standard frame `(e_0, ..., e_n; 1, ..., 1)` to the given
/// `n + 2` points.
fn frame_matrix(points: &[&[Scalar]], tol: &Tolerances) -> Result<CMatrix> {
    let dim = points[0].len();
    let basis = CMatrix::from_columns(&points[..dim]);
    if scaled_det(&basis) <= tol.det {
        return Err(ConfigError::SingularFrame { indices: (1..=dim).collect() });
    }
    let lambda = basis.solve(points[dim]).ok_or(ConfigError::SingularFrame { indices: (1..=dim).collect() })?;
    // a vanishing coefficient means the last point lies on a hyperplane spanned by the others
    let p = norm(points[dim]);
    let min_weight = lambda.iter().zip(&points[..dim]).map(|(l, a)| l.norm() * norm(a) / p).fold(f64::INFINITY, f64::min);
    if !(min_weight > tol.det) {
        return Err(ConfigError::Degenerate { min_minor: min_weight });
    }
    let mut f = basis;
    for (k, l) in lambda.iter().enumerate() {
        for x in f.column_mut(k) {
            *x *= *l;
        }
    }
    Ok(f)
}

/// Solves for `G` with `G(src_k) ~ dst_k` using the first `n + 2`
/// correspondences, without checking the remaining ones.
pub fn fit_pgl(src: &[Vec<Scalar>], dst: &[Vec<Scalar>], tol: &Tolerances) -> Result<ProjectiveMap> {
    let dim = src.first().map_or(0, Vec::len);
    if src.len() < dim + 1 || dst.len() < dim + 1 || dim == 0 {
        return Err(ConfigError::TooFewPoints { need: dim + 1, got: src.len().min(dst.len()) });
    }
    let s: Vec<&[Scalar]> = src.iter().map(Vec::as_slice).collect();
    let d: Vec<&[Scalar]> = dst.iter().map(Vec::as_slice).collect();
    let fs = frame_matrix(&s, tol)?;
    let fd = frame_matrix(&d, tol)?;
    let fs_inv = fs.inverse().ok_or(ConfigError::SingularFrame { indices: (1..=dim).collect() })?;
    Ok(ProjectiveMap { matrix: fd.mul(&fs_inv) }.normalized())
}

/// Largest projective distance between `G(src_k)` and `dst_k`.
pub fn pgl_residual(map: &ProjectiveMap, src: &[Vec<Scalar>], dst: &[Vec<Scalar>]) -> f64 {
    src.iter().zip(dst).map(|(s, d)| projective_distance(&map.matrix.mul_vec(s), d)).fold(0.0, f64::max)
}

/// Projective map with `G(src_k) ~ dst_k` for all `k`. The first `n + 2`
/// points determine `G`; the rest must agree within `tol.projective`.
pub fn solve_pgl(src: &[Vec<Scalar>], dst: &[Vec<Scalar>], tol: &Tolerances) -> Result<ProjectiveMap> {
    if src.len() != dst.len() {
        return Err(ConfigError::TooFewPoints { need: src.len(), got: dst.len() });
    }
    let map = fit_pgl(src, dst, tol)?;
    let residual = pgl_residual(&map, src, dst);
    if !(residual <= tol.projective) {
        return Err(ConfigError::Inconsistent { residual });
    }
    Ok(map)
}

/// Canonical representative modulo `PGL(n+1)` and column scaling: columns
/// `1..=n+1` become the coordinate points and column `n+2` the all-ones point.
/// Returns the normalized configuration and the map that was applied.
pub fn normalize_frame(cfg: &PointConfig, tol: &Tolerances) -> Result<(PointConfig, ProjectiveMap)> {
    let n = cfg.sig.n();
    let cols: Vec<&[Scalar]> = (0..n + 2).map(|j| cfg.points.column(j)).collect();
    let frame = frame_matrix(&cols, tol)?;
    let h = frame.inverse().ok_or(ConfigError::SingularFrame { indices: (1..=n + 1).collect() })?;
    let map = ProjectiveMap { matrix: h };
    let mut out = cfg.transform(&map);
    // pin the frame exactly; it is only off by rounding
    for k in 0..=n {
        for (i, x) in out.points.column_mut(k).iter_mut().enumerate() {
            *x = if i == k { Scalar::new(1.0, 0.0) } else { Scalar::new(0.0, 0.0) };
        }
    }
    for x in out.points.column_mut(n + 1) {
        *x = Scalar::new(1.0, 0.0);
    }
    Ok((out, map.normalized()))
}

/// Outcome of [`genericity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    /// Smallest `|det| / prod |column|` over all `(n+1)`-subsets of points.
    pub min_scaled_minor: f64,
    /// The 1-based column subset attaining the minimum.
    pub worst: Vec<usize>,
    pub pass: bool,
}

/// Checks that every `(n+1) x (n+1)` minor is nonzero.
pub fn genericity_check(cfg: &PointConfig, tol: &Tolerances) -> GenericityReport {
    let k = cfg.sig.n() + 1;
    let m = cfg.sig.m();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    let mut worst = Vec::new();
    loop {
        let d = scaled_det(&cfg.points.select_columns(&idx));
        if d < best {
            best = d;
            worst = idx.iter().map(|i| i + 1).collect();
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < m - k + p) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    GenericityReport { min_scaled_minor: best, worst, pass: best > tol.det }
}
