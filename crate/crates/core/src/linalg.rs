//! Small dense complex matrices and projective-space helpers.
//!
//! Everything numeric in the crate goes through [`Scalar`]; swapping it for a
//! wider complex type only touches this module.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Float;
use num_traits::Zero;

pub type Scalar = Complex64;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// Column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Scalar::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(d: &[Scalar]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (k, &x) in d.iter().enumerate() {
            m[(k, k)] = x;
        }
        m
    }

    /// Builds a matrix from equal-length columns.
    ///
    /// # Panics
    /// If the columns have different lengths.
    pub fn from_columns<C: AsRef<[Scalar]>>(cols: &[C]) -> Self {
        let rows = cols.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * cols.len());
        for c in cols {
            assert_eq!(c.as_ref().len(), rows, "ragged columns");
            data.extend_from_slice(c.as_ref());
        }
        Self { rows, cols: cols.len(), data }
    }

    pub fn from_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            for (j, &x) in row.as_ref().iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[Scalar] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Scalar] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Scalar]> {
        self.data.chunks(self.rows.max(1)).take(self.cols)
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(a * self.rows + i, b * self.rows + i);
        }
    }

    /// Submatrix made of the listed columns.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<&[Scalar]> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(&cols)
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let col = self.mul_vec(rhs.column(j));
            out.column_mut(j).copy_from_slice(&col);
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, &x) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.column(j)) {
                *o += a * x;
            }
        }
        out
    }

    pub fn scale(&self, s: Scalar) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// LU factorization with partial pivoting; `None` if a pivot falls below
    /// [`PIVOT_TOL`] relative to the largest entry.
    pub fn lu(&self) -> Option<Lu> {
        assert_eq!(self.rows, self.cols, "LU of non-square matrix");
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm())).unwrap();
            if a[(p, k)].norm() <= PIVOT_TOL * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Some(Lu { a, perm, sign })
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        self.lu().map(|lu| lu.solve(b))
    }

    pub fn inverse(&self) -> Option<CMatrix> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut out = CMatrix::zeros(n, n);
        let mut e = vec![Scalar::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = Scalar::zero());
            e[j] = Scalar::new(1.0, 0.0);
            out.column_mut(j).copy_from_slice(&lu.solve(&e));
        }
        Some(out)
    }

    /// Determinant (zero when the matrix is numerically singular).
    pub fn det(&self) -> Scalar {
        self.lu().map_or(Scalar::zero(), |lu| lu.det())
    }

    /// Returns a copy scaled so that its largest-modulus entry equals 1.
    pub fn normalized(&self) -> CMatrix {
        let mut m = self.clone();
        normalize_max_modulus(&mut m.data);
        m
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[j * self.rows + i]
    }
}

#[derive(Debug, Clone)]
pub struct Lu {
    a: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn solve(&self, b: &[Scalar]) -> Vec<Scalar> {
        let n = self.a.rows;
        let mut x: Vec<Scalar> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = x[k];
                x[i] -= self.a[(i, k)] * t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = x[k];
                x[i] -= self.a[(i, k)] * t;
            }
            x[i] /= self.a[(i, i)];
        }
        x
    }

    pub fn det(&self) -> Scalar {
        (0..self.a.rows).fold(Scalar::new(self.sign, 0.0), |acc, k| acc * self.a[(k, k)])
    }
}

pub fn norm(v: &[Scalar]) -> f64 {
    Float::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>())
}

/// Index of the entry with the largest modulus (first one on ties).
pub fn argmax_modulus(v: &[Scalar]) -> usize {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() {
            best = k;
        }
    }
    best
}

/// Divides `v` by its largest-modulus entry. Leaves a zero vector untouched.
pub fn normalize_max_modulus(v: &mut [Scalar]) {
    if v.is_empty() {
        return;
    }
    let p = v[argmax_modulus(v)];
    if p.norm() == 0.0 || !p.norm().is_finite() {
        return;
    }
    v.iter_mut().for_each(|x| *x /= p);
}

/// Sine of the Fubini-Study angle between two homogeneous vectors,
/// `|a ^ b| / (|a| |b|)`. Zero iff the vectors are proportional.
pub fn projective_distance(a: &[Scalar], b: &[Scalar]) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let mut wedge = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let a_i = a[i] / na;
            let a_j = a[j] / na;
            let b_i = b[i] / nb;
            let b_j = b[j] / nb;
            wedge += (a_i * b_j - a_j * b_i).norm_sqr();
        }
    }
    Float::sqrt(wedge).min(1.0)
}

/// Largest entrywise difference between two matrices after scaling each so
/// that the entry of largest modulus in `a` equals 1 (comparison up to an
/// overall scalar).
pub fn projective_matrix_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "dimension mismatch");
    let k = argmax_modulus(&a.data);
    if b.data[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    let sa = a.data[k];
    let sb = b.data[k];
    a.data.iter().zip(&b.data).fold(0.0, |m, (&x, &y)| m.max((x / sa - y / sb).norm()))
}
