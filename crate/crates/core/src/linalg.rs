//! Minimal exact complex linear algebra for dimensions 2 and 4.
//!
//! Matrices are dense, row-major `Vec<Complex64>`. The tensor (Kronecker)
//! index convention is fixed globally: the *first* factor is the slow index,
//! `(a ⊗ b)[i·dim_b + k, j·dim_b + l] = a[i,j]·b[k,l]`. In the protocol this
//! makes Alice the first factor everywhere.
//!
//! Tolerances used throughout the crate: `1e-10` for algebraic identities
//! built from several operations, `1e-12` for direct closed-form scalar
//! comparisons.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::{Error, Result};

pub type Complex64 = Complex<f64>;

pub const ZERO: Complex64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex { re: 0.0, im: 1.0 };

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

/// Default tolerance for algebraic identities.
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Default tolerance for closed-form scalar comparisons.
pub const TOL_CLOSED_FORM: f64 = 1e-12;

/// Eigenvalue gap and eigenvector alignment below this threshold together
/// mark a 2x2 matrix as defective.
const DEFECTIVE_TOL: f64 = 1e-8;

/// A dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![ZERO; dim] }
    }

    /// Computational basis vector |index> in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { data: self.data.iter().map(|c| c * factor).collect() }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(c64(1.0 / n, 0.0))
    }

    pub fn add(&self, other: &CVector) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CVector) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Tensor product `|self> ⊗ |other>`; `self` is the slow (first) index.
    pub fn tensor(&self, other: &CVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &CVector) -> CMatrix {
        let rows = self.dim();
        let cols = other.dim();
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    /// Largest elementwise absolute difference.
    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

/// A dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        Self { data, rows, cols }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: vec![ZERO; rows * cols], rows, cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// 2x2 matrix from its four entries in reading order.
    pub fn mat2(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Self::new(2, 2, vec![m00, m01, m10, m11])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matvec dimension mismatch");
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            data: self.data.iter().map(|c| c * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            data: self.data.iter().map(|c| c.conj()).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise absolute difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> CVector {
        let mut v = CVector::zeros(self.rows);
        for i in 0..self.rows {
            v[i] = self[(i, j)];
        }
        v
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Pauli σ_x.
pub fn sigma_x() -> CMatrix {
    CMatrix::mat2(ZERO, ONE, ONE, ZERO)
}

/// Pauli σ_y.
pub fn sigma_y() -> CMatrix {
    CMatrix::mat2(ZERO, -I, I, ZERO)
}

/// Pauli σ_z.
pub fn sigma_z() -> CMatrix {
    CMatrix::mat2(ONE, ZERO, ZERO, -ONE)
}

/// Kronecker product with the first factor as the slow index:
/// `out[i·dim_b + k, j·dim_b + l] = a[i,j]·b[k,l]`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    debug_assert!(a.is_finite() && b.is_finite());
    let mut out = CMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Trace out the first (slow-index) qubit of a two-qubit density matrix:
/// `out[k,l] = Σ_i rho[i·2 + k, i·2 + l]`.
pub fn partial_trace_first(rho: &CMatrix) -> Result<CMatrix> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace_first expects a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = CMatrix::zeros(2, 2);
    for k in 0..2 {
        for l in 0..2 {
            out[(k, l)] = rho[(k, l)] + rho[(2 + k, 2 + l)];
        }
    }
    Ok(out)
}

/// Both eigenpairs of a 2x2 matrix via the quadratic characteristic
/// polynomial. Eigenvectors have unit 2-norm with their largest component
/// rotated to the positive real axis. Ordering: larger real part first,
/// ties broken by larger imaginary part.
///
/// A repeated eigenvalue with (numerically) a single eigenvector is reported
/// as [`Error::Defective`]; a repeated eigenvalue on a scalar matrix returns
/// the canonical basis pair.
pub fn eig2(m: &CMatrix) -> Result<[(Complex64, CVector); 2]> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "eig2 expects a 2x2 matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eig2 input"));
    }

    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let half = c64(0.5, 0.0);
    let mut l1 = (tr + disc) * half;
    let mut l2 = (tr - disc) * half;
    if (l1.re, l1.im) < (l2.re, l2.im) {
        std::mem::swap(&mut l1, &mut l2);
    }

    let scale = m.max_abs().max(1e-300);

    // Scalar matrix: every vector is an eigenvector; return the basis pair.
    let off = m[(0, 1)].norm().max(m[(1, 0)].norm());
    let diag_gap = (m[(0, 0)] - m[(1, 1)]).norm();
    if off <= 1e-15 * scale && diag_gap <= 1e-15 * scale {
        return Ok([(l1, CVector::basis(2, 0)), (l2, CVector::basis(2, 1))]);
    }

    let v1 = eigvec2(m, l1);
    let v2 = eigvec2(m, l2);

    let gap = (l1 - l2).norm();
    let alignment = v1.inner(&v2).norm(); // both unit vectors
    if gap <= DEFECTIVE_TOL * scale && 1.0 - alignment <= DEFECTIVE_TOL {
        return Err(Error::Defective);
    }

    Ok([(l1, v1), (l2, v2)])
}

/// Unit eigenvector of a 2x2 matrix for the eigenvalue `l`, built from the
/// better-conditioned of the two null-space formulas.
fn eigvec2(m: &CMatrix, l: Complex64) -> CVector {
    let cand_a = CVector::new(vec![m[(0, 1)], l - m[(0, 0)]]);
    let cand_b = CVector::new(vec![l - m[(1, 1)], m[(1, 0)]]);
    let v = if cand_a.norm() >= cand_b.norm() { cand_a } else { cand_b };
    phase_canonical(&v.normalized())
}

/// Rotate the global phase so the largest-magnitude component is real and
/// positive. Purely cosmetic but keeps outputs deterministic.
fn phase_canonical(v: &CVector) -> CVector {
    let mut idx = 0;
    let mut best = 0.0;
    for i in 0..v.dim() {
        let n = v[i].norm();
        if n > best {
            best = n;
            idx = i;
        }
    }
    if best == 0.0 {
        return v.clone();
    }
    v.scale(v[idx].conj() / c64(best, 0.0))
}

/// Series matrix exponential `exp(-i·t·m)` by scaling and squaring.
///
/// The scaled matrix is pushed below norm 1/4 and summed with a 16-term
/// Taylor series (truncation error below 1e-25 at that norm), then squared
/// back up. Intended purely as a verification oracle for closed-form
/// propagators; on the domain exercised by this crate (‖t·m‖ up to a few
/// hundred) the residual stays below 1e-12.
pub fn expm_oracle(m: &CMatrix, t: f64) -> CMatrix {
    assert!(m.is_square(), "expm_oracle expects a square matrix");
    assert!(m.is_finite() && t.is_finite(), "expm_oracle expects finite input");

    let n = m.rows();
    let a = m.scale(c64(0.0, -t)); // -i t m

    let norm = a.frobenius_norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(c64(1.0 / 2f64.powi(squarings as i32), 0.0));

    // Horner evaluation of sum_{k=0}^{16} scaled^k / k!
    const ORDER: u64 = 16;
    let mut result = CMatrix::identity(n);
    for k in (1..=ORDER).rev() {
        result = scaled.mul(&result).scale(c64(1.0 / k as f64, 0.0));
        for i in 0..n {
            result[(i, i)] += ONE;
        }
    }

    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}
