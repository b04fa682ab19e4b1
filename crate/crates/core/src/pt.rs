//! The PT-symmetric two-level Hamiltonian family and its exact machinery.
//!
//! The family is
//!
//! ```text
//! H(s, α) = s · [ i·sin α   1      ]
//!               [ 1         -i·sin α ]
//! ```
//!
//! with real energy scale `s` (ħ = 1) and real non-Hermiticity `α` in
//! radians. `H` commutes with the combined action of parity (σ_x) and time
//! reversal (complex conjugation) for every `(s, α)`; it is Hermitian only
//! when `sin α = 0`. The eigenvalues `E± = ±s·cos α` stay real everywhere
//! except the breaking points `|sin α| = 1`, where the matrix becomes
//! defective and the propagator ceases to exist.
//!
//! Because the matrix depends on `α` only through `sin α`, any real `α` is
//! accepted and classification is periodic automatically. Parameters at the
//! breaking point, or within a narrow window just past it (`cos α < 0` and
//! `|sin α| ≥ 1 − 1e-9`, which catches truncated decimal spellings of ±π/2
//! such as `1.5708`), are rejected with [`Error::BrokenSymmetry`]. Approach
//! from inside (`cos α > 0`) is allowed arbitrarily close, so limits like
//! `α = −π/2 + 1e-6` remain usable.

use std::f64::consts::PI;

use crate::linalg::{c64, sigma_x, CMatrix, CVector, Complex64, I, ONE, ZERO};
use crate::{Error, Result};

/// Width (in `|sin α|`) of the rejection window on the far side of the
/// breaking point.
const BREAKING_SIN_WINDOW: f64 = 1e-9;

fn broken_at(alpha: f64) -> bool {
    let (sa, ca) = alpha.sin_cos();
    sa.abs() >= 1.0 || (ca < 0.0 && sa.abs() >= 1.0 - BREAKING_SIN_WINDOW)
}

/// A member of the PT-symmetric family, with its 2x2 matrix realized.
#[derive(Debug, Clone, PartialEq)]
pub struct PtHamiltonian {
    s: f64,
    alpha: f64,
    matrix: CMatrix,
}

impl PtHamiltonian {
    /// Build `H(s, α)`. `s = 0` is accepted (useful for algebra tests) but
    /// flagged trivial and rejected by the protocol. The breaking-point
    /// matrix itself is constructible; it is the spectral operations that
    /// refuse it.
    pub fn new(s: f64, alpha: f64) -> Result<Self> {
        if !s.is_finite() || !alpha.is_finite() {
            return Err(Error::NonFinite("PtHamiltonian parameters"));
        }
        let sa = alpha.sin();
        let matrix = CMatrix::mat2(
            c64(0.0, s * sa),
            c64(s, 0.0),
            c64(s, 0.0),
            c64(0.0, -s * sa),
        );
        Ok(Self { s, alpha, matrix })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `s = 0`: zero level splitting, no protocol time scale.
    pub fn is_trivial(&self) -> bool {
        self.s == 0.0
    }

    /// At or beyond the symmetry-breaking point (see module docs).
    pub fn is_broken(&self) -> bool {
        broken_at(self.alpha)
    }

    fn require_unbroken(&self) -> Result<()> {
        if self.is_broken() {
            Err(Error::BrokenSymmetry { alpha: self.alpha })
        } else {
            Ok(())
        }
    }
}

/// True iff `σ_x · conj(m) · σ_x == m` elementwise within 1e-12.
pub fn is_pt_symmetric(m: &CMatrix) -> bool {
    assert!(m.rows() == 2 && m.cols() == 2, "is_pt_symmetric expects a 2x2 matrix");
    let sx = sigma_x();
    let transformed = sx.mul(&m.conj()).mul(&sx);
    transformed.max_abs_diff(m) <= 1e-12
}

/// Closed-form eigensystem of an unbroken Hamiltonian.
///
/// The eigenvectors keep the conventional phase factors
/// `v₊ = e^{iα/2}/√(2 cos α) · (1, e^{-iα})` and
/// `v₋ = i·e^{-iα/2}/√(2 cos α) · (1, -e^{iα})`; they are not orthogonal and
/// not unit 2-norm. `tau = π/ΔE` is the evolution time used by the protocol
/// (infinite for the trivial `s = 0` Hamiltonian).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub v_plus: CVector,
    pub v_minus: CVector,
    pub delta_e: f64,
    pub tau: f64,
}

pub fn eigensystem(h: &PtHamiltonian) -> Result<EigenSystem> {
    h.require_unbroken()?;
    let (sa, ca) = h.alpha.sin_cos();
    debug_assert!(sa.abs() < 1.0);

    let e_plus = h.s * ca;
    let e_minus = -h.s * ca;
    let delta_e = e_plus - e_minus;
    let tau = PI / delta_e;

    // 1/sqrt(2 cos α) via the principal complex branch so that parameters
    // with cos α < 0 (e.g. α near π) still produce valid eigenvectors.
    let inv_root = ONE / c64(2.0 * ca, 0.0).sqrt();
    let half_phase = Complex64::from_polar(1.0, h.alpha / 2.0);

    let v_plus = CVector::new(vec![ONE, Complex64::from_polar(1.0, -h.alpha)])
        .scale(half_phase * inv_root);
    let v_minus = CVector::new(vec![ONE, -Complex64::from_polar(1.0, h.alpha)])
        .scale(I * half_phase.conj() * inv_root);

    Ok(EigenSystem { e_plus, e_minus, v_plus, v_minus, delta_e, tau })
}

/// Exact propagator `U(t) = exp(-i t H)`:
///
/// ```text
/// U(t) = (1/cos α) · [ cos(t' - α)   -i sin t' ]        t' = ΔE·t/2
///                    [ -i sin t'     cos(t' + α) ]
/// ```
///
/// For `sin α ≠ 0` this is not unitary in the 2-norm; it preserves the
/// metric inner product instead (see [`metric_operator`]).
pub fn evolution_operator(h: &PtHamiltonian, t: f64) -> Result<CMatrix> {
    h.require_unbroken()?;
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    let (_, ca) = h.alpha.sin_cos();
    let tp = h.s * ca * t; // ΔE·t/2
    let inv = c64(1.0 / ca, 0.0);
    Ok(CMatrix::mat2(
        c64((tp - h.alpha).cos(), 0.0) * inv,
        c64(0.0, -tp.sin()) * inv,
        c64(0.0, -tp.sin()) * inv,
        c64((tp + h.alpha).cos(), 0.0) * inv,
    ))
}

/// Hermitian positive-definite `η` with `H†η = ηH`, normalized to
/// `trace(η) = 2`. Defines the inner product `<u|η|v>` under which the
/// evolution is norm-preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOperator {
    pub eta: CMatrix,
    pub alpha: f64,
}

impl MetricOperator {
    /// Eigenvalues of η, descending. Both are strictly positive.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let ((l1, _), (l2, _)) = hermitian_eigensystem_2x2(&self.eta);
        (l1, l2)
    }

    /// Principal (positive) square root `ρ = η^{1/2}`.
    pub fn sqrt(&self) -> CMatrix {
        hermitian_function_2x2(&self.eta, f64::sqrt)
    }

    /// Inverse of the principal square root, `η^{-1/2}`.
    pub fn inv_sqrt(&self) -> CMatrix {
        hermitian_function_2x2(&self.eta, |x| 1.0 / x.sqrt())
    }
}

/// Construct the metric for an unbroken Hamiltonian by solving the linear
/// constraint `H†η = ηH` over Hermitian 2x2 matrices.
///
/// The Hermitian solution space is two-dimensional, so trace normalization
/// alone does not pin η down; among the trace-2 solutions the one with
/// maximal determinant is selected. That choice weighs the two spectral
/// directions equally, reduces to `η = I` at `α = 0`, and lands on
/// `η ∝ I + sin α·σ_y` for the family built here.
pub fn metric_operator(h: &PtHamiltonian) -> Result<MetricOperator> {
    h.require_unbroken()?;
    if h.is_trivial() {
        // H = 0 leaves η unconstrained; the maximal-determinant trace-2
        // choice is the identity.
        return Ok(MetricOperator { eta: CMatrix::identity(2), alpha: h.alpha });
    }

    // Hermitian coordinate basis for η = p·E00 + r·E11 + u·σ_x + w·Y where
    // Y = [[0, i], [-i, 0]].
    let basis = [
        CMatrix::mat2(ONE, ZERO, ZERO, ZERO),
        CMatrix::mat2(ZERO, ZERO, ZERO, ONE),
        sigma_x(),
        CMatrix::mat2(ZERO, I, -I, ZERO),
    ];

    // 8x4 real system: rows are Re/Im of the four entries of H†B - BH.
    let hd = h.matrix.adjoint();
    let mut a = [[0.0f64; 4]; 8];
    for (k, b) in basis.iter().enumerate() {
        let c = hd.mul(b).sub(&b.mul(&h.matrix));
        for i in 0..2 {
            for j in 0..2 {
                a[2 * (2 * i + j)][k] = c[(i, j)].re;
                a[2 * (2 * i + j) + 1][k] = c[(i, j)].im;
            }
        }
    }

    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let null = real_nullspace_8x4(&a, 1e-10 * scale);

    let solutions: Vec<CMatrix> = null
        .iter()
        .map(|coef| {
            let mut m = CMatrix::zeros(2, 2);
            for (c, b) in coef.iter().zip(&basis) {
                m = m.add(&b.scale(c64(*c, 0.0)));
            }
            m
        })
        .collect();

    let eta = max_det_trace2(&solutions)
        .ok_or(Error::BrokenSymmetry { alpha: h.alpha })?;

    // Hermitize away rounding and confirm positive-definiteness.
    let eta = eta.add(&eta.adjoint()).scale(c64(0.5, 0.0));
    let ((l1, _), (l2, _)) = hermitian_eigensystem_2x2(&eta);
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(Error::BrokenSymmetry { alpha: h.alpha });
    }
    debug_assert!(hd.mul(&eta).max_abs_diff(&eta.mul(&h.matrix)) <= 1e-9 * h.s.abs().max(1.0));

    Ok(MetricOperator { eta, alpha: h.alpha })
}

/// Among `span(solutions) ∩ {trace = 2}`, the maximal-determinant element.
fn max_det_trace2(solutions: &[CMatrix]) -> Option<CMatrix> {
    // Pick the basis element with the largest trace as the particular
    // solution carrier and make every other direction traceless.
    let traces: Vec<f64> = solutions.iter().map(|m| m.trace().re).collect();
    let (pivot, pivot_trace) = traces
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    if pivot_trace.abs() <= 1e-12 {
        return None; // no trace-2 element in the span
    }

    let base = solutions[pivot].scale(c64(2.0 / pivot_trace, 0.0));
    let mut eta = base.clone();
    for (k, m) in solutions.iter().enumerate() {
        if k == pivot {
            continue;
        }
        let dir = m.sub(&solutions[pivot].scale(c64(traces[k] / pivot_trace, 0.0)));
        // det(eta + θ·dir) is quadratic in θ with negative leading
        // coefficient (dir is traceless Hermitian), so the maximum is at
        // θ* = -b/(2a).
        let a2 = det2_re(&dir);
        let b1 = det_polarization(&eta, &dir);
        if a2.abs() > 1e-14 {
            let theta = -b1 / (2.0 * a2);
            eta = eta.add(&dir.scale(c64(theta, 0.0)));
        }
    }
    Some(eta)
}

fn det2_re(m: &CMatrix) -> f64 {
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

/// Bilinear term of det(X + Y) - det(X) - det(Y) for 2x2 matrices.
fn det_polarization(x: &CMatrix, y: &CMatrix) -> f64 {
    (x[(0, 0)] * y[(1, 1)] + y[(0, 0)] * x[(1, 1)] - x[(0, 1)] * y[(1, 0)] - y[(0, 1)] * x[(1, 0)])
        .re
}

/// Null-space basis of an 8x4 real matrix by Gauss-Jordan elimination with
/// partial pivoting. Entries below `tol` are treated as zero.
fn real_nullspace_8x4(a: &[[f64; 4]; 8], tol: f64) -> Vec<[f64; 4]> {
    let mut m = *a;
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..4 {
        let (best_row, best_val) = (r..8)
            .map(|i| (i, m[i][c].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if best_val <= tol {
            continue;
        }
        m.swap(r, best_row);
        let p = m[r][c];
        for x in m[r].iter_mut() {
            *x /= p;
        }
        for i in 0..8 {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    let pivot_row = m[r];
                    for (x, p) in m[i].iter_mut().zip(pivot_row) {
                        *x -= f * p;
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == 8 {
            break;
        }
    }

    let mut basis = Vec::new();
    for c in 0..4 {
        if pivot_cols.contains(&c) {
            continue;
        }
        let mut v = [0.0; 4];
        v[c] = 1.0;
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[row][c];
        }
        basis.push(v);
    }
    basis
}

/// Spectral decomposition of a Hermitian 2x2 matrix: ((λ1, v1), (λ2, v2))
/// with λ1 ≥ λ2 and orthonormal eigenvectors.
fn hermitian_eigensystem_2x2(m: &CMatrix) -> ((f64, CVector), (f64, CVector)) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let disc = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
    let l1 = 0.5 * (a + d + disc);
    let l2 = 0.5 * (a + d - disc);

    let scale = m.max_abs().max(1e-300);
    if b.norm() <= 1e-15 * scale {
        // Already diagonal.
        return if a >= d {
            ((l1, CVector::basis(2, 0)), (l2, CVector::basis(2, 1)))
        } else {
            ((l1, CVector::basis(2, 1)), (l2, CVector::basis(2, 0)))
        };
    }
    let v1 = CVector::new(vec![b, c64(l1 - a, 0.0)]).normalized();
    let v2 = CVector::new(vec![b, c64(l2 - a, 0.0)]).normalized();
    ((l1, v1), (l2, v2))
}

/// Apply a real function to a Hermitian 2x2 matrix through its spectrum.
fn hermitian_function_2x2(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let ((l1, v1), (l2, v2)) = hermitian_eigensystem_2x2(m);
    v1.outer(&v1)
        .scale(c64(f(l1), 0.0))
        .add(&v2.outer(&v2).scale(c64(f(l2), 0.0)))
}

/// Similarity-transform `H` into its Hermitian counterpart
/// `h' = ρ·H·ρ⁻¹` with `ρ = η^{1/2}`. The result is Hermitian with the same
/// spectrum `±s·cos α`.
pub fn hermitian_counterpart(h: &PtHamiltonian, eta: &MetricOperator) -> Result<CMatrix> {
    let (l1, l2) = eta.eigenvalues();
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(Error::BrokenSymmetry { alpha: eta.alpha });
    }
    let rho = eta.sqrt();
    let rho_inv = eta.inv_sqrt();
    Ok(rho.mul(h.matrix()).mul(&rho_inv))
}

/// Metric inner product `u†·η·v`.
pub fn pt_inner(u: &CVector, v: &CVector, eta: &MetricOperator) -> Result<Complex64> {
    if u.dim() != v.dim() || u.dim() != eta.eta.rows() {
        return Err(Error::DimensionMismatch(format!(
            "pt_inner: u dim {}, v dim {}, eta dim {}",
            u.dim(),
            v.dim(),
            eta.eta.rows()
        )));
    }
    Ok(u.inner(&eta.eta.matvec(v)))
}

/// Result of [`canonicalize`]: `m = shift·I + H(s, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub s: f64,
    pub alpha: f64,
    pub shift: f64,
}

/// Decompose a PT-symmetric matrix as a real trace shift plus a member of
/// the `H(s, α)` family.
///
/// Only trace-shifted members are recovered: the off-diagonal entries must
/// be real and equal after the shift is removed, and the imaginary diagonal
/// must not exceed the coupling (otherwise no real `α` exists). Matrices
/// outside that orbit are reachable from the family only through a basis
/// change, which is deliberately unsupported; they are reported as
/// [`Error::NotCanonicalizable`]. `α` is returned in the principal branch
/// `[-π/2, π/2]`, which inverts the construction for `|α| < π/2`.
pub fn canonicalize(m: &CMatrix) -> Result<CanonicalForm> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "canonicalize expects a 2x2 matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !is_pt_symmetric(m) {
        return Err(Error::NotPtSymmetric);
    }

    let scale = m.max_abs().max(1.0);
    let tol = 1e-10 * scale;

    // PT symmetry forces the trace to be real.
    let shift = m.trace().re / 2.0;
    let m0 = m.sub(&CMatrix::identity(2).scale(c64(shift, 0.0)));

    if m0.max_abs() <= tol {
        return Err(Error::NotCanonicalizable {
            reason: "trivial: multiple of identity".into(),
        });
    }

    let b = m0[(0, 1)];
    if b.im.abs() > tol {
        return Err(Error::NotCanonicalizable {
            reason: "off-diagonal entries are not real after trace removal".into(),
        });
    }
    let s = b.re;
    if s.abs() <= tol {
        return Err(Error::NotCanonicalizable {
            reason: "off-diagonal coupling vanishes".into(),
        });
    }

    let ratio = m0[(0, 0)].im / s;
    if ratio.abs() > 1.0 + 1e-12 {
        return Err(Error::NotCanonicalizable {
            reason: "imaginary diagonal exceeds the coupling: no real alpha exists".into(),
        });
    }
    let alpha = ratio.clamp(-1.0, 1.0).asin();

    Ok(CanonicalForm { s, alpha, shift })
}

/// Block-diagonal embedding `H ⊕ filler·I_{n-2}` into n dimensions. The top
/// 2x2 block reproduces all protocol statistics of `h` exactly.
pub fn embed(h: &PtHamiltonian, n: usize, filler: f64) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::InvalidRange(format!("embedding dimension {n} < 2")));
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = h.matrix()[(i, j)];
        }
    }
    for i in 2..n {
        out[(i, i)] = c64(filler, 0.0);
    }
    Ok(out)
}
