//! Dense complex matrices and Hermitian eigendecomposition for small systems.
//!
//! Every model in this crate lives in a Hilbert space of dimension at most
//! [`MAX_DIM`], so the eigensolver is a cyclic Jacobi iteration with a fixed
//! pivot order: simple, backward stable, and bit-reproducible from run to run,
//! which the deterministic CSV outputs rely on. Eigenvector phases follow a
//! fixed convention (largest-magnitude component made real positive).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

/// Relative tolerance for the Hermiticity check at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Adjacent eigenvalues closer than this (relative to the Frobenius norm)
/// raise the near-degeneracy flag on [`EigenSystem`].
pub const NEAR_DEGENERACY_TOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense complex square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must equal dim^2");
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            self[(i, j)] = v[i];
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matvec dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermitian symmetry,
    /// max |A[i][j] - conj(A[j][i])|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl std::ops::Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Frobenius norm sqrt(tr(A^dag A)).
pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.entries()
        .iter()
        .map(|e| e.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Commutator AB - BA; anti-Hermitian when both arguments are Hermitian.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(&a.matmul(b) - &b.matmul(a))
}

/// Inner product <a|b> with the left argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex square matrix validated to be Hermitian at construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Checks max |A[i][j] - conj(A[j][i])| <= 1e-12 * max|A|.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let scale = mat.max_abs();
        let tol = HERMITICITY_TOL * scale;
        let residual = mat.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(Self { mat })
    }

    /// Replaces the matrix by its Hermitian part (A + A^dag)/2. Used for
    /// products like U A U^dag whose roundoff asymmetry is harmless.
    pub fn symmetrized(mat: ComplexMatrix) -> Self {
        let n = mat.dim();
        let sym = ComplexMatrix::from_fn(n, |i, j| 0.5 * (mat[(i, j)] + mat[(j, i)].conj()));
        Self { mat: sym }
    }

    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_residual() <= 1e-10 * mat.max_abs().max(1e-300));
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

impl std::ops::Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.scale(C64::new(rhs, 0.0)),
        }
    }
}

/// Result of a Hermitian eigendecomposition: eigenvalues ascending,
/// eigenvectors as orthonormal columns under the fixed phase convention.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    /// Set when some adjacent gap is below `NEAR_DEGENERACY_TOL * ||A||_F`;
    /// downstream coupling computations refuse such frames.
    pub near_degenerate: bool,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// Smallest gap between adjacent (sorted) eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Output is deterministic for identical input: fixed pivot order, ascending
/// eigenvalues (stable sort), and each eigenvector rotated so its
/// largest-magnitude component is real positive.
pub fn hermitian_eig(a: &HermitianOperator) -> Result<EigenSystem> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut vecs = ComplexMatrix::identity(n);
    let anorm = frobenius_norm(&m);

    if n <= 1 || anorm == 0.0 {
        let values = (0..n).map(|i| m[(i, i)].re).collect();
        return Ok(finish_eig(values, vecs, anorm));
    }

    let conv_tol = f64::EPSILON * anorm;
    let rotation_floor = conv_tol / ((n * n) as f64);
    let mut converged = false;
    let mut sweeps_used = 0;

    for sweep in 0..MAX_JACOBI_SWEEPS {
        sweeps_used = sweep + 1;
        let off = off_diagonal_norm(&m);
        if off <= conv_tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= rotation_floor {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                // Smaller-magnitude root of t^2 + 2*theta*t - 1 = 0.
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = phase * (t * c);

                apply_rotation(&mut m, p, q, c, s);
                // Kill roundoff drift: the pivot is zero and diagonals real
                // by construction.
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

                // Accumulate V <- V * U (columns p, q).
                for k in 0..n {
                    let vkp = vecs[(k, p)];
                    let vkq = vecs[(k, q)];
                    vecs[(k, p)] = c * vkp - s.conj() * vkq;
                    vecs[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    if !converged && off_diagonal_norm(&m) > conv_tol {
        return Err(Error::EigenNonConvergence {
            sweeps: sweeps_used,
            off: off_diagonal_norm(&m),
        });
    }

    let values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(finish_eig(values, vecs, anorm))
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += 2.0 * m[(i, j)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// A <- U^dag A U for the Jacobi rotation U acting on rows/columns (p, q):
/// U[p][p] = c, U[p][q] = s, U[q][p] = -conj(s), U[q][q] = c.
fn apply_rotation(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: C64) {
    let n = m.dim();
    // A <- A U (columns p, q).
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = c * akp - s.conj() * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    // A <- U^dag A (rows p, q).
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s.conj() * apk + c * aqk;
    }
}

fn finish_eig(values: Vec<f64>, vecs: ComplexMatrix, anorm: f64) -> EigenSystem {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());

    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vecs = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vecs.col(src);
        fix_phase(&mut col);
        sorted_vecs.set_col(dst, &col);
    }

    let min_gap = sorted_values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let near_degenerate = n > 1 && min_gap < NEAR_DEGENERACY_TOL * anorm;

    EigenSystem {
        values: sorted_values,
        vectors: sorted_vecs,
        near_degenerate,
    }
}

/// Rotate a vector's global phase so its largest-magnitude component (first
/// such index on ties) is real positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut k = 0;
    let mut best = 0.0_f64;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm();
        if m > best {
            best = m;
            k = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = v[k].conj() / best;
    for x in v.iter_mut() {
        *x *= phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::assert_close;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // 3x3 spin-1 x-component, built by hand to stay independent of `spin`.
    fn sx3() -> ComplexMatrix {
        let f = 1.0 / 2.0_f64.sqrt();
        ComplexMatrix::from_fn(3, |i, j| {
            if i.abs_diff(j) == 1 {
                c(f, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn eig_of_diagonal_is_trivial() {
        let m = ComplexMatrix::from_real_diag(&[-1.0, 0.0, 1.0]);
        let eig = hermitian_eig(&HermitianOperator::new(m).unwrap()).unwrap();
        assert_eq!(eig.values, vec![-1.0, 0.0, 1.0]);
        assert!(eig.vectors.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        assert!(!eig.near_degenerate);
    }

    #[test]
    fn eig_spin1_sx_values() {
        // Oracle: the characteristic polynomial of the 3x3 matrix,
        // det(Sx - x I) = -x^3 + x, has roots -1, 0, 1.
        let a = HermitianOperator::new(sx3()).unwrap();
        let eig = hermitian_eig(&a).unwrap();
        for (got, want) in eig.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert_close(*got, want, 1e-12);
        }
        for &x in &eig.values {
            assert_close(-x * x * x + x, 0.0, 1e-12);
        }
    }

    #[test]
    fn eig_scaled_sx() {
        let a = HermitianOperator::new(sx3().scale(c(0.1, 0.0))).unwrap();
        let eig = hermitian_eig(&a).unwrap();
        for (got, want) in eig.values.iter().zip([-0.1, 0.0, 0.1]) {
            assert_close(*got, want, 1e-12);
        }
    }

    #[test]
    fn eig_reconstructs_matrix() {
        let a = HermitianOperator::new(sx3()).unwrap();
        let eig = hermitian_eig(&a).unwrap();
        let d = ComplexMatrix::from_real_diag(&eig.values);
        let rebuilt = eig.vectors.matmul(&d).matmul(&eig.vectors.adjoint());
        assert!(rebuilt.max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn eig_phase_convention_is_deterministic() {
        let a = HermitianOperator::new(ComplexMatrix::from_fn(3, |i, j| {
            if i == j {
                c(i as f64, 0.0)
            } else if i < j {
                c(0.3, 0.4 * (j - i) as f64)
            } else {
                c(0.3, -0.4 * (i - j) as f64)
            }
        }))
        .unwrap();
        let e1 = hermitian_eig(&a).unwrap();
        let e2 = hermitian_eig(&a).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors.entries(), e2.vectors.entries());
        // Largest component of each column real positive.
        for k in 0..3 {
            let col = e1.vectors.col(k);
            let max = col.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let lead = col.iter().find(|x| x.norm() == max).unwrap();
            assert_close(lead.im, 0.0, 1e-14);
            assert!(lead.re > 0.0);
        }
    }

    #[test]
    fn near_degenerate_flag() {
        let m = ComplexMatrix::from_real_diag(&[0.0, 1e-12, 1.0]);
        let eig = hermitian_eig(&HermitianOperator::new(m).unwrap()).unwrap();
        assert!(eig.near_degenerate);
        assert!(eig.min_gap() <= 1e-12);
    }

    #[test]
    fn frobenius_norm_examples() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3)), 0.0);
        assert_close(frobenius_norm(&ComplexMatrix::identity(3)), 3.0_f64.sqrt(), 1e-15);
        // Spin-1 Sy has eigenvalues -1, 0, 1, so ||Sy||^2 = 2.
        let f = 1.0 / 2.0_f64.sqrt();
        let sy = ComplexMatrix::from_fn(3, |i, j| {
            if j == i + 1 {
                c(0.0, -f)
            } else if i == j + 1 {
                c(0.0, f)
            } else {
                c(0.0, 0.0)
            }
        });
        assert_close(frobenius_norm(&sy), 2.0_f64.sqrt(), 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let a = sx3();
        let zero = commutator(&a, &a).unwrap();
        assert!(frobenius_norm(&zero) < 1e-15);
        let id = ComplexMatrix::identity(3);
        assert!(frobenius_norm(&commutator(&id, &a).unwrap()) < 1e-15);
        let bad = commutator(&a, &ComplexMatrix::identity(2));
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermitian_check_rejects_asymmetry() {
        let mut m = sx3();
        m[(0, 1)] += c(1e-6, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
