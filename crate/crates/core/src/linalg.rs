//! Dense complex linear algebra kernel.
//!
//! Every numerical decision (rank, invertibility, membership) goes through a
//! single relative tolerance that callers pass explicitly. The numerical rank
//! of `M` at `tol` counts the eigenvalues of `M M*` that exceed `tol * ||M||^2`.
//!
//! Decompositions are delegated to `nalgebra` (Householder tridiagonalization
//! plus implicit QR for Hermitian matrices, complex Schur for unitaries, SVD for
//! norms); this module fixes ordering, tolerances and branch conventions on top.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for all rank and invertibility decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

const EIG_MAX_ITER: usize = 10_000;
const SCHUR_EPS_FACTORS: [f64; 4] = [1.0, 4.0, 64.0, 1024.0];

/// Dense complex matrix. Entries are exposed in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Both dimensions must be positive.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Real row-major entries. Panics on a length mismatch; meant for literals.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "from_real: wrong entry count");
        Self(DMatrix::from_fn(rows, cols, |i, j| {
            C64::new(entries[i * cols + j], 0.0)
        }))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn entries_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        self.0
            .clone()
            .try_svd(false, false, f64::EPSILON, EIG_MAX_ITER)
            .map(|svd| svd.singular_values.max())
            .unwrap_or_else(|| self.fro_norm())
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn block(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        Self(self.0.view((row, col), (nrows, ncols)).into_owned())
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        self.0
            .view_mut((row, col), block.shape())
            .copy_from(&block.0);
    }

    /// Vertical concatenation; all parts must share a column count.
    pub fn vstack(parts: &[ComplexMatrix]) -> Self {
        let cols = parts.first().map_or(0, |p| p.cols());
        let rows = parts.iter().map(|p| p.rows()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r = 0;
        for p in parts {
            assert_eq!(p.cols(), cols, "vstack: column mismatch");
            out.set_block(r, 0, p);
            r += p.rows();
        }
        out
    }

    /// Horizontal concatenation; all parts must share a row count.
    pub fn hstack(parts: &[ComplexMatrix]) -> Self {
        let rows = parts.first().map_or(0, |p| p.rows());
        let cols = parts.iter().map(|p| p.cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c = 0;
        for p in parts {
            assert_eq!(p.rows(), rows, "hstack: row mismatch");
            out.set_block(0, c, p);
            c += p.cols();
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `max(1, ||M||)`, the scale used for relative residuals.
    pub fn residual_scale(&self) -> f64 {
        self.norm().max(1.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// `||a - b||` in operator norm.
pub fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// `V f(Λ) V*`.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let k = self.eigenvalues.len();
        let mut scaled = v.clone();
        for j in 0..k {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * &v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| C64::new(x, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Columns whose eigenvalue satisfies `keep`.
    pub fn select_vectors(&self, mut keep: impl FnMut(f64) -> bool) -> ComplexMatrix {
        let cols: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&j| keep(self.eigenvalues[j]))
            .collect();
        let n = self.eigenvectors.rows();
        ComplexMatrix::from_fn(n, cols.len(), |i, j| self.eigenvectors[(i, cols[j])])
    }
}

fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    (m - &m.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects `M` when `||M - M*|| > tol * max(1, ||M||)`; otherwise the Hermitian
/// part is decomposed. Eigenvalues are returned in ascending order.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let residual = hermitian_residual(m);
    if residual > tol * m.residual_scale() {
        return Err(Error::NonHermitian { residual });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(EigDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let h = m.hermitian_part();
    let eig =
        h.0.try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `M^p` for Hermitian positive semidefinite `M`.
///
/// Eigenvalues in `[-tol*||M||, 0)` are treated as zero. Negative powers
/// require the smallest eigenvalue to exceed `tol`.
pub fn psd_power(m: &ComplexMatrix, p: f64, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    let scale = eig.max().abs().max(eig.min().abs()).max(1.0);
    if eig.min() < -tol * scale {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
        });
    }
    if p < 0.0 && eig.min() <= tol {
        return Err(Error::SingularMatrix {
            min_eigenvalue: eig.min(),
        });
    }
    let out = eig.map_spectrum(|x| {
        let x = x.max(0.0);
        if x == 0.0 {
            C64::new(if p == 0.0 { 1.0 } else { 0.0 }, 0.0)
        } else {
            C64::new(x.powf(p), 0.0)
        }
    });
    Ok(out.hermitian_part())
}

/// Inverse of a Hermitian positive definite matrix.
pub fn psd_inverse(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    psd_power(m, -1.0, tol)
}

/// Orthonormal basis (as columns) of the numerical range of `m`.
pub fn range_isometry(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let gram = (m * &m.adjoint()).hermitian_part();
    let eig = hermitian_eig(&gram, f64::INFINITY).expect("Gram matrix is Hermitian");
    let cutoff = tol * eig.max().max(0.0);
    if eig.max() <= 0.0 {
        return ComplexMatrix::zeros(m.rows(), 0);
    }
    eig.select_vectors(|x| x > cutoff)
}

/// Orthonormal basis of the range of an (approximate) orthogonal projection.
///
/// Cutoff is the absolute midpoint 1/2, so a projection that is zero up to
/// rounding has rank 0.
pub fn projection_isometry(p: &ComplexMatrix) -> ComplexMatrix {
    let eig =
        hermitian_eig(&p.hermitian_part(), f64::INFINITY).expect("Hermitian part is Hermitian");
    eig.select_vectors(|x| x > 0.5)
}

/// Number of eigenvalues of `M M*` above `tol * ||M||^2`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    range_isometry(m, tol).cols()
}

/// Orthogonal projection onto the numerical range of `m`.
pub fn range_projection(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let w = range_isometry(m, tol);
    if w.cols() == 0 {
        return ComplexMatrix::zeros(m.rows(), m.rows());
    }
    (&w * &w.adjoint()).hermitian_part()
}

/// Partial isometry of the polar decomposition `Y = Z |Y|`.
///
/// Computed as `Y (Y*Y)^{-1/2}` on the numerical support of `Y*Y`; eigenvalues
/// `<= tol * ||Y||^2` are discarded.
pub fn polar_partial_isometry(y: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let gram = (&y.adjoint() * y).hermitian_part();
    let eig = hermitian_eig(&gram, f64::INFINITY).expect("Gram matrix is Hermitian");
    let top = eig.max();
    if top <= 0.0 {
        return ComplexMatrix::zeros(y.rows(), y.cols());
    }
    let cutoff = tol * top;
    let inv_sqrt = eig.map_spectrum(|x| {
        if x > cutoff {
            C64::new(1.0 / x.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    y * &inv_sqrt
}

/// Minimum-norm least-squares solution `X` of `A X = B` via the SVD, with
/// singular values `<= tol * ||A||` discarded.
pub fn least_squares(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "least squares: {} rows on the left, {} on the right",
            a.rows(),
            b.rows()
        )));
    }
    let svd =
        a.0.clone()
            .try_svd(true, true, f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::NoConvergence)?;
    let cutoff = tol * svd.singular_values.max();
    let x = svd
        .solve(&b.0, cutoff)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    Ok(ComplexMatrix(x))
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let svd =
        m.0.clone()
            .try_svd(false, false, f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::NoConvergence)?;
    let mut v: Vec<f64> = svd.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Residual `||U*U - I||`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.rows())).norm()
}

/// Residual of the projection axioms, `max(||P - P*||, ||P^2 - P||)`.
pub fn projection_residual(p: &ComplexMatrix) -> f64 {
    if !p.is_square() {
        return f64::INFINITY;
    }
    hermitian_residual(p).max((&(p * p) - p).norm())
}

/// Principal Hermitian logarithm of a unitary: `exp(iH) = U`.
///
/// Each eigenvalue `e^{iφ}` of `U` maps to `φ ∈ (-π, π]`; an eigenvalue at
/// `-1` (including numerically perturbed ones just below the cut) maps to `+π`.
pub fn unitary_log(u: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "unitary_log needs a square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let residual = unitarity_residual(u);
    if residual > tol {
        return Err(Error::NonUnitary { residual });
    }
    let n = u.rows();
    // the QR sweep can stall at machine precision on near-identity input
    let schur = SCHUR_EPS_FACTORS
        .iter()
        .find_map(|&f| u.0.clone().try_schur(f * f64::EPSILON, EIG_MAX_ITER))
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let q = ComplexMatrix(q);
    let mut scaled = q.clone();
    for j in 0..n {
        let z = t[(j, j)];
        let mut phi = z.im.atan2(z.re);
        if phi <= -std::f64::consts::PI + 1e-12 {
            phi += 2.0 * std::f64::consts::PI;
        }
        for i in 0..n {
            scaled[(i, j)] *= C64::new(phi, 0.0);
        }
    }
    Ok((&scaled * &q.adjoint()).hermitian_part())
}

/// `exp(i t H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &ComplexMatrix, t: f64, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol)?;
    Ok(eig.map_spectrum(|x| C64::from_polar(1.0, t * x)))
}

/// Seeded generator used everywhere randomness is needed.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard complex normal sample: real and imaginary parts i.i.d. `N(0, 1/2)`,
/// so that `E|z|^2 = 1` and `E|z| = sqrt(π)/2`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex normal entries drawn in row-major order.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Deterministic random matrix: ChaCha20 seeded with `seed`, standard complex
/// normal entries (Ziggurat normals from `rand_distr`), filled row by row.
pub fn seeded_random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    random_matrix(rows, cols, &mut rng)
}

/// Random Hermitian matrix `(X + X*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitian_part()
}

/// Random unitary `exp(iH)` with `H` random Hermitian.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(n, rng);
    exp_i_hermitian(&h, 1.0, f64::INFINITY).expect("Hermitian by construction")
}

/// Smallest eigenvalue of the compression `W* M W`, where `W` spans the range
/// of the projection `p`. Returns `+inf` when the range is trivial.
pub fn min_eigenvalue_on_range(m: &ComplexMatrix, p: &ComplexMatrix, tol: f64) -> Result<f64> {
    let w = projection_isometry(p);
    if w.cols() == 0 {
        return Ok(f64::INFINITY);
    }
    let compressed = (&(&w.adjoint() * m) * &w).hermitian_part();
    Ok(hermitian_eig(&compressed, tol.max(1e-6))?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let m = ComplexMatrix::diag_real(&[2.0, 1.0]);
        let e = hermitian_eig(&m, DEFAULT_TOL).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        // eigenvectors are a permutation of the identity, up to phase
        for j in 0..2 {
            let col_max = (0..2)
                .map(|i| e.eigenvectors[(i, j)].norm())
                .fold(0.0, f64::max);
            assert!((col_max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_of_two_by_two() {
        // characteristic polynomial x^2 - 3x + 2
        let m = ComplexMatrix::from_real(2, 2, &[1.5, 0.5, 0.5, 1.5]);
        let e = hermitian_eig(&m, DEFAULT_TOL).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-13);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-13);
        assert!(distance(&e.reconstruct(), &m) < 1e-13);
    }

    #[test]
    fn eig_of_identity() {
        let e = hermitian_eig(&ComplexMatrix::identity(5), DEFAULT_TOL).unwrap();
        assert!(e.eigenvalues.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_eig(&m, DEFAULT_TOL),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn psd_power_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(distance(&psd_power(&id, -1.0, DEFAULT_TOL).unwrap(), &id) < 1e-14);

        let m = ComplexMatrix::from_real(2, 2, &[1.5, 0.5, 0.5, 1.5]);
        let inv = psd_power(&m, -1.0, DEFAULT_TOL).unwrap();
        // 2x2 inverse formula: det = 2
        let expected = ComplexMatrix::from_real(2, 2, &[0.75, -0.25, -0.25, 0.75]);
        assert!(distance(&inv, &expected) < 1e-13);

        let d = ComplexMatrix::diag_real(&[4.0, 9.0]);
        let root = psd_power(&d, 0.5, DEFAULT_TOL).unwrap();
        assert!(distance(&root, &ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-13);
    }

    #[test]
    fn psd_power_rejects_singular_negative_power() {
        let m = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(matches!(
            psd_power(&m, -0.5, DEFAULT_TOL),
            Err(Error::SingularMatrix { .. })
        ));
        // non-negative powers are fine
        assert!(psd_power(&m, 0.5, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn polar_examples() {
        let mut rng = seeded_rng(4);
        let u = random_unitary(3, &mut rng);
        assert!(distance(&polar_partial_isometry(&u, DEFAULT_TOL), &u) < 1e-12);

        let col = ComplexMatrix::from_real(2, 1, &[3.0, 4.0]);
        let z = polar_partial_isometry(&col, DEFAULT_TOL);
        assert!(distance(&z, &ComplexMatrix::from_real(2, 1, &[0.6, 0.8])) < 1e-14);

        let zero = ComplexMatrix::zeros(3, 2);
        assert_eq!(polar_partial_isometry(&zero, DEFAULT_TOL), zero);
    }

    #[test]
    fn range_projection_examples() {
        let id = ComplexMatrix::identity(4);
        assert!(distance(&range_projection(&id, DEFAULT_TOL), &id) < 1e-13);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexMatrix::from_real(2, 1, &[s, s]);
        let p = range_projection(&v, DEFAULT_TOL);
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(distance(&p, &expected) < 1e-14);

        let zero = ComplexMatrix::zeros(3, 3);
        assert_eq!(range_projection(&zero, DEFAULT_TOL), zero);
    }

    #[test]
    fn unitary_log_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(unitary_log(&id, DEFAULT_TOL).unwrap().norm() < 1e-14);

        let flip = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let h = unitary_log(&flip, DEFAULT_TOL).unwrap();
        assert!(distance(&h, &ComplexMatrix::diag_real(&[0.0, PI])) < 1e-14);

        let i_mat = ComplexMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        let h = unitary_log(&i_mat, DEFAULT_TOL).unwrap();
        assert!((h[(0, 0)] - c(PI / 2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unitary_log_branch_below_cut_maps_to_plus_pi() {
        let tiny = C64::from_polar(1.0, -PI + 1e-15);
        let u = ComplexMatrix::new(1, 1, vec![tiny]).unwrap();
        let h = unitary_log(&u, DEFAULT_TOL).unwrap();
        assert!(h[(0, 0)].re > 0.0);
    }

    #[test]
    fn unitary_log_rejects_non_unitary() {
        let m = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            unitary_log(&m, DEFAULT_TOL),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn seeded_matrix_is_deterministic() {
        let a = seeded_random_matrix(2, 2, 7);
        let b = seeded_random_matrix(2, 2, 7);
        assert_eq!(a.entries_row_major(), b.entries_row_major());
        let m = seeded_random_matrix(3, 2, 1);
        assert_eq!(m.shape(), (3, 2));
    }

    #[test]
    fn seeded_scalar_magnitude_matches_complex_normal() {
        // Monte-Carlo oracle: E|z| = sqrt(pi)/2 for a standard complex normal.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| seeded_random_matrix(1, 1, s)[(0, 0)].norm())
            .sum::<f64>()
            / n as f64;
        let expected = PI.sqrt() / 2.0;
        assert!((mean - expected).abs() < 0.05 * expected, "mean {mean}");
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn kron_and_stacks() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = a.kron(&ComplexMatrix::identity(2));
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k[(0, 2)], c(1.0, 0.0));
        assert_eq!(k[(1, 3)], c(1.0, 0.0));
        let v = ComplexMatrix::vstack(&[a.clone(), a.clone()]);
        assert_eq!(v.shape(), (4, 2));
        let h = ComplexMatrix::hstack(&[a.clone(), a]);
        assert_eq!(h.shape(), (2, 4));
    }
}
