//! Dense complex linear algebra for small dimensions (D ≤ 8).
//!
//! Everything here is built on a cyclic Jacobi method: Hermitian matrices are
//! diagonalized directly, unitaries by jointly diagonalizing their Hermitian
//! and skew-Hermitian parts. Norms, the matrix exponential `e^{iH}` and the
//! principal logarithm relative to a reference unitary follow from those
//! decompositions.

mod eigen;
mod matrix;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use matrix::ComplexMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix data of length {len} is not square for dimension {dim}")]
    NotSquare { dim: usize, len: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not unitary: ‖M†M − 𝟙‖ = {defect:e} exceeds {tol:e}")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("matrix is not Hermitian: ‖M − M†‖ = {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("eigenphase {phase} lies on the branch cut at −π")]
    BranchAmbiguity { phase: f64 },
}

/// Validation tolerances. The defaults are a few hundred machine epsilons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub unitary: f64,
    pub hermitian: f64,
    /// Minimum distance of an eigenphase from the branch cut at −π.
    pub branch: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitary: 1e-12,
            hermitian: 1e-12,
            branch: 1e-12,
        }
    }
}

/// A matrix validated to satisfy `‖M†M − 𝟙‖ ≤ tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(m, Tolerances::default().unitary)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        let defect = m.unitarity_defect();
        if defect > tol {
            return Err(LinalgError::NotUnitary { defect, tol });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is unitary by construction (products, exponentials).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.unitarity_defect() < 1e-9, "untrusted unitary");
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// `e^{iφ} U`.
    pub fn with_phase(&self, phase: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, phase)))
    }

    /// Operator-norm distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        operator_norm(&(&self.0 - &other.0))
    }
}

/// A matrix validated to satisfy `‖M − M†‖ ≤ tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(m, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        let defect = operator_norm(&(&m - &m.adjoint()));
        if defect > tol {
            return Err(LinalgError::NotHermitian { defect, tol });
        }
        Ok(Self(m))
    }

    /// Symmetrizes `(M + M†)/2`; always Hermitian.
    pub fn symmetrized(m: &ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn norm(&self) -> f64 {
        operator_norm(&self.0)
    }

    /// Real Frobenius inner product `Re Tr(A B)`.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.0.inner(&other.0).re
    }

    /// Real coordinates w.r.t. an orthonormal basis of the Hermitian matrices
    /// under the Frobenius inner product (diagonal entries, then √2·Re and
    /// √2·Im of the upper triangle).
    pub fn to_real_coords(&self) -> Vec<f64> {
        let n = self.dim();
        let mut v = Vec::with_capacity(n * n);
        for k in 0..n {
            v.push(self.0[(k, k)].re);
        }
        let s = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in i + 1..n {
                v.push(s * self.0[(i, j)].re);
                v.push(s * self.0[(i, j)].im);
            }
        }
        v
    }

    pub fn from_real_coords(dim: usize, v: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = Complex64::new(v[k], 0.0);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut idx = dim;
        for i in 0..dim {
            for j in i + 1..dim {
                let z = Complex64::new(s * v[idx], s * v[idx + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                idx += 2;
            }
        }
        Self(m)
    }
}

/// Eigendecomposition `M = Q diag(λ) Q†` of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &HermitianMatrix) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    let mut mats = [h.0.clone()];
    let q = eigen::joint_diagonalize(&mut mats)?;
    let n = h.dim();
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|k| (mats[0][(k, k)].re, k)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sorted = ComplexMatrix::zeros(n);
    for (new, &(_, old)) in pairs.iter().enumerate() {
        for i in 0..n {
            sorted[(i, new)] = q[(i, old)];
        }
    }
    Ok((pairs.into_iter().map(|p| p.0).collect(), sorted))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(h: &HermitianMatrix) -> Result<Vec<f64>, LinalgError> {
    eigh(h).map(|(w, _)| w)
}

/// Eigendecomposition `U = Q diag(λ) Q†` of a unitary matrix.
pub fn eig_unitary(u: &UnitaryMatrix) -> Result<(Vec<Complex64>, UnitaryMatrix), LinalgError> {
    let m = u.matrix();
    let mut mats = [m.hermitian_part(), m.skew_part()];
    let q = eigen::joint_diagonalize(&mut mats)?;
    let d = &(&q.adjoint() * m) * &q;
    let lambda = (0..m.dim())
        .map(|k| {
            let z = d[(k, k)];
            let r = z.norm();
            if r > 0.0 {
                z / r
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok((lambda, UnitaryMatrix(q)))
}

/// Smallest arc of the unit circle containing every eigenvalue of a unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseArc {
    /// Midpoint of the arc, in `(−π, π]`.
    pub center: f64,
    /// Angular length, in `[0, 2π)`.
    pub length: f64,
}

pub fn eigenphase_arc(u: &UnitaryMatrix) -> Result<PhaseArc, LinalgError> {
    let (lambda, _) = eig_unitary(u)?;
    let mut phases: Vec<f64> = lambda.iter().map(|z| z.arg()).collect();
    phases.sort_by(f64::total_cmp);
    let n = phases.len();
    // Largest gap between circularly consecutive phases; the arc is its complement.
    let mut best_gap = phases[0] + 2.0 * PI - phases[n - 1];
    let mut start = phases[0];
    for k in 0..n - 1 {
        let gap = phases[k + 1] - phases[k];
        if gap > best_gap {
            best_gap = gap;
            start = phases[k + 1];
        }
    }
    let length = (2.0 * PI - best_gap).max(0.0);
    let mut center = start + 0.5 * length;
    if center > PI {
        center -= 2.0 * PI;
    }
    Ok(PhaseArc { center, length })
}

/// Largest singular value.
///
/// Hermitian input uses its eigenvalues directly; otherwise the square root of
/// the largest eigenvalue of `M†M`, which the Jacobi method resolves to full
/// relative precision.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let f = m.frobenius_norm();
    if f == 0.0 {
        return 0.0;
    }
    if is_exactly_hermitian(m) {
        let h = HermitianMatrix(m.clone());
        return match eigvalsh(&h) {
            Ok(w) => w.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())),
            Err(_) => f,
        };
    }
    let g = (&m.adjoint() * m).hermitian_part();
    match eigvalsh(&HermitianMatrix(g)) {
        Ok(w) => w.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f,
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = if is_exactly_hermitian(m) {
        eigvalsh(&HermitianMatrix(m.clone()))
            .map(|w| w.into_iter().map(f64::abs).collect())
            .unwrap_or_default()
    } else {
        let g = (&m.adjoint() * m).hermitian_part();
        eigvalsh(&HermitianMatrix(g))
            .map(|w| w.into_iter().map(|x| x.max(0.0).sqrt()).collect())
            .unwrap_or_default()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn is_exactly_hermitian(m: &ComplexMatrix) -> bool {
    let n = m.dim();
    let scale = m.max_abs();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > 4.0 * f64::EPSILON * scale {
                return false;
            }
        }
    }
    true
}

/// `e^{iH}` via the eigendecomposition of `H`.
pub fn expi(h: &HermitianMatrix) -> Result<UnitaryMatrix, LinalgError> {
    let (w, q) = eigh(h)?;
    let phases: Vec<Complex64> = w.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
    let d = ComplexMatrix::diagonal(&phases);
    Ok(UnitaryMatrix(&(&q * &d) * &q.adjoint()))
}

/// Principal `H` with `U = V e^{iH}`, eigenvalues in `[−π, π)`.
pub fn principal_log_relative(
    v: &UnitaryMatrix,
    u: &UnitaryMatrix,
) -> Result<HermitianMatrix, LinalgError> {
    principal_log_relative_with(v, u, Tolerances::default().branch)
}

pub fn principal_log_relative_with(
    v: &UnitaryMatrix,
    u: &UnitaryMatrix,
    branch_tol: f64,
) -> Result<HermitianMatrix, LinalgError> {
    if v.dim() != u.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: v.dim(),
            right: u.dim(),
        });
    }
    let x = v.adjoint().compose(u);
    let (lambda, q) = eig_unitary(&x)?;
    let mut phases = Vec::with_capacity(lambda.len());
    for z in lambda {
        let mut theta = z.arg();
        if theta >= PI - branch_tol || theta <= -PI + branch_tol {
            return Err(LinalgError::BranchAmbiguity { phase: theta });
        }
        if theta >= PI {
            theta -= 2.0 * PI;
        }
        phases.push(Complex64::new(theta, 0.0));
    }
    let q = q.matrix();
    let h = &(q * &ComplexMatrix::diagonal(&phases)) * &q.adjoint();
    Ok(HermitianMatrix::symmetrized(&h))
}

/// Pauli matrices and rotation helpers used throughout the crate.
pub mod pauli {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
    }

    /// `e^{iθZ}`, the axial rotation.
    pub fn axial(theta: f64) -> UnitaryMatrix {
        UnitaryMatrix::from_trusted(ComplexMatrix::diagonal(&[
            Complex64::from_polar(1.0, theta),
            Complex64::from_polar(1.0, -theta),
        ]))
    }

    /// `e^{iθ n·σ}` for a unit axis `n`.
    pub fn rotation(theta: f64, axis: [f64; 3]) -> UnitaryMatrix {
        let (s, co) = theta.sin_cos();
        let gen = &(&x().scale_real(axis[0]) + &y().scale_real(axis[1])) + &z().scale_real(axis[2]);
        let m = &ComplexMatrix::identity(2).scale_real(co) + &gen.scale(c(0.0, s));
        UnitaryMatrix::from_trusted(m)
    }
}
