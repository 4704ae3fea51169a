//! Dense complex linear algebra: norms, products, positivity predicates and
//! the Hermitian eigensolver every other module builds on.

mod eigen;
mod matrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eigen::EigenSystem;
pub use matrix::{ComplexMatrix, ONE, ZERO};

use crate::error::{Error, Result};

/// Tolerance used by predicates when the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hermitian eigen-decomposition; the input must be Hermitian to
/// [`DEFAULT_TOL`] (entrywise).
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<EigenSystem> {
    eigen::hermitian_eigensystem_tol(a, DEFAULT_TOL)
}

pub fn hermitian_eigensystem_tol(a: &ComplexMatrix, hermitian_tol: f64) -> Result<EigenSystem> {
    eigen::hermitian_eigensystem_tol(a, hermitian_tol)
}

// A matrix counts as exactly Hermitian when its asymmetry is at the level of
// a few ulps; only then are its own eigenvalues used for norms.
fn exactly_hermitian(a: &ComplexMatrix) -> bool {
    a.hermitian_defect() <= 4.0 * f64::EPSILON * a.max_abs().max(f64::MIN_POSITIVE)
}

/// Singular values, descending; `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.check_finite()?;
    let mut s: Vec<f64> = if a.is_square() && exactly_hermitian(a) {
        hermitian_eigensystem(a)?.values.iter().map(|v| v.abs()).collect()
    } else {
        let gram = if a.rows() < a.cols() {
            a * &a.adjoint()
        } else {
            &a.adjoint() * a
        };
        hermitian_eigensystem_tol(&gram, f64::INFINITY)?
            .values
            .iter()
            .map(|&v| v.max(0.0).sqrt())
            .collect()
    };
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &ComplexMatrix) -> Result<f64> {
    a.ensure_square()?;
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Trace norm `tr sqrt(T* T)`.
pub fn trace_norm(t: &ComplexMatrix) -> Result<f64> {
    t.ensure_square()?;
    Ok(singular_values(t)?.iter().sum())
}

/// Hermitian within `tol` (entrywise) and smallest eigenvalue `>= -tol`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    min_eigenvalue(a, tol).is_some_and(|m| m >= -tol)
}

/// Smallest eigenvalue of the Hermitian part, or `None` when `a` is not
/// square or not Hermitian within `hermitian_tol`.
pub fn min_eigenvalue(a: &ComplexMatrix, hermitian_tol: f64) -> Option<f64> {
    if !a.is_square() || a.check_finite().is_err() {
        return None;
    }
    if a.rows() == 0 {
        return Some(0.0);
    }
    let es = hermitian_eigensystem_tol(a, hermitian_tol).ok()?;
    es.values.first().copied()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `tr[T A]`.
pub fn pairing(t: &ComplexMatrix, a: &ComplexMatrix) -> Result<Complex64> {
    if t.cols() != a.rows() || t.rows() != a.cols() {
        return Err(Error::Dimension(format!(
            "pairing: {}x{} with {}x{}",
            t.rows(),
            t.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let mut s = ZERO;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            s += t[(i, j)] * a[(j, i)];
        }
    }
    Ok(s)
}

/// Which tensor factor of `H_S ⊗ H_R` a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out one factor of an operator on `C^dim_first ⊗ C^dim_second`.
pub fn partial_trace(
    a: &ComplexMatrix,
    dim_first: usize,
    dim_second: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    if n != dim_first * dim_second {
        return Err(Error::Dimension(format!(
            "partial_trace: {n} != {dim_first} * {dim_second}"
        )));
    }
    let idx = |i: usize, k: usize| i * dim_second + k;
    Ok(match traced {
        Subsystem::Second => ComplexMatrix::from_fn(dim_first, dim_first, |i, j| {
            (0..dim_second).map(|k| a[(idx(i, k), idx(j, k))]).sum()
        }),
        Subsystem::First => ComplexMatrix::from_fn(dim_second, dim_second, |k, l| {
            (0..dim_first).map(|i| a[(idx(i, k), idx(i, l))]).sum()
        }),
    })
}

/// Inverse square root of a positive definite matrix.
pub fn inverse_sqrt_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let es = hermitian_eigensystem(a)?;
    if let Some(&min) = es.values.first() {
        if min <= 0.0 {
            return Err(Error::Dimension(format!(
                "inverse_sqrt_pd: matrix is not positive definite (min eigenvalue {min:e})"
            )));
        }
    }
    let d: Vec<f64> = es.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    let diag = ComplexMatrix::real_diag(&d);
    Ok(&(&es.vectors * &diag) * &es.vectors.adjoint())
}

/// Unitary within `tol` in max-entry norm.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(ComplexMatrix);

impl State {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        matrix.ensure_square()?;
        matrix.check_finite()?;
        if !matrix.is_hermitian(tol) {
            return Err(Error::State(format!(
                "not Hermitian (defect {:e})",
                matrix.hermitian_defect()
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::State(format!("trace {tr} != 1")));
        }
        if !is_psd(&matrix, tol) {
            return Err(Error::State("not positive semidefinite".into()));
        }
        Ok(Self(matrix))
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::State("zero or non-finite state vector".into()));
        }
        Ok(Self(ComplexMatrix::outer(psi).scale_real(1.0 / norm2)))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        Self(ComplexMatrix::basis_projector(dim, index))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Wraps a matrix already known to be a state (e.g. built by a positive
    /// trace-preserving map from a state).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// `tr[rho A]`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<Complex64> {
        pairing(&self.0, a)
    }

    pub fn tensor(&self, other: &State) -> State {
        State(self.0.kron(&other.0))
    }
}

/// An operator `0 <= E <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Effect(ComplexMatrix);

impl Effect {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::check(&matrix, tol)?;
        Ok(Self(matrix))
    }

    pub fn check(matrix: &ComplexMatrix, tol: f64) -> Result<()> {
        matrix.ensure_square()?;
        matrix.check_finite()?;
        let defect = matrix.hermitian_defect();
        if defect > tol {
            return Err(Error::Effect(format!("not Hermitian (defect {defect:e})")));
        }
        if matrix.rows() == 0 {
            return Ok(());
        }
        let es = hermitian_eigensystem_tol(matrix, tol)?;
        let lo = es.values[0];
        let hi = *es.values.last().unwrap();
        if lo < -tol || hi > 1.0 + tol {
            return Err(Error::Effect(format!(
                "spectrum [{lo:e}, {hi:e}] not inside [0, 1]"
            )));
        }
        Ok(())
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn op_norm_of_identity_is_one() {
        for n in 1..6 {
            assert!((op_norm(&ComplexMatrix::identity(n)).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn op_norm_of_complex_diagonal() {
        let a = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((op_norm(&a).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_non_square_is_dimension_error() {
        assert!(matches!(
            op_norm(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn trace_norm_of_signature_matrix() {
        let a = ComplexMatrix::real_diag(&[1.0, -1.0]);
        assert!((trace_norm(&a).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn psd_edge_cases() {
        assert!(is_psd(&ComplexMatrix::zero(3), 1e-9));
        assert!(!is_psd(&ComplexMatrix::real_diag(&[1.0, -1e-3]), 1e-9));
        assert!(!is_psd(&ComplexMatrix::zeros(2, 3), 1e-9));
        assert!(!is_psd(&ComplexMatrix::unit(2, 0, 1), 1e-9));
    }

    #[test]
    fn pairing_basics() {
        let rho = State::maximally_mixed(3);
        let p = pairing(rho.matrix(), &ComplexMatrix::identity(3)).unwrap();
        assert!((p - ONE).norm() < 1e-15);
        let (a, b) = (c(0.3, -2.0), c(5.0, 1.0));
        let p = pairing(
            &ComplexMatrix::basis_projector(2, 0),
            &ComplexMatrix::diag(&[a, b]),
        )
        .unwrap();
        assert_eq!(p, a);
        assert!(pairing(&ComplexMatrix::zero(2), &ComplexMatrix::zero(3)).is_err());
    }

    #[test]
    fn partial_trace_recovers_factors() {
        let rho = State::pure(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let omega = State::maximally_mixed(3);
        let joint = rho.tensor(&omega);
        let s = partial_trace(joint.matrix(), 2, 3, Subsystem::Second).unwrap();
        let r = partial_trace(joint.matrix(), 2, 3, Subsystem::First).unwrap();
        assert!(s.max_abs_diff(rho.matrix()) < 1e-15);
        assert!(r.max_abs_diff(omega.matrix()) < 1e-15);
        assert!(partial_trace(joint.matrix(), 3, 3, Subsystem::First).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(State::new(ComplexMatrix::identity(2), 1e-9).is_err());
        assert!(State::new(ComplexMatrix::real_diag(&[1.5, -0.5]), 1e-9).is_err());
        assert!(State::new(ComplexMatrix::real_diag(&[0.25, 0.75]), 1e-9).is_ok());
        assert!(State::pure(&[ZERO, ZERO]).is_err());
    }

    #[test]
    fn effect_validation() {
        assert!(Effect::new(ComplexMatrix::real_diag(&[0.0, 1.0]), 1e-9).is_ok());
        assert!(Effect::new(ComplexMatrix::real_diag(&[0.0, 1.1]), 1e-9).is_err());
        assert!(Effect::new(ComplexMatrix::real_diag(&[-0.1, 0.5]), 1e-9).is_err());
        assert!(Effect::new(ComplexMatrix::unit(2, 0, 1), 1e-9).is_err());
    }

    #[test]
    fn inverse_sqrt_of_diagonal() {
        let a = ComplexMatrix::real_diag(&[4.0, 0.25]);
        let r = inverse_sqrt_pd(&a).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 2.0])) < 1e-15);
        assert!(inverse_sqrt_pd(&ComplexMatrix::real_diag(&[1.0, 0.0])).is_err());
    }
}
