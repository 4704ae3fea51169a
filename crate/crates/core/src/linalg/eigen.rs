//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! combined similarity `G = D R` is unitary and the iterate stays Hermitian.
//! Dimensions in this crate are small (at most a few hundred), where Jacobi is
//! slow but very accurate.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching unit eigenvectors as the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `U diag(values) U*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::real_diag(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// The input must satisfy `max |A - A*| <= hermitian_tol`; its Hermitian part
/// is what gets diagonalized.
pub fn hermitian_eigensystem_tol(a: &ComplexMatrix, hermitian_tol: f64) -> Result<EigenSystem> {
    let n = a.ensure_square()?;
    a.check_finite()?;
    let defect = a.hermitian_defect();
    if defect > hermitian_tol {
        return Err(Error::Dimension(format!(
            "Hermitian eigensolver called on non-Hermitian matrix (defect {defect:e})"
        )));
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let threshold = (f64::EPSILON * scale).powi(2);
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_sqr(&m) <= threshold {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_sqr(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip pivots that are negligible relative to both diagonal entries.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }

    let phase = apq / r; // e^{i phi}
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let e = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = e * (-s);
    let g_qq = e * c;

    let n = m.rows();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(app - t * r, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * r, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_sorted() {
        let a = ComplexMatrix::real_diag(&[3.0, -1.0, 2.0]);
        let es = hermitian_eigensystem_tol(&a, 1e-12).unwrap();
        assert_eq!(es.values, vec![-1.0, 2.0, 3.0]);
        assert!(es.reconstruct().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y = ComplexMatrix::from_rows(vec![
            vec![ZERO, Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), ZERO],
        ])
        .unwrap();
        let es = hermitian_eigensystem_tol(&y, 1e-12).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14);
        assert!((es.values[1] - 1.0).abs() < 1e-14);
        assert!(es.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::unit(2, 0, 1);
        assert!(hermitian_eigensystem_tol(&a, 1e-9).is_err());
    }

    #[test]
    fn zero_and_scalar_matrices() {
        let es = hermitian_eigensystem_tol(&ComplexMatrix::zero(4), 0.0).unwrap();
        assert!(es.values.iter().all(|&x| x == 0.0));
        let es = hermitian_eigensystem_tol(&ComplexMatrix::identity(1), 0.0).unwrap();
        assert_eq!(es.values, vec![1.0]);
    }
}
