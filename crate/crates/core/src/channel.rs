//! Quantum channels in the Heisenberg picture.
//!
//! A [`Channel`] stores Kraus blocks `K_k` of shape `dim_in x dim_out` and acts
//! on observables as `A ↦ Σ_k K_k* A K_k`, taking operators on `C^dim_in` to
//! operators on `C^dim_out`. Its predual acts on states the other way,
//! `ρ ↦ Σ_k K_k ρ K_k*`, so that `tr[ρ Φ(A)] = tr[Φ_*(ρ) A]`.
//!
//! # Composition
//!
//! [`Channel::compose`]`(outer, inner)` is the channel whose *predual* runs
//! `inner` first and `outer` second. In the Heisenberg picture the order
//! flips:
//!
//! ```text
//! compose(outer, inner).apply(A) == inner.apply(outer.apply(A))
//! ```
//!
//! For example, with `inner` the unitary channel of `V` (`A ↦ V* A V`) and
//! `outer` the unitary channel of `W`, a state is first rotated to `V ρ V*`
//! and then to `W V ρ V* W*`, while an observable becomes
//! `V* (W* A W) V = (WV)* A (WV)`. The composite's Kraus block is `W V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_psd, min_eigenvalue, pairing, ComplexMatrix, State, DEFAULT_TOL, ONE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    kraus: Vec<ComplexMatrix>,
}

impl From<Channel> for ChannelJson {
    fn from(c: Channel) -> Self {
        Self { kraus: c.kraus }
    }
}

impl TryFrom<ChannelJson> for Channel {
    type Error = Error;
    fn try_from(j: ChannelJson) -> Result<Self> {
        Channel::new(j.kraus)
    }
}

impl Channel {
    /// Validates shapes and unitality (`Σ K* K = 1` within [`DEFAULT_TOL`]).
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(kraus, DEFAULT_TOL)
    }

    pub fn with_tol(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Channel("no Kraus operators".into()))?;
        let (dim_in, dim_out) = (first.rows(), first.cols());
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::Channel("empty Kraus operator".into()));
        }
        for k in &kraus {
            if k.rows() != dim_in || k.cols() != dim_out {
                return Err(Error::Channel(format!(
                    "Kraus shapes differ: {}x{} vs {dim_in}x{dim_out}",
                    k.rows(),
                    k.cols()
                )));
            }
            k.check_finite()?;
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
        };
        let defect = ch.unitality_defect();
        if defect > tol {
            return Err(Error::Channel(format!(
                "Kraus operators do not satisfy sum K*K = 1 (defect {defect:e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// `A ↦ V* A V` for a unitary `V`.
    pub fn unitary(v: ComplexMatrix) -> Result<Self> {
        Self::new(vec![v])
    }

    /// Qubit-style depolarizing channel on `C^dim` with strength `p`:
    /// `A ↦ (1-p) A + p tr[A]/dim · 1`, realized with the `dim²` Weyl
    /// (clock-and-shift) Kraus operators.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Channel(format!("depolarizing strength {p} not in [0, 1]")));
        }
        let d = dim as f64;
        let omega = |k: usize| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / d;
            num_complex::Complex64::new(t.cos(), t.sin())
        };
        let mut kraus = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                // X^a Z^b
                let w = ComplexMatrix::from_fn(dim, dim, |i, j| {
                    if i == (j + a) % dim {
                        omega(b * j % dim)
                    } else {
                        num_complex::Complex64::new(0.0, 0.0)
                    }
                });
                let weight = if a == 0 && b == 0 {
                    1.0 - p + p / (d * d)
                } else {
                    p / (d * d)
                };
                kraus.push(w.scale_real(weight.sqrt()));
            }
        }
        Self::new(kraus)
    }

    /// `1_n ⊗ ψ`, acting on operators on `C^n ⊗ C^dim_in`.
    pub fn ampliate(&self, n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self {
            dim_in: n * self.dim_in,
            dim_out: n * self.dim_out,
            kraus: self.kraus.iter().map(|k| id.kron(k)).collect(),
        }
    }

    /// See the module docs for the order convention.
    pub fn compose(outer: &Channel, inner: &Channel) -> Result<Self> {
        if outer.dim_out != inner.dim_in {
            return Err(Error::Dimension(format!(
                "compose: outer maps into C^{} but inner acts on C^{}",
                outer.dim_out, inner.dim_in
            )));
        }
        let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
        for ko in &outer.kraus {
            for ki in &inner.kraus {
                kraus.push(ko * ki);
            }
        }
        Ok(Self {
            dim_in: outer.dim_in,
            dim_out: inner.dim_out,
            kraus,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Heisenberg action `Σ K* A K`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim_in || a.cols() != self.dim_in {
            return Err(Error::Dimension(format!(
                "channel acts on {0}x{0} operators, got {1}x{2}",
                self.dim_in,
                a.rows(),
                a.cols()
            )));
        }
        let mut out = ComplexMatrix::zero(self.dim_out);
        for k in &self.kraus {
            let term = k.adjoint().matmul(a)?.matmul(k)?;
            out.add_scaled(ONE, &term)?;
        }
        Ok(out)
    }

    /// Schrödinger action `Σ K ρ K*` on a raw matrix.
    pub fn predual_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_out || rho.cols() != self.dim_out {
            return Err(Error::Dimension(format!(
                "predual acts on {0}x{0} matrices, got {1}x{2}",
                self.dim_out,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zero(self.dim_in);
        for k in &self.kraus {
            let term = k.matmul(rho)?.matmul(&k.adjoint())?;
            out.add_scaled(ONE, &term)?;
        }
        Ok(out)
    }

    pub fn predual(&self, rho: &State) -> Result<State> {
        let out = self.predual_matrix(rho.matrix())?;
        Ok(State::from_matrix_unchecked(out.hermitian_part()))
    }

    /// `max |Σ K* K - 1|` entrywise.
    pub fn unitality_defect(&self) -> f64 {
        let mut s = ComplexMatrix::zero(self.dim_out);
        for k in &self.kraus {
            s = &s + &(&k.adjoint() * k);
        }
        s.max_abs_diff(&ComplexMatrix::identity(self.dim_out))
    }

    /// Choi matrix `Σ_ij |i><j| ⊗ Φ_*(|i><j|)` of the predual.
    pub fn choi(&self) -> ComplexMatrix {
        choi_matrix(self.dim_out, self.dim_in, |e| {
            self.predual_matrix(e).expect("matrix unit has the right shape")
        })
    }

    pub fn is_cp_unital(&self, tol: f64) -> bool {
        self.unitality_defect() <= tol && is_choi_psd(&self.choi(), tol)
    }
}

/// Choi matrix of an arbitrary linear map from `dim_in x dim_in` to
/// `dim_out x dim_out` matrices.
pub fn choi_matrix(
    dim_in: usize,
    dim_out: usize,
    map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let mut c = ComplexMatrix::zero(dim_in * dim_out);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let img = map(&ComplexMatrix::unit(dim_in, i, j));
            for k in 0..dim_out {
                for l in 0..dim_out {
                    c[(i * dim_out + k, j * dim_out + l)] = img[(k, l)];
                }
            }
        }
    }
    c
}

/// Complete positivity test: the Choi matrix is PSD within `tol`.
pub fn is_choi_psd(choi: &ComplexMatrix, tol: f64) -> bool {
    is_psd(choi, tol)
}

pub fn choi_min_eigenvalue(choi: &ComplexMatrix) -> Option<f64> {
    min_eigenvalue(choi, DEFAULT_TOL)
}

/// `|tr[ρ Φ(A)] - tr[Φ_*(ρ) A]|`.
pub fn duality_residual(ch: &Channel, rho: &State, a: &ComplexMatrix) -> Result<f64> {
    let lhs = pairing(rho.matrix(), &ch.apply(a)?)?;
    let rhs = pairing(ch.predual(rho)?.matrix(), a)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use num_complex::Complex64;

    #[test]
    fn identity_channel_is_trivial() {
        let mut rng = random::substream(1, 0);
        let a = random::hermitian(&mut rng, 3);
        let ch = Channel::identity(3);
        assert_eq!(ch.apply(&a).unwrap(), a);
        let rho = random::state(&mut rng, 3);
        assert!(ch.predual(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(ch.is_cp_unital(1e-12));
    }

    #[test]
    fn unitary_channel_conjugates() {
        let mut rng = random::substream(2, 0);
        let v = random::unitary(&mut rng, 2);
        let ch = Channel::unitary(v.clone()).unwrap();
        assert!(
            ch.apply(&ComplexMatrix::identity(2))
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-14
        );
        let rho = random::state(&mut rng, 2);
        let expected = &(&v * rho.matrix()) * &v.adjoint();
        assert!(ch.predual(&rho).unwrap().matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn constructor_rejects_non_unital_kraus() {
        let k = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(matches!(Channel::new(vec![k]), Err(Error::Channel(_))));
        assert!(Channel::new(vec![]).is_err());
        assert!(Channel::new(vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 3)]).is_err());
    }

    #[test]
    fn transpose_choi_is_not_psd() {
        let choi = choi_matrix(2, 2, ComplexMatrix::transpose);
        assert!(!is_choi_psd(&choi, 1e-9));
        // swap operator: eigenvalues {-1, 1, 1, 1}
        assert!((choi_min_eigenvalue(&choi).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_matches_closed_form() {
        let mut rng = random::substream(3, 0);
        let p = 0.3;
        for dim in [2, 3] {
            let ch = Channel::depolarizing(dim, p).unwrap();
            let a = random::gaussian_matrix(&mut rng, dim, dim);
            let expected =
                &a.scale_real(1.0 - p) + &ComplexMatrix::identity(dim).scale(a.trace() * (p / dim as f64));
            assert!(ch.apply(&a).unwrap().max_abs_diff(&expected) < 1e-13);
            assert!(ch.is_cp_unital(1e-12));
        }
    }

    #[test]
    fn rectangular_channel_shapes() {
        let mut rng = random::substream(4, 0);
        let ch = random::kraus_channel(&mut rng, 3, 2, 2).unwrap();
        assert_eq!((ch.dim_in(), ch.dim_out()), (3, 2));
        let out = ch.apply(&ComplexMatrix::identity(3)).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(ch.apply(&ComplexMatrix::identity(2)).is_err());
        let rho = random::state(&mut rng, 2);
        let img = ch.predual(&rho).unwrap();
        assert_eq!(img.dim(), 3);
        assert!((img.matrix().trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let ch = Channel::depolarizing(2, 0.25).unwrap();
        let s = serde_json::to_string(&ch).unwrap();
        assert!(s.starts_with("{\"kraus\":["));
        let back: Channel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
    }
}
