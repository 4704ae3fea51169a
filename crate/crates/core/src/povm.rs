//! POVMs over finite sample spaces.
//!
//! A [`Povm`] stores one effect per sample point; the effect of a subset is
//! the sum of its atoms.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, op_norm, pairing, ComplexMatrix, Effect, State, DEFAULT_TOL, ONE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    effects: Vec<Effect>,
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    space_size: usize,
    effects: Vec<ComplexMatrix>,
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        Self {
            space_size: p.space_size(),
            effects: p.effects.into_iter().map(Effect::into_matrix).collect(),
        }
    }
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;
    fn try_from(j: PovmJson) -> Result<Self> {
        if j.effects.len() != j.space_size {
            return Err(Error::Povm(format!(
                "space_size {} but {} effects",
                j.space_size,
                j.effects.len()
            )));
        }
        Povm::new(j.effects)
    }
}

impl Povm {
    /// Validates every effect and `Σ_x E_x = 1` within [`DEFAULT_TOL`].
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(effects, DEFAULT_TOL)
    }

    pub fn with_tol(effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let dim = effects
            .first()
            .ok_or_else(|| Error::Povm("empty sample space".into()))?
            .rows();
        let mut sum = ComplexMatrix::zero(dim);
        let mut checked = Vec::with_capacity(effects.len());
        for (x, e) in effects.into_iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::Povm(format!("effect {x} has the wrong shape")));
            }
            Effect::check(&e, tol).map_err(|err| Error::Povm(format!("effect {x}: {err}")))?;
            sum.add_scaled(ONE, &e)?;
            checked.push(Effect::from_matrix_unchecked(e));
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > tol {
            return Err(Error::Povm(format!(
                "effects do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(Self { effects: checked })
    }

    /// Projective measurement in the standard basis of `C^dim`.
    pub fn basis(dim: usize) -> Self {
        Self {
            effects: (0..dim)
                .map(|x| Effect::from_matrix_unchecked(ComplexMatrix::basis_projector(dim, x)))
                .collect(),
        }
    }

    /// Single-outcome POVM `{1}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            effects: vec![Effect::from_matrix_unchecked(ComplexMatrix::identity(dim))],
        }
    }

    /// Spectral PVM of a Hermitian matrix: one projector per distinct
    /// eigenvalue (eigenvalues closer than `gap_tol` are merged), in
    /// ascending eigenvalue order.
    pub fn spectral(a: &ComplexMatrix, gap_tol: f64) -> Result<Self> {
        let es = hermitian_eigensystem(a)?;
        let n = es.values.len();
        let mut effects = Vec::new();
        let mut k = 0;
        while k < n {
            let mut p = ComplexMatrix::zero(n);
            let start = es.values[k];
            while k < n && es.values[k] - start <= gap_tol {
                p.add_scaled(ONE, &ComplexMatrix::outer(&es.vector(k)))?;
                k += 1;
            }
            effects.push(p);
        }
        Self::new(effects)
    }

    pub fn space_size(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effect(&self, x: usize) -> &ComplexMatrix {
        self.effects[x].matrix()
    }

    pub fn effects(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.effects.iter().map(Effect::matrix)
    }

    /// `E(X) = Σ_{x ∈ X} E_x`.
    pub fn effect_of_set(&self, set: &[usize]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zero(self.dim());
        for &x in set {
            acc = &acc + self.effect(x);
        }
        acc
    }

    /// Outcome distribution `x ↦ tr[ω E_x]`.
    pub fn prob_measure(&self, omega: &State) -> Result<ProbVector> {
        if omega.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "state on C^{} measured with POVM on C^{}",
                omega.dim(),
                self.dim()
            )));
        }
        let weights = self
            .effects()
            .map(|e| pairing(omega.matrix(), e).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbVector { weights })
    }

    /// Every effect is a projection and distinct effects are orthogonal.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.sharpness_defect() <= tol
    }

    /// `max(max_x ||E_x² - E_x||, max_{x≠y} ||E_x E_y||)`.
    pub fn sharpness_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, ex) in self.effects().enumerate() {
            let sq = ex * ex;
            worst = worst.max(op_norm(&(&sq - ex)).unwrap_or(f64::INFINITY));
            for (y, ey) in self.effects().enumerate() {
                if x != y {
                    worst = worst.max(op_norm(&(ex * ey)).unwrap_or(f64::INFINITY));
                }
            }
        }
        worst
    }

    /// Norm-1 property: `||E_x|| >= 1 - tol` for every point.
    pub fn is_localizable(&self, tol: f64) -> bool {
        self.localization_defects().iter().all(|&d| d <= tol)
    }

    /// `1 - ||E_x||` for every point.
    pub fn localization_defects(&self) -> Vec<f64> {
        self.effects().map(|e| 1.0 - op_norm(e).unwrap_or(0.0)).collect()
    }

    /// State whose outcome distribution is the point mass at `x`: the
    /// projector onto a top eigenvector of `E_x`.
    pub fn localizing_state(&self, x: usize, tol: f64) -> Result<State> {
        if x >= self.space_size() {
            return Err(Error::Povm(format!("point {x} outside sample space")));
        }
        let es = hermitian_eigensystem(self.effect(x))?;
        let top = es.values.len() - 1;
        let defect = 1.0 - es.values[top];
        if defect > tol {
            return Err(Error::NotLocalizable { point: x, defect });
        }
        State::pure(&es.vector(top))
    }

    /// Push-forward along `phi: Σ → 0..target_size`; the effect at `y` is
    /// `Σ_{φ(x)=y} E_x`.
    pub fn pushforward(&self, phi: &[usize], target_size: usize) -> Result<Povm> {
        if phi.len() != self.space_size() {
            return Err(Error::Povm(format!(
                "map defined on {} points, sample space has {}",
                phi.len(),
                self.space_size()
            )));
        }
        if let Some(&y) = phi.iter().find(|&&y| y >= target_size) {
            return Err(Error::Povm(format!(
                "map value {y} outside target of size {target_size}"
            )));
        }
        let mut effects = vec![ComplexMatrix::zero(self.dim()); target_size];
        for (x, &y) in phi.iter().enumerate() {
            effects[y].add_scaled(ONE, self.effect(x))?;
        }
        Ok(Povm {
            effects: effects.into_iter().map(Effect::from_matrix_unchecked).collect(),
        })
    }

    /// `ψ ∘ E`: effects `ψ(E_x)` on the channel's output space.
    pub fn postcompose(&self, psi: &Channel) -> Result<Povm> {
        if psi.dim_in() != self.dim() {
            return Err(Error::Dimension(format!(
                "channel acts on C^{}, effects live on C^{}",
                psi.dim_in(),
                self.dim()
            )));
        }
        let effects = self
            .effects()
            .map(|e| {
                psi.apply(e)
                    .map(|m| Effect::from_matrix_unchecked(m.hermitian_part()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Povm { effects })
    }

    /// Product POVM on `Σ × Σ'` with effect `E_x F_y` at index
    /// `x · |Σ'| + y`. Every product must itself be an effect within `tol`,
    /// which in practice requires the two POVMs to commute.
    pub fn product(&self, other: &Povm, tol: f64) -> Result<Povm> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "product of POVMs on C^{} and C^{}",
                self.dim(),
                other.dim()
            )));
        }
        let mut effects = Vec::with_capacity(self.space_size() * other.space_size());
        for (x, ex) in self.effects().enumerate() {
            for (y, fy) in other.effects().enumerate() {
                let p = ex * fy;
                Effect::check(&p, tol).map_err(|err| Error::NonEffectProduct {
                    x,
                    y,
                    reason: err.to_string(),
                })?;
                effects.push(Effect::from_matrix_unchecked(p.hermitian_part()));
            }
        }
        Ok(Povm { effects })
    }
}

/// Discrete probability distribution over a finite sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    pub weights: Vec<f64>,
}

impl ProbVector {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Push-forward of the measure along `phi`.
    pub fn pushforward(&self, phi: &[usize], target_size: usize) -> ProbVector {
        let mut w = vec![0.0; target_size];
        for (x, &y) in phi.iter().enumerate() {
            w[y] += self.weights[x];
        }
        ProbVector { weights: w }
    }

    pub fn max_abs_diff(&self, other: &ProbVector) -> f64 {
        if self.weights.len() != other.weights.len() {
            return f64::INFINITY;
        }
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Checks nonnegativity (to `neg_tol`) and normalization (to `sum_tol`).
    pub fn is_valid(&self, neg_tol: f64, sum_tol: f64) -> bool {
        self.weights.iter().all(|&w| w >= -neg_tol && w <= 1.0 + neg_tol)
            && (self.total() - 1.0).abs() <= sum_tol
    }
}

/// `E_x = (1-ε)|x><x| + ε/d · 1` on `C^d`.
pub fn noisy_basis_povm(dim: usize, eps: f64) -> Result<Povm> {
    let effects = (0..dim)
        .map(|x| {
            &ComplexMatrix::basis_projector(dim, x).scale_real(1.0 - eps)
                + &ComplexMatrix::identity(dim).scale_real(eps / dim as f64)
        })
        .collect();
    Povm::new(effects)
}
