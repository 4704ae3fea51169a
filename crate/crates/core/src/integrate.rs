//! Operator-valued functions on a finite sample space and their integrals
//! against a POVM.
//!
//! On a finite space the integral `∫ f ⊗ dE` is the Kronecker sum
//! `Σ_x f(x) ⊗ E_x`. It is characterised by its values on product states,
//!
//! ```text
//! tr[(ρ ⊗ ω) ∫ f ⊗ dE] = Σ_x tr[ρ f(x)] tr[ω E_x],
//! ```
//!
//! which is what [`check_pairing`] tests. The remaining `check_*` functions
//! measure the properties of `f ↦ ∫ f ⊗ dE`: positivity, unitality, adjoint
//! preservation, contraction, and multiplicativity (sharp `E`) or injectivity
//! (localizable `E`).

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, op_norm, pairing, partial_trace, ComplexMatrix, State, Subsystem, ONE};
use crate::povm::Povm;
use crate::random;
use crate::report::CheckRecord;

/// Map from sample points to operators on a common `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionJson", into = "FunctionJson")]
pub struct OperatorFunction {
    dim: usize,
    values: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    space_size: usize,
    values: Vec<ComplexMatrix>,
}

impl From<OperatorFunction> for FunctionJson {
    fn from(f: OperatorFunction) -> Self {
        Self {
            space_size: f.space_size(),
            values: f.values,
        }
    }
}

impl TryFrom<FunctionJson> for OperatorFunction {
    type Error = Error;
    fn try_from(j: FunctionJson) -> Result<Self> {
        if j.values.len() != j.space_size {
            return Err(Error::Dimension(format!(
                "space_size {} but {} values",
                j.space_size,
                j.values.len()
            )));
        }
        OperatorFunction::new(j.values)
    }
}

impl OperatorFunction {
    pub fn new(values: Vec<ComplexMatrix>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| Error::Dimension("operator function on an empty space".into()))?;
        let dim = first.ensure_square()?;
        for v in &values {
            if v.rows() != dim || v.cols() != dim {
                return Err(Error::Dimension(
                    "operator function values differ in shape".into(),
                ));
            }
            v.check_finite()?;
        }
        Ok(Self { dim, values })
    }

    pub fn from_fn(space_size: usize, f: impl FnMut(usize) -> ComplexMatrix) -> Result<Self> {
        Self::new((0..space_size).map(f).collect())
    }

    pub fn constant(space_size: usize, a: &ComplexMatrix) -> Result<Self> {
        Self::new(vec![a.clone(); space_size])
    }

    /// The unit of the algebra, `x ↦ 1`.
    pub fn unit(space_size: usize, dim: usize) -> Self {
        Self {
            dim,
            values: vec![ComplexMatrix::identity(dim); space_size],
        }
    }

    pub fn space_size(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: usize) -> &ComplexMatrix {
        &self.values[x]
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    /// `f ∘ φ` for `φ: 0..phi.len() → 0..self.space_size()`.
    pub fn compose(&self, phi: &[usize]) -> Result<Self> {
        if let Some(&y) = phi.iter().find(|&&y| y >= self.space_size()) {
            return Err(Error::Dimension(format!("map value {y} outside function domain")));
        }
        Ok(Self {
            dim: self.dim,
            values: phi.iter().map(|&y| self.values[y].clone()).collect(),
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        if self.space_size() != other.space_size() || self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "operator functions of shape ({}, {}) and ({}, {})",
                self.space_size(),
                self.dim,
                other.space_size(),
                other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// `sup_x ||f(x)||`.
pub fn sup_norm(f: &OperatorFunction) -> f64 {
    f.values
        .iter()
        .map(|v| op_norm(v).expect("values are square"))
        .fold(0.0, f64::max)
}

pub fn fn_mul(f: &OperatorFunction, g: &OperatorFunction) -> Result<OperatorFunction> {
    f.zip_with(g, |a, b| a * b)
}

pub fn fn_add(f: &OperatorFunction, g: &OperatorFunction) -> Result<OperatorFunction> {
    f.zip_with(g, |a, b| a + b)
}

pub fn fn_sub(f: &OperatorFunction, g: &OperatorFunction) -> Result<OperatorFunction> {
    f.zip_with(g, |a, b| a - b)
}

pub fn fn_scale(c: Complex64, f: &OperatorFunction) -> OperatorFunction {
    f.map(|a| a.scale(c))
}

pub fn fn_adjoint(f: &OperatorFunction) -> OperatorFunction {
    f.map(ComplexMatrix::adjoint)
}

/// `∫ f ⊗ dE = Σ_x f(x) ⊗ E_x`, an operator on `C^dim_S ⊗ C^dim_R`.
pub fn integrate(f: &OperatorFunction, e: &Povm) -> Result<ComplexMatrix> {
    if f.space_size() != e.space_size() {
        return Err(Error::Dimension(format!(
            "function on {} points integrated against POVM on {}",
            f.space_size(),
            e.space_size()
        )));
    }
    let mut out = ComplexMatrix::zero(f.dim() * e.dim());
    for (fx, ex) in f.values.iter().zip(e.effects()) {
        out.add_scaled(ONE, &fx.kron(ex))?;
    }
    Ok(out)
}

/// The scalar integral `Σ_x tr[ρ f(x)] tr[ω E_x]`.
pub fn scalar_integral(f: &OperatorFunction, e: &Povm, rho: &State, omega: &State) -> Result<Complex64> {
    let probs = e.prob_measure(omega)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (fx, w) in f.values.iter().zip(&probs.weights) {
        s += pairing(rho.matrix(), fx)? * *w;
    }
    Ok(s)
}

/// Largest `|tr[(ρ⊗ω) ∫f⊗dE] - Σ_x f_ρ(x) E_ω(x)|` over `samples` random
/// product states.
pub fn check_pairing<R: Rng + ?Sized>(
    f: &OperatorFunction,
    e: &Povm,
    rng: &mut R,
    samples: usize,
    tol: f64,
) -> Result<CheckRecord> {
    let m = integrate(f, e)?;
    let mut worst = (0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..samples {
        let rho = random::state(rng, f.dim());
        let omega = random::state(rng, e.dim());
        let lhs = pairing(rho.tensor(&omega).matrix(), &m)?;
        let rhs = scalar_integral(f, e, &rho, &omega)?;
        let d = (lhs - rhs).norm();
        if d >= worst.0 {
            worst = (d, lhs, rhs);
        }
    }
    Ok(CheckRecord::asserted(
        "integrate.pairing",
        worst.1.norm(),
        worst.2.norm(),
        worst.0,
        tol,
    ))
}

/// `||∫ f ⊗ dE|| <= ||f||_∞`.
pub fn check_contraction(f: &OperatorFunction, e: &Povm, tol: f64) -> Result<CheckRecord> {
    let lhs = op_norm(&integrate(f, e)?)?;
    let rhs = sup_norm(f);
    Ok(CheckRecord::asserted(
        "integrate.contraction",
        lhs,
        rhs,
        lhs - rhs,
        tol,
    ))
}

/// `δ = ||∫f⊗dE ∫g⊗dE - ∫fg⊗dE||`; asserted only when `E` is sharp within
/// `tol`, otherwise reported as data.
pub fn check_multiplicative(
    f: &OperatorFunction,
    g: &OperatorFunction,
    e: &Povm,
    tol: f64,
) -> Result<CheckRecord> {
    let (delta, lhs, rhs) = multiplicativity_defect(f, g, e)?;
    Ok(if e.is_sharp(tol) {
        CheckRecord::asserted("integrate.multiplicative", lhs, rhs, delta, tol)
    } else {
        CheckRecord::informational(
            "integrate.multiplicative",
            lhs,
            rhs,
            delta,
            tol,
            "not asserted (non-sharp)",
        )
    })
}

/// `(δ, ||∫f ∫g||, ||∫fg||)`.
pub fn multiplicativity_defect(
    f: &OperatorFunction,
    g: &OperatorFunction,
    e: &Povm,
) -> Result<(f64, f64, f64)> {
    let prod = &integrate(f, e)? * &integrate(g, e)?;
    let direct = integrate(&fn_mul(f, g)?, e)?;
    Ok((op_norm(&(&prod - &direct))?, op_norm(&prod)?, op_norm(&direct)?))
}

/// Recovers `f` from `M = ∫ f ⊗ dE` as `f(x) = tr_R[(1 ⊗ ω_x) M]` with `ω_x`
/// the localizing state at `x`. Exact whenever `||E_x|| = 1`.
pub fn recover(integral: &ComplexMatrix, dim_s: usize, e: &Povm, tol: f64) -> Result<OperatorFunction> {
    let dim_r = e.dim();
    if integral.rows() != dim_s * dim_r {
        return Err(Error::Dimension(format!(
            "integral of size {} is not on C^{dim_s} ⊗ C^{dim_r}",
            integral.rows()
        )));
    }
    let id = ComplexMatrix::identity(dim_s);
    let values = (0..e.space_size())
        .map(|x| {
            let omega = e.localizing_state(x, tol)?;
            let weighted = &id.kron(omega.matrix()) * integral;
            partial_trace(&weighted, dim_s, dim_r, Subsystem::Second)
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorFunction::new(values)
}

/// Injectivity probe for a pair of functions against a localizable POVM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityReport {
    /// `||∫f⊗dE - ∫g⊗dE||`
    pub integral_gap: f64,
    /// `||f - g||_∞`
    pub true_gap: f64,
    /// `||f̃ - g̃||_∞` for the functions recovered from the integrals.
    pub recovered_gap: f64,
    /// `max(||f̃ - f||_∞, ||g̃ - g||_∞)`
    pub recovery_residual: f64,
}

impl InjectivityReport {
    /// If the integrals agree to `integral_tol` then `f` and `g` agree to
    /// `function_tol`.
    pub fn implication_holds(&self, integral_tol: f64, function_tol: f64) -> bool {
        self.integral_gap > integral_tol || self.recovered_gap <= function_tol
    }
}

pub fn check_injective(
    f: &OperatorFunction,
    g: &OperatorFunction,
    e: &Povm,
    tol: f64,
) -> Result<InjectivityReport> {
    if !e.is_localizable(tol) {
        let (point, defect) = e
            .localization_defects()
            .into_iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty sample space");
        return Err(Error::NotLocalizable { point, defect });
    }
    let mf = integrate(f, e)?;
    let mg = integrate(g, e)?;
    let rf = recover(&mf, f.dim(), e, tol)?;
    let rg = recover(&mg, g.dim(), e, tol)?;
    Ok(InjectivityReport {
        integral_gap: op_norm(&(&mf - &mg))?,
        true_gap: sup_norm(&fn_sub(f, g)?),
        recovered_gap: sup_norm(&fn_sub(&rf, &rg)?),
        recovery_residual: sup_norm(&fn_sub(&rf, f)?).max(sup_norm(&fn_sub(&rg, g)?)),
    })
}

/// Both sides of `∫ f∘φ ⊗ d(ψ∘E) = (1 ⊗ ψ)(∫ f ⊗ d(φ_*E))` and the
/// operator norm of their difference.
///
/// `f` lives on the target of `phi`, `E` on its domain, and `psi` maps
/// operators on `E`'s space to operators on `C^psi.dim_out()`.
pub fn transform_sides(
    f: &OperatorFunction,
    e: &Povm,
    phi: &[usize],
    psi: &Channel,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let lhs = integrate(&f.compose(phi)?, &e.postcompose(psi)?)?;
    let pushed = e.pushforward(phi, f.space_size())?;
    let rhs = psi.ampliate(f.dim()).apply(&integrate(f, &pushed)?)?;
    Ok((lhs, rhs))
}

pub fn check_transform(
    f: &OperatorFunction,
    e: &Povm,
    phi: &[usize],
    psi: &Channel,
    tol: f64,
) -> Result<CheckRecord> {
    let (lhs, rhs) = transform_sides(f, e, phi, psi)?;
    Ok(CheckRecord::asserted(
        "integrate.transform",
        op_norm(&lhs)?,
        op_norm(&rhs)?,
        op_norm(&(&lhs - &rhs))?,
        tol,
    ))
}

/// Tolerances for [`check_linear_pos_adjoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyTolerances {
    pub linearity: f64,
    pub adjoint: f64,
    pub positivity: f64,
    pub contraction: f64,
    pub unitality: f64,
    pub algebra: f64,
}

impl Default for PropertyTolerances {
    fn default() -> Self {
        Self {
            linearity: 1e-10,
            adjoint: 1e-12,
            positivity: 1e-9,
            contraction: 1e-9,
            unitality: 1e-11,
            algebra: 1e-9,
        }
    }
}

/// Worst-case records over `trials` random draws for linearity, adjoint
/// preservation, positivity, contraction and unitality of `f ↦ ∫ f ⊗ dE`,
/// plus the normed *-algebra inequalities of the function space.
#[derive(Debug, Clone)]
pub struct PropertySuite {
    pub linearity: CheckRecord,
    pub adjoint: CheckRecord,
    pub positivity: CheckRecord,
    pub contraction: CheckRecord,
    pub unitality: CheckRecord,
    pub algebra: CheckRecord,
}

impl PropertySuite {
    pub fn into_records(self) -> Vec<CheckRecord> {
        vec![
            self.linearity,
            self.adjoint,
            self.positivity,
            self.contraction,
            self.unitality,
            self.algebra,
        ]
    }
}

pub fn random_function<R: Rng + ?Sized>(rng: &mut R, space_size: usize, dim: usize) -> OperatorFunction {
    OperatorFunction {
        dim,
        values: (0..space_size)
            .map(|_| random::gaussian_matrix(rng, dim, dim))
            .collect(),
    }
}

pub fn random_psd_function<R: Rng + ?Sized>(rng: &mut R, space_size: usize, dim: usize) -> OperatorFunction {
    OperatorFunction {
        dim,
        values: (0..space_size).map(|_| random::psd(rng, dim)).collect(),
    }
}

struct Worst {
    delta: f64,
    lhs: f64,
    rhs: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            delta: f64::NEG_INFINITY,
            lhs: 0.0,
            rhs: 0.0,
        }
    }

    fn update(&mut self, lhs: f64, rhs: f64, delta: f64) {
        if delta > self.delta || self.delta.is_nan() {
            *self = Self { delta, lhs, rhs };
        }
    }

    fn record(&self, name: &str, tol: f64) -> CheckRecord {
        CheckRecord::asserted(name, self.lhs, self.rhs, self.delta, tol)
    }
}

pub fn check_linear_pos_adjoint<R: Rng + ?Sized>(
    e: &Povm,
    dim_s: usize,
    rng: &mut R,
    trials: usize,
    tols: &PropertyTolerances,
) -> Result<PropertySuite> {
    let n = e.space_size();
    let mut lin = Worst::new();
    let mut adj = Worst::new();
    let mut pos = Worst::new();
    let mut con = Worst::new();
    let mut alg = Worst::new();
    for _ in 0..trials {
        let f = random_function(rng, n, dim_s);
        let g = random_function(rng, n, dim_s);
        let (a, b) = (random::unit_disk_scalar(rng), random::unit_disk_scalar(rng));

        let mf = integrate(&f, e)?;
        let mg = integrate(&g, e)?;
        let combo = fn_add(&fn_scale(a, &f), &fn_scale(b, &g))?;
        let lhs = integrate(&combo, e)?;
        let rhs = &mf.scale(a) + &mg.scale(b);
        lin.update(op_norm(&lhs)?, op_norm(&rhs)?, op_norm(&(&lhs - &rhs))?);

        let lhs = integrate(&fn_adjoint(&f), e)?;
        let rhs = mf.adjoint();
        adj.update(lhs.max_abs(), rhs.max_abs(), lhs.max_abs_diff(&rhs));

        let p = random_psd_function(rng, n, dim_s);
        let min = min_eigenvalue(&integrate(&p, e)?, tols.positivity)
            .ok_or_else(|| Error::Dimension("integral of PSD function is not Hermitian".into()))?;
        pos.update(min, 0.0, -min);

        let nf = op_norm(&mf)?;
        let sf = sup_norm(&f);
        con.update(nf, sf, nf - sf);

        let sg = sup_norm(&g);
        let s_sum = sup_norm(&fn_add(&f, &g)?);
        let s_prod = sup_norm(&fn_mul(&f, &g)?);
        let s_adj = sup_norm(&fn_adjoint(&f));
        for (l, r, d) in [
            (s_sum, sf + sg, s_sum - sf - sg),
            (s_prod, sf * sg, s_prod - sf * sg),
            (s_adj, sf, (s_adj - sf).abs()),
        ] {
            alg.update(l, r, d);
        }
    }
    let unit = integrate(&OperatorFunction::unit(n, dim_s), e)?;
    let u_delta = unit.max_abs_diff(&ComplexMatrix::identity(unit.rows()));

    Ok(PropertySuite {
        linearity: lin.record("integrate.linearity", tols.linearity),
        adjoint: adj.record("integrate.adjoint", tols.adjoint),
        positivity: pos.record("integrate.positivity", tols.positivity),
        contraction: con.record("integrate.contraction", tols.contraction),
        unitality: CheckRecord::asserted(
            "integrate.unitality",
            unit.max_abs(),
            1.0,
            u_delta,
            tols.unitality,
        ),
        algebra: alg.record("integrate.algebra", tols.algebra),
    })
}
