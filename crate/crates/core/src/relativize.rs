//! Quantum reference frames over finite homogeneous spaces and the
//! relativization map
//!
//! ```text
//! yen_x(A) = Σ_{gH_x ∈ G/H_x} U_S(g) A U_S(g)* ⊗ E_R(g.x),
//! ```
//!
//! defined on operators fixed by the stabilizer `H_x`. The map is computed as
//! the integral of the orbit function `f_A(gH_x) = g.A` against the frame's
//! POVM, transported to `G/H_x` along `gH_x ↦ g.x`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{
    invariant_subalgebra_basis, orbit_bijection, product_rep, GroupAction, OrbitBijection,
    RepresentativeChoice, UnitaryRep,
};
use crate::integrate::{integrate, sup_norm, OperatorFunction};
use crate::linalg::{min_eigenvalue, op_norm, partial_trace, ComplexMatrix, Subsystem, ONE};
use crate::povm::Povm;
use crate::random;
use crate::report::CheckRecord;

/// An operator counts as `H_x`-invariant when `max ||h.A - A|| <= INVARIANCE_TOL`.
pub const INVARIANCE_TOL: f64 = 1e-9;
/// Largest tolerated dependence of `yen` on the choice of coset representatives.
pub const WELL_DEFINED_TOL: f64 = 1e-9;

/// A transitive action, a unitary representation on the frame space `H_R`
/// and a POVM over the acted-on points.
#[derive(Debug, Clone)]
pub struct Frame {
    action: GroupAction,
    rep_r: UnitaryRep,
    povm: Povm,
}

impl Frame {
    /// Validated frame: structural checks plus covariance within `tol`.
    pub fn new(action: GroupAction, rep_r: UnitaryRep, povm: Povm, tol: f64) -> Result<Self> {
        let f = Self::without_covariance_check(action, rep_r, povm)?;
        let defect = f.covariance_defect()?;
        if defect > tol {
            return Err(Error::Scenario(format!(
                "POVM is not covariant (defect {defect:e})"
            )));
        }
        Ok(f)
    }

    /// Structural checks only (matching groups, dimensions and sizes,
    /// transitivity). Covariance is left to [`check_frame`].
    pub fn without_covariance_check(action: GroupAction, rep_r: UnitaryRep, povm: Povm) -> Result<Self> {
        if rep_r.group() != action.group() {
            return Err(Error::Scenario(
                "frame representation and action use different groups".into(),
            ));
        }
        if povm.space_size() != action.space_size() {
            return Err(Error::Scenario(format!(
                "POVM has {} outcomes but the action moves {} points",
                povm.space_size(),
                action.space_size()
            )));
        }
        if povm.dim() != rep_r.dim() {
            return Err(Error::Scenario(format!(
                "POVM acts on C^{} but the frame representation on C^{}",
                povm.dim(),
                rep_r.dim()
            )));
        }
        let orbit = action.orbit(0).len();
        if orbit != action.space_size() {
            return Err(Error::NotTransitive {
                orbit,
                space: action.space_size(),
            });
        }
        Ok(Self { action, rep_r, povm })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn rep_r(&self) -> &UnitaryRep {
        &self.rep_r
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn space_size(&self) -> usize {
        self.action.space_size()
    }

    /// `max_{g,x} ||E_{g.x} - U_R(g) E_x U_R(g)*||`.
    pub fn covariance_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for g in self.action.group().elements() {
            for x in 0..self.space_size() {
                let moved = self.rep_r.act(g, self.povm.effect(x))?;
                let target = self.povm.effect(self.action.apply(g, x));
                worst = worst.max(op_norm(&(target - &moved))?);
            }
        }
        Ok(worst)
    }
}

pub fn check_frame(frame: &Frame, tol: f64) -> Result<CheckRecord> {
    let d = frame.covariance_defect()?;
    Ok(CheckRecord::asserted("frame.covariance", d, 0.0, d, tol))
}

/// Output of [`yen`]: an operator on `H_S ⊗ H_R` together with its input.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativizedOperator {
    pub matrix: ComplexMatrix,
    pub basepoint: usize,
    pub source: ComplexMatrix,
}

fn check_compatible(frame: &Frame, rep_s: &UnitaryRep, a: &ComplexMatrix) -> Result<()> {
    if rep_s.group() != frame.action.group() {
        return Err(Error::Representation(
            "system representation and frame use different groups".into(),
        ));
    }
    if a.rows() != rep_s.dim() || a.cols() != rep_s.dim() {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, system space is C^{}",
            a.rows(),
            a.cols(),
            rep_s.dim()
        )));
    }
    Ok(())
}

/// The orbit function `f_A: x' ↦ g.A` where `g` is the chosen representative
/// of the coset mapping to `x'`, indexed by points of the frame space.
pub fn orbit_function(
    rep_s: &UnitaryRep,
    a: &ComplexMatrix,
    orbit: &OrbitBijection,
    choice: RepresentativeChoice,
) -> Result<OperatorFunction> {
    let n = orbit.coset_to_point.len();
    let values = (0..n)
        .map(|p| rep_s.act(orbit.element_for_point(p, choice), a))
        .collect::<Result<Vec<_>>>()?;
    OperatorFunction::new(values)
}

/// `yen` computed with a given representative system and no invariance or
/// well-definedness checks.
pub fn yen_with_representatives(
    frame: &Frame,
    rep_s: &UnitaryRep,
    a: &ComplexMatrix,
    x: usize,
    choice: RepresentativeChoice,
) -> Result<ComplexMatrix> {
    check_compatible(frame, rep_s, a)?;
    let orbit = orbit_bijection(&frame.action, x)?;
    integrate(&orbit_function(rep_s, a, &orbit, choice)?, &frame.povm)
}

/// Direct coset sum `Σ_c U_S(g_c) A U_S(g_c)* ⊗ E(g_c.x)` without going
/// through [`integrate`].
pub fn yen_coset_sum(
    frame: &Frame,
    rep_s: &UnitaryRep,
    a: &ComplexMatrix,
    x: usize,
    choice: RepresentativeChoice,
) -> Result<ComplexMatrix> {
    check_compatible(frame, rep_s, a)?;
    let orbit = orbit_bijection(&frame.action, x)?;
    let mut out = ComplexMatrix::zero(rep_s.dim() * frame.povm.dim());
    for g in orbit.cosets.representatives_by(choice) {
        let ga = rep_s.act(g, a)?;
        let effect = frame.povm.effect(frame.action.apply(g, x));
        out.add_scaled(ONE, &ga.kron(effect))?;
    }
    Ok(out)
}

/// `||yen_smallest(A) - yen_largest(A)||` for arbitrary `A`; zero (to
/// rounding) exactly when the coset function is well defined on `A`.
pub fn representative_discrepancy(
    frame: &Frame,
    rep_s: &UnitaryRep,
    a: &ComplexMatrix,
    x: usize,
) -> Result<f64> {
    let m1 = yen_with_representatives(frame, rep_s, a, x, RepresentativeChoice::Smallest)?;
    let m2 = yen_with_representatives(frame, rep_s, a, x, RepresentativeChoice::Largest)?;
    op_norm(&(&m1 - &m2))
}

/// `max_{h ∈ H_x} ||h.A - A||`.
pub fn stabilizer_invariance_defect(
    frame: &Frame,
    rep_s: &UnitaryRep,
    a: &ComplexMatrix,
    x: usize,
) -> Result<f64> {
    check_compatible(frame, rep_s, a)?;
    let orbit = orbit_bijection(&frame.action, x)?;
    rep_s.invariance_defect(orbit.cosets.subgroup(), a)
}

/// The relativization map at basepoint `x`.
///
/// Rejects `A` unless it is `H_x`-invariant within [`INVARIANCE_TOL`], and
/// recomputes with the largest-index representatives to confirm the result
/// does not depend on the choice (within [`WELL_DEFINED_TOL`]).
pub fn yen(frame: &Frame, rep_s: &UnitaryRep, a: &ComplexMatrix, x: usize) -> Result<RelativizedOperator> {
    let defect = stabilizer_invariance_defect(frame, rep_s, a, x)?;
    if defect > INVARIANCE_TOL {
        return Err(Error::NotInvariant { defect });
    }
    let m1 = yen_with_representatives(frame, rep_s, a, x, RepresentativeChoice::Smallest)?;
    let m2 = yen_with_representatives(frame, rep_s, a, x, RepresentativeChoice::Largest)?;
    let discrepancy = op_norm(&(&m1 - &m2))?;
    if discrepancy > WELL_DEFINED_TOL {
        return Err(Error::IllDefined { discrepancy });
    }
    Ok(RelativizedOperator {
        matrix: m1,
        basepoint: x,
        source: a.clone(),
    })
}

/// `max_g ||V(g) M V(g)* - M||` with `V = U_S ⊗ U_R`.
pub fn invariance_defect(frame: &Frame, rep_s: &UnitaryRep, m: &ComplexMatrix) -> Result<f64> {
    let v = product_rep(rep_s, &frame.rep_r)?;
    let mut worst: f64 = 0.0;
    for g in v.group().elements() {
        worst = worst.max(op_norm(&(&v.act(g, m)? - m))?);
    }
    Ok(worst)
}

pub fn check_invariance(
    frame: &Frame,
    rep_s: &UnitaryRep,
    rel: &RelativizedOperator,
    tol: f64,
) -> Result<CheckRecord> {
    let d = invariance_defect(frame, rep_s, &rel.matrix)?;
    Ok(CheckRecord::asserted("yen.invariance", d, 0.0, d, tol))
}

/// Random `H_x`-invariant operator: the stabilizer twirl of a Gaussian matrix.
pub fn random_invariant<R: Rng + ?Sized>(
    rng: &mut R,
    frame: &Frame,
    rep_s: &UnitaryRep,
    x: usize,
) -> Result<ComplexMatrix> {
    let orbit = orbit_bijection(&frame.action, x)?;
    let g = random::gaussian_matrix(rng, rep_s.dim(), rep_s.dim());
    rep_s.twirl(orbit.cosets.subgroup(), &g)
}

/// Complete-positivity probe at level `n`: draws `Y` with `n x n` blocks in
/// `B(H_S)^{H_x}`, forms `A = Y* Y` and checks `(1_n ⊗ yen)(A) >= -tol`.
/// `delta` is the worst negative eigenvalue magnitude over all trials.
pub fn check_cp<R: Rng + ?Sized>(
    frame: &Frame,
    rep_s: &UnitaryRep,
    x: usize,
    n: usize,
    trials: usize,
    rng: &mut R,
    tol: f64,
) -> Result<CheckRecord> {
    let orbit = orbit_bijection(&frame.action, x)?;
    let basis = invariant_subalgebra_basis(rep_s, orbit.cosets.subgroup())?;
    let ds = rep_s.dim();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_min = 0.0;
    let mut violations = 0usize;
    for _ in 0..trials {
        let blocks: Vec<Vec<ComplexMatrix>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let mut b = ComplexMatrix::zero(ds);
                        for e in &basis {
                            b.add_scaled(random::complex_normal(rng), e).expect("same shape");
                        }
                        b
                    })
                    .collect()
            })
            .collect();
        let y = ComplexMatrix::from_blocks(&blocks)?;
        let a = &y.adjoint() * &y;
        let images = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let block = a.block(i, j, ds);
                        let f = orbit_function(rep_s, &block, &orbit, RepresentativeChoice::Smallest)?;
                        integrate(&f, &frame.povm)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let out = ComplexMatrix::from_blocks(&images)?;
        let min = min_eigenvalue(&out, 1e-9 * out.max_abs().max(1.0))
            .ok_or_else(|| Error::Dimension("ampliated image is not Hermitian".into()))?;
        if min < -tol {
            violations += 1;
        }
        if -min > worst {
            worst = -min;
            worst_min = min;
        }
    }
    Ok(
        CheckRecord::asserted(format!("yen.cp_n{n}"), worst_min, 0.0, worst, tol)
            .with_note(format!("{violations} PSD violations in {trials} trials")),
    )
}

/// Tolerances for [`check_yen_properties`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YenTolerances {
    pub well_defined: f64,
    pub linearity: f64,
    pub adjoint: f64,
    pub contraction: f64,
    pub unitality: f64,
    pub multiplicative: f64,
    pub injective: f64,
    pub factorization: f64,
    pub homomorphism: f64,
    pub isometry: f64,
    pub basepoint: f64,
    pub invariance: f64,
}

impl Default for YenTolerances {
    fn default() -> Self {
        Self {
            well_defined: 1e-9,
            linearity: 1e-10,
            adjoint: 1e-12,
            contraction: 1e-9,
            unitality: 1e-11,
            multiplicative: 1e-9,
            injective: 1e-7,
            factorization: 1e-12,
            homomorphism: 1e-12,
            isometry: 1e-10,
            basepoint: 1e-9,
            invariance: 1e-9,
        }
    }
}

#[derive(Default)]
struct Worst {
    set: bool,
    delta: f64,
    lhs: f64,
    rhs: f64,
}

impl Worst {
    fn update(&mut self, lhs: f64, rhs: f64, delta: f64) {
        if !self.set || delta > self.delta {
            *self = Self {
                set: true,
                delta,
                lhs,
                rhs,
            };
        }
    }

    fn asserted(&self, name: &str, tol: f64) -> CheckRecord {
        CheckRecord::asserted(name, self.lhs, self.rhs, self.delta, tol)
    }
}

/// Runs the property battery of the relativization map on `trials` random
/// invariant operators. Multiplicativity is asserted only for sharp POVMs.
/// For localizable POVMs the residual of recovering `A` through the
/// localizing state at `x` is reported without a pass/fail verdict.
pub fn check_yen_properties<R: Rng + ?Sized>(
    frame: &Frame,
    rep_s: &UnitaryRep,
    x: usize,
    trials: usize,
    rng: &mut R,
    tols: &YenTolerances,
) -> Result<Vec<CheckRecord>> {
    let sharp = frame.povm.is_sharp(tols.multiplicative);
    let localizable = frame.povm.is_localizable(tols.multiplicative);
    let orbit = orbit_bijection(&frame.action, x)?;
    let smallest = RepresentativeChoice::Smallest;
    let map = |a: &ComplexMatrix| -> Result<ComplexMatrix> {
        integrate(&orbit_function(rep_s, a, &orbit, smallest)?, &frame.povm)
    };
    let ds = rep_s.dim();

    let mut well = Worst::default();
    let mut lin = Worst::default();
    let mut adj = Worst::default();
    let mut con = Worst::default();
    let mut mul = Worst::default();
    let mut inj = Worst::default();
    let mut fac = Worst::default();
    let mut hom = Worst::default();
    let mut iso = Worst::default();
    let mut inv = Worst::default();

    for _ in 0..trials {
        let a = random_invariant(rng, frame, rep_s, x)?;
        let b = random_invariant(rng, frame, rep_s, x)?;
        let (alpha, beta) = (random::unit_disk_scalar(rng), random::unit_disk_scalar(rng));

        let ya = yen(frame, rep_s, &a, x)?;
        let m_large = yen_with_representatives(frame, rep_s, &a, x, RepresentativeChoice::Largest)?;
        well.update(
            op_norm(&ya.matrix)?,
            op_norm(&m_large)?,
            op_norm(&(&ya.matrix - &m_large))?,
        );
        let ma = ya.matrix;
        let mb = map(&b)?;

        let combo = &a.scale(alpha) + &b.scale(beta);
        let lhs = map(&combo)?;
        let rhs = &ma.scale(alpha) + &mb.scale(beta);
        lin.update(op_norm(&lhs)?, op_norm(&rhs)?, op_norm(&(&lhs - &rhs))?);

        let lhs = map(&a.adjoint())?;
        let rhs = ma.adjoint();
        adj.update(lhs.max_abs(), rhs.max_abs(), lhs.max_abs_diff(&rhs));

        let (nm, na) = (op_norm(&ma)?, op_norm(&a)?);
        con.update(nm, na, nm - na);

        let prod = &ma * &mb;
        let direct = map(&(&a * &b))?;
        mul.update(op_norm(&prod)?, op_norm(&direct)?, op_norm(&(&prod - &direct))?);

        if localizable {
            let omega = frame.povm.localizing_state(x, tols.multiplicative)?;
            let weighted = &ComplexMatrix::identity(ds).kron(omega.matrix()) * &ma;
            let recovered = partial_trace(&weighted, ds, frame.povm.dim(), Subsystem::Second)?;
            inj.update(op_norm(&recovered)?, na, op_norm(&(&recovered - &a))?);
        }

        let direct_sum = yen_coset_sum(frame, rep_s, &a, x, smallest)?;
        fac.update(ma.max_abs(), direct_sum.max_abs(), ma.max_abs_diff(&direct_sum));

        let fa = orbit_function(rep_s, &a, &orbit, smallest)?;
        let fb = orbit_function(rep_s, &b, &orbit, smallest)?;
        let fab = orbit_function(rep_s, &(&a * &b), &orbit, smallest)?;
        let fadj = orbit_function(rep_s, &a.adjoint(), &orbit, smallest)?;
        let mut h: f64 = 0.0;
        for p in 0..fa.space_size() {
            h = h.max(fab.value(p).max_abs_diff(&(fa.value(p) * fb.value(p))));
            h = h.max(fadj.value(p).max_abs_diff(&fa.value(p).adjoint()));
        }
        hom.update(h, 0.0, h);
        let s = sup_norm(&fa);
        iso.update(s, na, (s - na).abs());

        let d = invariance_defect(frame, rep_s, &ma)?;
        inv.update(d, 0.0, d);
    }

    let unit = map(&ComplexMatrix::identity(ds))?;
    let u_delta = unit.max_abs_diff(&ComplexMatrix::identity(unit.rows()));

    let mut records = vec![
        well.asserted("yen.well_defined", tols.well_defined),
        lin.asserted("yen.linearity", tols.linearity),
        adj.asserted("yen.adjoint", tols.adjoint),
        con.asserted("yen.contraction", tols.contraction),
        CheckRecord::asserted("yen.unitality", unit.max_abs(), 1.0, u_delta, tols.unitality),
    ];
    records.push(if sharp {
        mul.asserted("yen.multiplicative", tols.multiplicative)
    } else {
        CheckRecord::informational(
            "yen.multiplicative",
            mul.lhs,
            mul.rhs,
            mul.delta,
            tols.multiplicative,
            "not asserted (non-sharp)",
        )
    });
    records.push(if localizable {
        CheckRecord::informational(
            "yen.injective",
            inj.lhs,
            inj.rhs,
            inj.delta,
            tols.injective,
            "reconstruction residual, reported only",
        )
    } else {
        CheckRecord::skipped("yen.injective", "skipped (not localizable)")
    });
    records.push(fac.asserted("yen.factorization", tols.factorization));
    records.push(hom.asserted("yen.homomorphism", tols.homomorphism));
    records.push(iso.asserted("yen.isometry", tols.isometry));
    records.push(check_basepoint_change(frame, rep_s, x, rng, tols.basepoint)?);
    records.push(inv.asserted("yen.invariance", tols.invariance));
    Ok(records)
}

/// For every point `x' = k.x`: `yen_{x'}(A) = yen_x(k⁻¹.A)` on random
/// `H_{x'}`-invariant `A`.
pub fn check_basepoint_change<R: Rng + ?Sized>(
    frame: &Frame,
    rep_s: &UnitaryRep,
    x: usize,
    rng: &mut R,
    tol: f64,
) -> Result<CheckRecord> {
    let orbit = orbit_bijection(&frame.action, x)?;
    let group = frame.action.group();
    let mut worst = Worst::default();
    for target in 0..frame.space_size() {
        let k = orbit.element_for_point(target, RepresentativeChoice::Smallest);
        let a = random_invariant(rng, frame, rep_s, target)?;
        let moved = yen(frame, rep_s, &a, target)?.matrix;
        let back = rep_s.act(group.inv(k), &a)?;
        let here = yen(frame, rep_s, &back, x)?.matrix;
        worst.update(op_norm(&moved)?, op_norm(&here)?, op_norm(&(&moved - &here))?);
    }
    Ok(worst.asserted("yen.basepoint", tol))
}
