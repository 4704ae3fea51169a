//! Finite groups given by Cayley tables, their unitary representations and
//! transitive actions, stabilizers, cosets and the orbit map `G/H_x ≅ Σ`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, unitarity_defect, ComplexMatrix, ONE, ZERO};

/// Tolerance for representation axioms.
pub const REP_TOL: f64 = 1e-9;
/// Hilbert-Schmidt norm below which a twirled matrix unit is treated as
/// linearly dependent on the basis built so far.
pub const RANK_TOL: f64 = 1e-8;

/// A finite group as an explicit multiplication table over `0..order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct FiniteGroup {
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    cayley: Vec<Vec<usize>>,
}

impl From<FiniteGroup> for GroupJson {
    fn from(g: FiniteGroup) -> Self {
        Self {
            order: g.order(),
            cayley: g.cayley,
        }
    }
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = Error;
    fn try_from(j: GroupJson) -> Result<Self> {
        if j.cayley.len() != j.order {
            return Err(Error::Group(format!(
                "order {} but Cayley table has {} rows",
                j.order,
                j.cayley.len()
            )));
        }
        FiniteGroup::from_cayley(j.cayley)
    }
}

impl FiniteGroup {
    /// Validates the table: square, entries in range, rows and columns are
    /// permutations, associative; derives identity and inverses.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::Group("empty Cayley table".into()));
        }
        for (a, row) in cayley.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Group(format!("row {a} has length {}", row.len())));
            }
            if !is_permutation(row.iter().copied(), n) {
                return Err(Error::Group(format!("row {a} is not a permutation")));
            }
        }
        for b in 0..n {
            if !is_permutation(cayley.iter().map(|r| r[b]), n) {
                return Err(Error::Group(format!("column {b} is not a permutation")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                        return Err(Error::Group(format!("associativity fails on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| cayley[g][h] == identity).expect("Latin square"))
            .collect();
        Ok(Self {
            cayley,
            identity,
            inverse,
        })
    }

    /// `Z_n` with `a · b = a + b mod n`.
    pub fn cyclic(n: usize) -> Self {
        let cayley = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_cayley(cayley).expect("cyclic group table is valid")
    }

    /// Dihedral group of order `2n`; element `f·n + k` is `r^k s^f` with
    /// `s r s = r^{-1}`.
    pub fn dihedral(n: usize) -> Self {
        let split = |g: usize| (g % n, g / n);
        let cayley = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (k1, f1) = split(a);
                        let (k2, f2) = split(b);
                        let k = if f1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                        ((f1 + f2) % 2) * n + k
                    })
                    .collect()
            })
            .collect();
        Self::from_cayley(cayley).expect("dihedral group table is valid")
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    /// Checks that `subset` is a subgroup: nonempty, in range, contains the
    /// identity, closed under products and inverses.
    pub fn validate_subgroup(&self, subset: &[usize]) -> Result<()> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        if set.len() != subset.len() {
            return Err(Error::Subgroup("repeated elements".into()));
        }
        if let Some(&g) = set.iter().find(|&&g| g >= self.order()) {
            return Err(Error::Subgroup(format!("element {g} out of range")));
        }
        if !set.contains(&self.identity) {
            return Err(Error::Subgroup("missing identity".into()));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(Error::Subgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::Subgroup(format!("not closed: {a}·{b}")));
                }
            }
        }
        Ok(())
    }
}

fn is_permutation(it: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for x in it {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    seen.iter().all(|&s| s)
}

/// A unitary representation `g ↦ U(g)` of a finite group.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl UnitaryRep {
    /// Validates unitarity, `U(e) = 1` and `U(g)U(h) = U(gh)` to [`REP_TOL`].
    pub fn new(group: FiniteGroup, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::Representation(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices[0].rows();
        for (g, u) in matrices.iter().enumerate() {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::Representation(format!("U({g}) has the wrong shape")));
            }
            let d = unitarity_defect(u);
            if d > REP_TOL {
                return Err(Error::Representation(format!(
                    "U({g}) is not unitary (defect {d:e})"
                )));
            }
        }
        let d = matrices[group.identity()].max_abs_diff(&ComplexMatrix::identity(dim));
        if d > REP_TOL {
            return Err(Error::Representation(format!(
                "U(e) is not the identity (defect {d:e})"
            )));
        }
        for g in group.elements() {
            for h in group.elements() {
                let d = (&matrices[g] * &matrices[h]).max_abs_diff(&matrices[group.mul(g, h)]);
                if d > REP_TOL {
                    return Err(Error::Representation(format!(
                        "U({g})U({h}) != U({g}·{h}) (defect {d:e})"
                    )));
                }
            }
        }
        Ok(Self { group, dim, matrices })
    }

    pub fn from_fn(group: FiniteGroup, f: impl Fn(usize) -> ComplexMatrix) -> Result<Self> {
        let matrices = group.elements().map(f).collect();
        Self::new(group, matrices)
    }

    pub fn trivial(group: FiniteGroup, dim: usize) -> Self {
        let matrices = vec![ComplexMatrix::identity(dim); group.order()];
        Self { group, dim, matrices }
    }

    /// Representation of `Z_n` generated by `u`, i.e. `k ↦ u^k`. `u^n` must
    /// be the identity.
    pub fn cyclic_generated(n: usize, u: &ComplexMatrix) -> Result<Self> {
        let mut powers = Vec::with_capacity(n);
        let mut acc = ComplexMatrix::identity(u.rows());
        for _ in 0..n {
            powers.push(acc.clone());
            acc = acc.matmul(u)?;
        }
        Self::new(FiniteGroup::cyclic(n), powers)
    }

    /// Left regular representation `L(g)|h> = |gh>`.
    pub fn left_regular(group: FiniteGroup) -> Self {
        let matrices = group
            .elements()
            .map(|g| {
                let perm: Vec<usize> = group.elements().map(|h| group.mul(g, h)).collect();
                ComplexMatrix::permutation(&perm)
            })
            .collect();
        Self::new(group, matrices).expect("left regular representation is valid")
    }

    /// Permutation representation of an action, `U(g)|x> = |g.x>`.
    pub fn permutation(action: &GroupAction) -> Self {
        let matrices = action
            .group()
            .elements()
            .map(|g| ComplexMatrix::permutation(&action.table[g]))
            .collect();
        Self::new(action.group().clone(), matrices).expect("permutation representation is valid")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// `g.A = U(g) A U(g)*`.
    pub fn act(&self, g: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        a.conjugate_by(&self.matrices[g])
    }

    /// `max_{h ∈ H} ||h.A - A||` (operator norm).
    pub fn invariance_defect(&self, subgroup: &[usize], a: &ComplexMatrix) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &h in subgroup {
            let d = self.act(h, a)?.try_sub(a)?;
            worst = worst.max(op_norm(&d)?);
        }
        Ok(worst)
    }

    /// Group average `|H|^{-1} Σ_h h.A`, the projector onto `B(H)^H`.
    pub fn twirl(&self, subgroup: &[usize], a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zero(self.dim);
        for &h in subgroup {
            acc.add_scaled(ONE, &self.act(h, a)?)?;
        }
        Ok(acc.scale_real(1.0 / subgroup.len() as f64))
    }
}

/// `g ↦ U_S(g) ⊗ U_R(g)`.
pub fn product_rep(rep_s: &UnitaryRep, rep_r: &UnitaryRep) -> Result<UnitaryRep> {
    if rep_s.group != rep_r.group {
        return Err(Error::Representation(
            "product of representations of different groups".into(),
        ));
    }
    let matrices = rep_s
        .matrices
        .iter()
        .zip(&rep_r.matrices)
        .map(|(a, b)| a.kron(b))
        .collect();
    Ok(UnitaryRep {
        group: rep_s.group.clone(),
        dim: rep_s.dim * rep_r.dim,
        matrices,
    })
}

/// Hilbert-Schmidt orthonormal basis of `{A : h.A = A for all h ∈ H}`,
/// obtained by twirling every matrix unit and running Gram-Schmidt.
pub fn invariant_subalgebra_basis(rep: &UnitaryRep, subgroup: &[usize]) -> Result<Vec<ComplexMatrix>> {
    rep.group.validate_subgroup(subgroup)?;
    let d = rep.dim;
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let mut v = rep.twirl(subgroup, &ComplexMatrix::unit(d, i, j))?;
            // Two passes of modified Gram-Schmidt keep the basis orthonormal
            // to working precision.
            for _ in 0..2 {
                for b in &basis {
                    let c = b.hs_inner(&v);
                    v.add_scaled(-c, b)?;
                }
            }
            let n = v.frobenius_norm();
            if n > RANK_TOL {
                basis.push(v.scale_real(1.0 / n));
            }
        }
    }
    Ok(basis)
}

/// A left action of a finite group on `0..space_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction {
    group: FiniteGroup,
    table: Vec<Vec<usize>>,
}

impl GroupAction {
    /// `table[g][x] = g.x`. Checks each row is a permutation, `e.x = x` and
    /// `(gh).x = g.(h.x)`.
    pub fn new(group: FiniteGroup, table: Vec<Vec<usize>>) -> Result<Self> {
        if table.len() != group.order() {
            return Err(Error::Action(format!(
                "{} rows for a group of order {}",
                table.len(),
                group.order()
            )));
        }
        let n = table[0].len();
        if n == 0 {
            return Err(Error::Action("empty space".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n || !is_permutation(row.iter().copied(), n) {
                return Err(Error::Action(format!(
                    "element {g} does not act as a permutation"
                )));
            }
        }
        if (0..n).any(|x| table[group.identity()][x] != x) {
            return Err(Error::Action("identity does not act trivially".into()));
        }
        for g in group.elements() {
            for h in group.elements() {
                for x in 0..n {
                    if table[group.mul(g, h)][x] != table[g][table[h][x]] {
                        return Err(Error::Action(format!(
                            "compatibility fails: ({g}·{h}).{x} != {g}.({h}.{x})"
                        )));
                    }
                }
            }
        }
        Ok(Self { group, table })
    }

    pub fn from_fn(group: FiniteGroup, space_size: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let table = group
            .elements()
            .map(|g| (0..space_size).map(|x| f(g, x)).collect())
            .collect();
        Self::new(group, table)
    }

    /// `g.h = gh` on the group itself.
    pub fn regular(group: FiniteGroup) -> Self {
        let n = group.order();
        Self::from_fn(group.clone(), n, |g, h| group.mul(g, h)).expect("regular action is valid")
    }

    pub fn trivial(group: FiniteGroup, space_size: usize) -> Self {
        Self::from_fn(group, space_size, |_, x| x).expect("trivial action is valid")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn space_size(&self) -> usize {
        self.table[0].len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.table[g][x]
    }

    pub fn orbit(&self, x: usize) -> BTreeSet<usize> {
        self.group.elements().map(|g| self.apply(g, x)).collect()
    }
}

/// Elements fixing `x`.
pub fn stabilizer(action: &GroupAction, x: usize) -> Vec<usize> {
    action
        .group
        .elements()
        .filter(|&g| action.apply(g, x) == x)
        .collect()
}

/// True iff the orbit of point 0 is the whole space.
pub fn check_transitive(action: &GroupAction) -> bool {
    action.orbit(0).len() == action.space_size()
}

/// Left cosets `gH` of a subgroup.
///
/// Cosets are numbered with the identity coset first and the rest in order
/// of their smallest element; each representative is the smallest element of
/// its coset, except the identity coset which is represented by `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSpace {
    subgroup: Vec<usize>,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

/// Which element of each coset stands in for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentativeChoice {
    Smallest,
    Largest,
}

impl CosetSpace {
    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// Elements of coset `c`, ascending.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    /// One representative per coset under the given choice.
    pub fn representatives_by(&self, choice: RepresentativeChoice) -> Vec<usize> {
        match choice {
            RepresentativeChoice::Smallest => self.representatives.clone(),
            RepresentativeChoice::Largest => self
                .members
                .iter()
                .map(|m| *m.last().expect("cosets are nonempty"))
                .collect(),
        }
    }
}

pub fn cosets(group: &FiniteGroup, subgroup: &[usize]) -> Result<CosetSpace> {
    group.validate_subgroup(subgroup)?;
    let mut sorted_h = subgroup.to_vec();
    sorted_h.sort_unstable();

    let mut coset_of = vec![usize::MAX; group.order()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut starts: Vec<usize> = std::iter::once(group.identity())
        .chain(group.elements().filter(|&g| g != group.identity()))
        .collect();
    starts.dedup();
    for g in starts {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let c = members.len();
        let mut m: Vec<usize> = sorted_h.iter().map(|&h| group.mul(g, h)).collect();
        m.sort_unstable();
        for &x in &m {
            coset_of[x] = c;
        }
        members.push(m);
    }
    let representatives = members
        .iter()
        .enumerate()
        .map(|(c, m)| if c == 0 { group.identity() } else { m[0] })
        .collect();
    Ok(CosetSpace {
        subgroup: sorted_h,
        representatives,
        coset_of,
        members,
    })
}

/// The bijection `gH_x ↦ g.x` between `G/H_x` and the space.
#[derive(Debug, Clone)]
pub struct OrbitBijection {
    pub basepoint: usize,
    pub cosets: CosetSpace,
    /// `coset_to_point[c] = g.x` for any `g` in coset `c`.
    pub coset_to_point: Vec<usize>,
    pub point_to_coset: Vec<usize>,
}

impl OrbitBijection {
    /// Group element `g` with `g.x = point`, chosen per `choice` among the
    /// coset mapping to `point`.
    pub fn element_for_point(&self, point: usize, choice: RepresentativeChoice) -> usize {
        let c = self.point_to_coset[point];
        self.cosets.representatives_by(choice)[c]
    }
}

pub fn orbit_bijection(action: &GroupAction, x: usize) -> Result<OrbitBijection> {
    let n = action.space_size();
    if x >= n {
        return Err(Error::Action(format!("point {x} outside space of size {n}")));
    }
    let orbit = action.orbit(x).len();
    if orbit != n {
        return Err(Error::NotTransitive { orbit, space: n });
    }
    let h = stabilizer(action, x);
    let cs = cosets(action.group(), &h)?;
    let mut coset_to_point = Vec::with_capacity(cs.len());
    for c in 0..cs.len() {
        let pts: BTreeSet<usize> = cs.members(c).iter().map(|&g| action.apply(g, x)).collect();
        if pts.len() != 1 {
            return Err(Error::Action(format!("coset {c} maps to several points")));
        }
        coset_to_point.push(*pts.first().unwrap());
    }
    let mut point_to_coset = vec![usize::MAX; n];
    for (c, &p) in coset_to_point.iter().enumerate() {
        if point_to_coset[p] != usize::MAX {
            return Err(Error::Action(format!("point {p} hit by two cosets")));
        }
        point_to_coset[p] = c;
    }
    if cs.len() != n {
        return Err(Error::Action(format!("{} cosets for {n} points", cs.len())));
    }
    Ok(OrbitBijection {
        basepoint: x,
        cosets: cs,
        coset_to_point,
        point_to_coset,
    })
}

/// Two-dimensional faithful representation of the dihedral group of order
/// `2n` (rotation by `2π/n` and a reflection), in the element numbering of
/// [`FiniteGroup::dihedral`].
pub fn dihedral_rotation_rep(n: usize) -> UnitaryRep {
    let group = FiniteGroup::dihedral(n);
    let rot = |k: usize| {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (s, c) = t.sin_cos();
        ComplexMatrix::from_fn(2, 2, |i, j| {
            let v = match (i, j) {
                (0, 0) | (1, 1) => c,
                (0, 1) => -s,
                _ => s,
            };
            Complex64::new(v, 0.0)
        })
    };
    let refl = ComplexMatrix::diag(&[ONE, -ONE]);
    UnitaryRep::from_fn(group, |g| {
        let (k, f) = (g % n, g / n);
        if f == 0 {
            rot(k)
        } else {
            &rot(k) * &refl
        }
    })
    .expect("dihedral rotation representation is valid")
}

/// Diagonal one-parameter representation `k ↦ diag(ω^{k p_0}, ω^{k p_1}, ...)`
/// of `Z_n` with `ω = e^{2πi/n}`.
pub fn cyclic_phase_rep(n: usize, charges: &[usize]) -> UnitaryRep {
    let entries: Vec<Complex64> = charges
        .iter()
        .map(|&p| {
            let t = 2.0 * std::f64::consts::PI * p as f64 / n as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect();
    UnitaryRep::cyclic_generated(n, &ComplexMatrix::diag(&entries)).expect("phase representation is valid")
}

pub(crate) fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).expect("static matrix")
}
