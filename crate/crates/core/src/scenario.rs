//! Built-in scenarios and the JSON scenario format.
//!
//! ```json
//! {
//!   "name": "my-frame",
//!   "group": {"order": 2, "cayley": [[0, 1], [1, 0]]},
//!   "action": [[0, 1], [1, 0]],
//!   "rep_R": [{"dim": 2, "re": [[1, 0], [0, 1]]}, {"dim": 2, "re": [[0, 1], [1, 0]]}],
//!   "rep_S": [{"dim": 1, "re": [[1]]}, {"dim": 1, "re": [[1]]}],
//!   "povm": {"space_size": 2, "effects": [{"dim": 2, "re": [[1, 0], [0, 0]]}, {"dim": 2, "re": [[0, 0], [0, 1]]}]},
//!   "basepoint": 0
//! }
//! ```
//!
//! Loading validates structure (group table, representations, action,
//! transitivity, POVM normalization) but not covariance, which is reported by
//! the `frame.covariance` check.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{cyclic_phase_rep, dihedral_rotation_rep, pauli_x, FiniteGroup, GroupAction, UnitaryRep};
use crate::linalg::ComplexMatrix;
use crate::povm::{noisy_basis_povm, Povm};
use crate::relativize::Frame;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub frame: Frame,
    pub rep_s: UnitaryRep,
    pub basepoint: usize,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    group: FiniteGroup,
    action: Vec<Vec<usize>>,
    #[serde(rename = "rep_R")]
    rep_r: Vec<ComplexMatrix>,
    #[serde(rename = "rep_S")]
    rep_s: Vec<ComplexMatrix>,
    povm: Povm,
    #[serde(default)]
    basepoint: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        frame: Frame,
        rep_s: UnitaryRep,
        basepoint: usize,
    ) -> Result<Self> {
        if rep_s.group() != frame.action().group() {
            return Err(Error::Scenario("rep_S and the frame use different groups".into()));
        }
        if basepoint >= frame.space_size() {
            return Err(Error::Scenario(format!(
                "basepoint {basepoint} outside space of size {}",
                frame.space_size()
            )));
        }
        Ok(Self {
            name: name.into(),
            description: description.into(),
            frame,
            rep_s,
            basepoint,
            trials: None,
            seed: None,
            tol: None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ScenarioJson = serde_json::from_str(text)?;
        let group = j.group;
        let action = GroupAction::new(group.clone(), j.action)?;
        let rep_r = UnitaryRep::new(group.clone(), j.rep_r)?;
        let rep_s = UnitaryRep::new(group, j.rep_s)?;
        let frame = Frame::without_covariance_check(action, rep_r, j.povm)?;
        let mut s = Self::new(
            j.name.unwrap_or_else(|| "custom".into()),
            j.description.unwrap_or_default(),
            frame,
            rep_s,
            j.basepoint,
        )?;
        s.trials = j.trials;
        s.seed = j.seed;
        s.tol = j.tol;
        Ok(s)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let j = ScenarioJson {
            name: Some(self.name.clone()),
            description: (!self.description.is_empty()).then(|| self.description.clone()),
            group: self.frame.action().group().clone(),
            action: self.frame.action().table().to_vec(),
            rep_r: self.frame.rep_r().matrices().to_vec(),
            rep_s: self.rep_s.matrices().to_vec(),
            povm: self.frame.povm().clone(),
            basepoint: self.basepoint,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }
}

/// Names and one-line descriptions of the built-in scenarios.
pub const BUILTIN: &[(&str, &str)] = &[
    ("z2-sharp", "Z2 swapping two points, basis PVM on C^2, U_S = X"),
    (
        "z2-noisy",
        "Z2 swapping two points, noisy basis POVM (eps = 0.2), U_S = X",
    ),
    (
        "z4-parity",
        "Z4 acting by parity on two points, stabilizer {0, 2}, U_S = diag(1, i^g)",
    ),
    (
        "z6-regular",
        "Z6 regular action, basis PVM on C^6, 3-dim phase rep on S",
    ),
    (
        "d4-regular",
        "dihedral group of order 8, regular action on C^8, 2-dim irrep on S",
    ),
    (
        "c3-on-triangle",
        "Z3 on three points, trine POVM on C^2 (neither sharp nor localizable)",
    ),
    (
        "z2-unsharp-localizable",
        "Z2 swapping two points, diag(1, .5, 0) / diag(0, .5, 1) on C^3",
    ),
];

pub fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    BUILTIN.to_vec()
}

/// Resolves `name` to a built-in scenario, or loads `file:<path>`.
pub fn resolve(reference: &str) -> Result<Scenario> {
    match reference.strip_prefix("file:") {
        Some(path) => Scenario::from_path(Path::new(path)),
        None => builtin(reference),
    }
}

pub fn builtin(name: &str) -> Result<Scenario> {
    let description = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    let (frame, rep_s, basepoint) = match name {
        "z2-sharp" => z2_swap(Povm::basis(2))?,
        "z2-noisy" => z2_swap(noisy_basis_povm(2, 0.2)?)?,
        "z4-parity" => z4_parity()?,
        "z6-regular" => z6_regular()?,
        "d4-regular" => d4_regular()?,
        "c3-on-triangle" => c3_on_triangle()?,
        "z2-unsharp-localizable" => z2_unsharp_localizable()?,
        _ => unreachable!("every BUILTIN entry is matched"),
    };
    Scenario::new(name, description, frame, rep_s, basepoint)
}

type Parts = (Frame, UnitaryRep, usize);

const COVARIANCE_TOL: f64 = 1e-12;

fn pauli_rep(n: usize, odd: impl Fn(usize) -> bool) -> Result<UnitaryRep> {
    UnitaryRep::from_fn(FiniteGroup::cyclic(n), |g| {
        if odd(g) {
            pauli_x()
        } else {
            ComplexMatrix::identity(2)
        }
    })
}

fn z2_swap(povm: Povm) -> Result<Parts> {
    let z2 = FiniteGroup::cyclic(2);
    let x = pauli_rep(2, |g| g == 1)?;
    let frame = Frame::new(GroupAction::regular(z2), x.clone(), povm, COVARIANCE_TOL)?;
    Ok((frame, x, 0))
}

fn z4_parity() -> Result<Parts> {
    let z4 = FiniteGroup::cyclic(4);
    let action = GroupAction::from_fn(z4, 2, |g, x| (x + g) % 2)?;
    let rep_r = pauli_rep(4, |g| g % 2 == 1)?;
    let frame = Frame::new(action, rep_r, Povm::basis(2), COVARIANCE_TOL)?;
    Ok((frame, cyclic_phase_rep(4, &[0, 1]), 0))
}

fn z6_regular() -> Result<Parts> {
    let z6 = FiniteGroup::cyclic(6);
    let frame = Frame::new(
        GroupAction::regular(z6.clone()),
        UnitaryRep::left_regular(z6),
        Povm::basis(6),
        COVARIANCE_TOL,
    )?;
    Ok((frame, cyclic_phase_rep(6, &[0, 1, 3]), 0))
}

fn d4_regular() -> Result<Parts> {
    let d4 = FiniteGroup::dihedral(4);
    let frame = Frame::new(
        GroupAction::regular(d4.clone()),
        UnitaryRep::left_regular(d4),
        Povm::basis(8),
        COVARIANCE_TOL,
    )?;
    Ok((frame, dihedral_rotation_rep(4), 0))
}

fn c3_on_triangle() -> Result<Parts> {
    let z3 = FiniteGroup::cyclic(3);
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % 3) as f64 / 3.0);
    let effects = (0..3)
        .map(|x| {
            let psi = [Complex64::new(1.0, 0.0), omega(x)];
            ComplexMatrix::outer(&psi).scale_real(1.0 / 3.0)
        })
        .collect();
    let povm = Povm::new(effects)?;
    let rep_r = UnitaryRep::from_fn(z3.clone(), |g| {
        ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), omega(g)])
    })?;
    let action = GroupAction::regular(z3);
    let rep_s = UnitaryRep::permutation(&action);
    let frame = Frame::new(action, rep_r, povm, COVARIANCE_TOL)?;
    Ok((frame, rep_s, 0))
}

fn z2_unsharp_localizable() -> Result<Parts> {
    let z2 = FiniteGroup::cyclic(2);
    let povm = Povm::new(vec![
        ComplexMatrix::real_diag(&[1.0, 0.5, 0.0]),
        ComplexMatrix::real_diag(&[0.0, 0.5, 1.0]),
    ])?;
    let rep_r = UnitaryRep::from_fn(z2.clone(), |g| {
        if g == 1 {
            ComplexMatrix::permutation(&[2, 1, 0])
        } else {
            ComplexMatrix::identity(3)
        }
    })?;
    let frame = Frame::new(GroupAction::regular(z2), rep_r, povm, COVARIANCE_TOL)?;
    Ok((frame, pauli_rep(2, |g| g == 1)?, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_constructs() {
        for (name, _) in list_scenarios() {
            let s = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
            assert!(s.frame.covariance_defect().unwrap() < 1e-12, "{name}");
        }
    }

    #[test]
    fn classification_of_builtins() {
        let expect = [
            ("z2-sharp", true, true),
            ("z2-noisy", false, false),
            ("z4-parity", true, true),
            ("z6-regular", true, true),
            ("d4-regular", true, true),
            ("c3-on-triangle", false, false),
            ("z2-unsharp-localizable", false, true),
        ];
        for (name, sharp, loc) in expect {
            let s = builtin(name).unwrap();
            assert_eq!(s.frame.povm().is_sharp(1e-9), sharp, "{name}");
            assert_eq!(s.frame.povm().is_localizable(1e-9), loc, "{name}");
        }
    }

    #[test]
    fn json_round_trip() {
        for (name, _) in list_scenarios() {
            let s = builtin(name).unwrap();
            let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
            assert_eq!(back.name, s.name);
            assert_eq!(back.basepoint, s.basepoint);
            assert_eq!(back.rep_s, s.rep_s);
            assert_eq!(back.frame.povm(), s.frame.povm());
            assert_eq!(back.frame.rep_r(), s.frame.rep_r());
        }
    }

    #[test]
    fn unknown_names_and_bad_files() {
        assert!(matches!(resolve("nope"), Err(Error::UnknownScenario(_))));
        assert!(matches!(
            resolve("file:/definitely/missing.json"),
            Err(Error::Io(_))
        ));
        assert!(Scenario::from_json("{").is_err());
    }

    #[test]
    fn loading_rejects_non_transitive_action() {
        let mut v: serde_json::Value =
            serde_json::from_str(&builtin("z2-sharp").unwrap().to_json().unwrap()).unwrap();
        v["action"] = serde_json::json!([[0, 1], [0, 1]]);
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::NotTransitive { .. }), "{err}");
    }
}
