//! Runs the full battery of checks on a scenario and assembles a [`Report`].
//!
//! Every check draws from its own ChaCha8 substream keyed by the check name,
//! so results are independent of scheduling and of which other checks run.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::integrate::{
    check_injective, check_linear_pos_adjoint, check_multiplicative, check_pairing, check_transform, fn_add,
    fn_scale, random_function, sup_norm, OperatorFunction, PropertyTolerances,
};
use crate::linalg::ComplexMatrix;
use crate::random;
use crate::relativize::{check_cp, check_frame, check_yen_properties, YenTolerances};
use crate::report::{CheckRecord, Classification, Report};
use crate::scenario::Scenario;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerances that do not follow `--tol`.
pub mod pinned {
    pub const PAIRING: f64 = 1e-10;
    pub const LINEARITY: f64 = 1e-10;
    pub const ADJOINT: f64 = 1e-12;
    pub const UNITALITY: f64 = 1e-11;
    pub const COVARIANCE: f64 = 1e-10;
    pub const INVARIANCE: f64 = 1e-9;
    pub const CP: f64 = 1e-8;
    pub const FACTORIZATION: f64 = 1e-12;
    pub const HOMOMORPHISM: f64 = 1e-12;
    pub const ISOMETRY: f64 = 1e-10;
    pub const INJECTIVE: f64 = 1e-7;
    pub const INJECTIVE_MARGIN: f64 = 1e-8;
}

pub const PAIRING_SAMPLES: usize = 200;
pub const PAIRING_FUNCTIONS: usize = 5;
pub const TRANSFORM_DRAWS: usize = 50;
pub const MAX_CP_LEVEL: usize = 3;
/// Size of the one-point perturbation used to probe injectivity.
pub const PERTURBATION: f64 = 0.5;
/// Size of the perturbation that keeps two integrals within the 1e-9 premise.
pub const NEAR_PERTURBATION: f64 = 1e-11;
/// Integrals closer than this count as equal for the injectivity premise.
pub const INTEGRAL_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            tol: DEFAULT_TOL,
        }
    }
}

impl RunConfig {
    /// Explicit values win over the scenario's own, which win over defaults.
    pub fn resolve(scenario: &Scenario, seed: Option<u64>, trials: Option<usize>, tol: Option<f64>) -> Self {
        Self {
            seed: seed.or(scenario.seed).unwrap_or(DEFAULT_SEED),
            trials: trials.or(scenario.trials).unwrap_or(DEFAULT_TRIALS),
            tol: tol.or(scenario.tol).unwrap_or(DEFAULT_TOL),
        }
    }

    pub fn property_tolerances(&self) -> PropertyTolerances {
        PropertyTolerances {
            linearity: pinned::LINEARITY,
            adjoint: pinned::ADJOINT,
            positivity: self.tol,
            contraction: self.tol,
            unitality: pinned::UNITALITY,
            algebra: self.tol,
        }
    }

    pub fn yen_tolerances(&self) -> YenTolerances {
        YenTolerances {
            well_defined: self.tol,
            linearity: pinned::LINEARITY,
            adjoint: pinned::ADJOINT,
            contraction: self.tol,
            unitality: pinned::UNITALITY,
            multiplicative: self.tol,
            injective: pinned::INJECTIVE,
            factorization: pinned::FACTORIZATION,
            homomorphism: pinned::HOMOMORPHISM,
            isometry: pinned::ISOMETRY,
            basepoint: self.tol,
            invariance: pinned::INVARIANCE,
        }
    }
}

pub fn classify(scenario: &Scenario, tol: f64) -> Classification {
    let povm = scenario.frame.povm();
    Classification {
        sharp: povm.is_sharp(tol),
        localizable: povm.is_localizable(tol),
    }
}

type Job<'a> = (
    &'static str,
    Box<dyn Fn(&mut ChaCha8Rng) -> Result<Vec<CheckRecord>> + Send + Sync + 'a>,
);

/// All checks for `scenario`, in a fixed order.
pub fn run(scenario: &Scenario, cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let checks = run_checks(scenario, cfg);
    let mut report = Report::new(
        &scenario.name,
        cfg.seed,
        cfg.trials,
        cfg.tol,
        classify(scenario, cfg.tol),
        checks,
    );
    report.wall_time = start.elapsed().as_secs_f64();
    report
}

pub fn run_checks(scenario: &Scenario, cfg: &RunConfig) -> Vec<CheckRecord> {
    let jobs = jobs(scenario, cfg);
    jobs.par_iter()
        .map(|(name, job)| {
            let mut rng = random::substream(cfg.seed, random::stream_id(name));
            job(&mut rng).unwrap_or_else(|e| {
                vec![
                    CheckRecord::asserted(*name, f64::NAN, f64::NAN, f64::INFINITY, cfg.tol)
                        .with_note(format!("error: {e}")),
                ]
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn jobs<'a>(s: &'a Scenario, cfg: &'a RunConfig) -> Vec<Job<'a>> {
    let frame = &s.frame;
    let e = frame.povm();
    let ds = s.rep_s.dim();
    let n = e.space_size();
    let trials = cfg.trials;
    let tol = cfg.tol;
    let x = s.basepoint;

    let mut jobs: Vec<Job<'a>> = vec![
        (
            "frame.covariance",
            Box::new(move |_| Ok(vec![check_frame(frame, pinned::COVARIANCE)?])),
        ),
        (
            "integrate.pairing",
            Box::new(move |rng| {
                let mut worst: Option<CheckRecord> = None;
                for _ in 0..PAIRING_FUNCTIONS {
                    let f = random_function(rng, n, ds);
                    let r = check_pairing(&f, e, rng, PAIRING_SAMPLES, pinned::PAIRING)?;
                    if worst.as_ref().is_none_or(|w| r.delta > w.delta) {
                        worst = Some(r);
                    }
                }
                Ok(worst.into_iter().collect())
            }),
        ),
        (
            "integrate.properties",
            Box::new(move |rng| {
                Ok(check_linear_pos_adjoint(e, ds, rng, trials, &cfg.property_tolerances())?.into_records())
            }),
        ),
        (
            "integrate.multiplicative",
            Box::new(move |rng| {
                let mut worst: Option<CheckRecord> = None;
                for _ in 0..trials.max(1) {
                    let f = random_function(rng, n, ds);
                    let g = random_function(rng, n, ds);
                    let r = check_multiplicative(&f, &g, e, tol)?;
                    if worst.as_ref().is_none_or(|w| r.delta > w.delta) {
                        worst = Some(r);
                    }
                }
                Ok(worst.into_iter().collect())
            }),
        ),
        (
            "integrate.injective",
            Box::new(move |rng| injectivity(s, cfg, rng)),
        ),
        (
            "integrate.transform",
            Box::new(move |rng| {
                let mut worst: Option<CheckRecord> = None;
                for _ in 0..TRANSFORM_DRAWS {
                    let target: usize = rng.random_range(1..=4);
                    let phi: Vec<usize> = (0..n).map(|_| rng.random_range(0..target)).collect();
                    let f = random_function(rng, target, ds);
                    let dim_out: usize = rng.random_range(1..=3);
                    let min_kraus = dim_out.div_ceil(e.dim());
                    let n_kraus = rng.random_range(min_kraus..=min_kraus + 2);
                    let psi = random::kraus_channel(rng, e.dim(), dim_out, n_kraus)?;
                    let r = check_transform(&f, e, &phi, &psi, tol)?;
                    if worst.as_ref().is_none_or(|w| r.delta > w.delta) {
                        worst = Some(r);
                    }
                }
                Ok(worst.into_iter().collect())
            }),
        ),
        (
            "yen.properties",
            Box::new(move |rng| check_yen_properties(frame, &s.rep_s, x, trials, rng, &cfg.yen_tolerances())),
        ),
    ];
    for (level, name) in [(1, "yen.cp_n1"), (2, "yen.cp_n2"), (3, "yen.cp_n3")] {
        if level > MAX_CP_LEVEL {
            break;
        }
        jobs.push((
            name,
            Box::new(move |rng| {
                Ok(vec![check_cp(
                    frame,
                    &s.rep_s,
                    x,
                    level,
                    trials,
                    rng,
                    pinned::CP,
                )?])
            }),
        ));
    }
    jobs
}

/// Integrals that agree to [`INTEGRAL_AGREEMENT`] must come from functions
/// whose recovered versions agree to the injectivity tolerance, and a
/// perturbation of size [`PERTURBATION`] at one point must be recovered at
/// that size.
fn injectivity(s: &Scenario, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let e = s.frame.povm();
    if !e.is_localizable(cfg.tol) {
        return Ok(vec![
            CheckRecord::skipped("integrate.injective", "skipped (not localizable)"),
            CheckRecord::skipped("integrate.injective_margin", "skipped (not localizable)"),
        ]);
    }
    let (n, ds) = (e.space_size(), s.rep_s.dim());
    let mut near = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut margin = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut premise_failures = 0usize;
    for _ in 0..cfg.trials.max(1) {
        let f = random_function(rng, n, ds);
        let noise = random_function(rng, n, ds);
        let scale = NEAR_PERTURBATION / sup_norm(&noise);
        let g = fn_add(&f, &fn_scale(Complex64::new(scale, 0.0), &noise))?;
        let r = check_injective(&f, &g, e, cfg.tol)?;
        if r.integral_gap > INTEGRAL_AGREEMENT {
            premise_failures += 1;
        }
        let d = r.recovered_gap.max(r.recovery_residual);
        if d > near.0 {
            near = (d, r.integral_gap, r.recovered_gap);
        }

        let point = rng.random_range(0..n);
        let k = rng.random_range(0..ds);
        let bump = ComplexMatrix::basis_projector(ds, k).scale_real(PERTURBATION);
        let h = OperatorFunction::from_fn(n, |y| {
            if y == point {
                f.value(y) + &bump
            } else {
                f.value(y).clone()
            }
        })?;
        let r = check_injective(&f, &h, e, cfg.tol)?;
        let d = (r.recovered_gap - PERTURBATION).abs();
        if d > margin.0 {
            margin = (d, r.recovered_gap, PERTURBATION);
        }
    }
    let mut near_record =
        CheckRecord::asserted("integrate.injective", near.1, near.2, near.0, pinned::INJECTIVE);
    if premise_failures > 0 {
        near_record = near_record.with_note(format!(
            "{premise_failures} pairs had integrals further apart than {INTEGRAL_AGREEMENT:e}"
        ));
        near_record.pass = Some(false);
    }
    Ok(vec![
        near_record,
        CheckRecord::asserted(
            "integrate.injective_margin",
            margin.1,
            margin.2,
            margin.0,
            pinned::INJECTIVE_MARGIN,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin;

    #[test]
    fn report_is_deterministic_under_parallelism() {
        let s = builtin("z2-noisy").unwrap();
        let cfg = RunConfig {
            trials: 10,
            ..RunConfig::default()
        };
        let a = run(&s, &cfg).to_json_without_timing().unwrap();
        let b = run(&s, &cfg).to_json_without_timing().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noisy_scenario_skips_the_right_checks() {
        let s = builtin("z2-noisy").unwrap();
        let r = run(
            &s,
            &RunConfig {
                trials: 5,
                ..RunConfig::default()
            },
        );
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.check("integrate.multiplicative").unwrap().pass, None);
        assert_eq!(r.check("yen.injective").unwrap().pass, None);
        assert_eq!(r.check("integrate.injective").unwrap().pass, None);
        assert!(!r.classification.sharp && !r.classification.localizable);
    }

    #[test]
    fn resolve_prefers_explicit_values() {
        let mut s = builtin("z2-sharp").unwrap();
        s.trials = Some(7);
        let cfg = RunConfig::resolve(&s, Some(3), None, None);
        assert_eq!((cfg.seed, cfg.trials, cfg.tol), (3, 7, DEFAULT_TOL));
    }
}
