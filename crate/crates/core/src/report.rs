//! Check records and verification reports, plus their text/JSON/CSV
//! encodings.
//!
//! JSON floats are written with 17 significant digits so that every value
//! round-trips exactly; non-finite values are written as the strings
//! `"NaN"`, `"Infinity"` and `"-Infinity"`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of one numerical check.
///
/// `delta` is the quantity compared against `tol`; `lhs`/`rhs` are the two
/// sides that produced it (for residual-style checks `rhs` is zero). `pass`
/// is `None` when the check ran but its outcome is informational only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub scenario: String,
    #[serde(with = "sig17")]
    pub lhs: f64,
    #[serde(with = "sig17")]
    pub rhs: f64,
    #[serde(with = "sig17")]
    pub delta: f64,
    #[serde(with = "sig17")]
    pub tol: f64,
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Asserted check: passes iff `delta <= tol`.
    pub fn asserted(check: impl Into<String>, lhs: f64, rhs: f64, delta: f64, tol: f64) -> Self {
        Self {
            check: check.into(),
            scenario: String::new(),
            lhs,
            rhs,
            delta,
            tol,
            pass: Some(delta <= tol),
            note: None,
        }
    }

    /// Reported but not asserted.
    pub fn informational(
        check: impl Into<String>,
        lhs: f64,
        rhs: f64,
        delta: f64,
        tol: f64,
        note: impl Into<String>,
    ) -> Self {
        Self {
            check: check.into(),
            scenario: String::new(),
            lhs,
            rhs,
            delta,
            tol,
            pass: None,
            note: Some(note.into()),
        }
    }

    /// Check whose precondition does not hold, so nothing was computed.
    pub fn skipped(check: impl Into<String>, note: impl Into<String>) -> Self {
        Self::informational(check, f64::NAN, f64::NAN, f64::NAN, f64::NAN, note)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_scenario(mut self, scenario: &str) -> Self {
        self.scenario = scenario.to_string();
        self
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub sharp: bool,
    pub localizable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub trials: usize,
    #[serde(with = "sig17")]
    pub tol: f64,
    pub classification: Classification,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(with = "sig17")]
    pub wall_time: f64,
}

impl Report {
    pub fn new(
        scenario: &str,
        seed: u64,
        trials: usize,
        tol: f64,
        classification: Classification,
        checks: Vec<CheckRecord>,
    ) -> Self {
        let checks: Vec<CheckRecord> = checks.into_iter().map(|c| c.with_scenario(scenario)).collect();
        let pass = checks.iter().all(|c| !c.failed());
        Self {
            scenario: scenario.to_string(),
            seed,
            trials,
            tol,
            classification,
            pass,
            checks,
            wall_time: 0.0,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == name)
    }

    /// JSON encoding with `wall_time` zeroed, for determinism comparisons.
    pub fn to_json_without_timing(&self) -> Result<String> {
        let mut r = self.clone();
        r.wall_time = 0.0;
        Ok(serde_json::to_string_pretty(&r)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Which property family a check belongs to, shown next to it in text output.
pub fn property_of(check: &str) -> &'static str {
    let (family, prop) = check.split_once('.').unwrap_or((check, ""));
    match (family, prop) {
        ("frame", _) => "reference frame: covariance of the POVM",
        ("integrate", "pairing") => "operator-valued integral: product-state pairing",
        ("integrate", "transform") => "operator-valued integral: push-forward / channel identity",
        ("integrate", p) if p.starts_with("algebra") => "bounded function algebra: normed *-algebra",
        ("integrate", "multiplicative") => "integration map: multiplicative when sharp",
        ("integrate", p) if p.starts_with("injective") => "integration map: injective when localizable",
        ("integrate", _) => "integration map: positive unital adjoint-preserving contraction",
        ("yen", "well_defined") => "relativization: well-defined on cosets",
        ("yen", "invariance") => "relativization: image is G-invariant",
        ("yen", p) if p.starts_with("cp") => "relativization: complete positivity",
        ("yen", "multiplicative") => "relativization: multiplicative when sharp",
        ("yen", "injective") => "relativization: injective when localizable",
        ("yen", "factorization") => "relativization: integral of the orbit function",
        ("yen", "isometry") => "relativization: orbit function is isometric",
        ("yen", "homomorphism") => "relativization: orbit function is a *-homomorphism",
        ("yen", "basepoint") => "relativization: change of basepoint",
        ("yen", _) => "relativization: unital adjoint-preserving contraction",
        _ => "",
    }
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)?),
        Format::Csv => emit_csv(report),
        Format::Text => Ok(emit_text(report)),
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "-".to_string()
    } else {
        format!("{x:.3e}")
    }
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {}  (seed {}, trials {}, tol {:e})",
        report.scenario, report.seed, report.trials, report.tol
    );
    let _ = writeln!(
        out,
        "classification: sharp={} localizable={}",
        report.classification.sharp, report.classification.localizable
    );
    let width = report.checks.iter().map(|c| c.check.len()).max().unwrap_or(0);
    for c in &report.checks {
        let status = match c.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        let _ = write!(
            out,
            "  {status}  {:<width$}  delta={:>10}  tol={:>9}  lhs={:>10}  rhs={:>10}  | {}",
            c.check,
            fmt_num(c.delta),
            fmt_num(c.tol),
            fmt_num(c.lhs),
            fmt_num(c.rhs),
            property_of(&c.check),
        );
        if let Some(note) = &c.note {
            let _ = write!(out, "  [{note}]");
        }
        out.push('\n');
    }
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "overall: {} ({} checks, {} failed, {:.3} s)",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len(),
        failed,
        report.wall_time
    );
    out
}

fn emit_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "check", "lhs", "rhs", "delta", "tol", "pass", "note"])?;
    for c in &report.checks {
        let pass = match c.pass {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        w.write_record([
            c.scenario.as_str(),
            c.check.as_str(),
            &sig17::format(c.lhs),
            &sig17::format(c.rhs),
            &sig17::format(c.delta),
            &sig17::format(c.tol),
            pass,
            c.note.as_deref().unwrap_or(""),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

mod sig17 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::ser::{Error as _, Serializer};
    use serde::Serialize;
    use serde_json::value::RawValue;

    pub fn format(x: f64) -> String {
        if x.is_nan() {
            "NaN".into()
        } else if x.is_infinite() {
            if x > 0.0 {
                "Infinity".into()
            } else {
                "-Infinity".into()
            }
        } else {
            format!("{x:.16e}")
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            let raw = RawValue::from_string(format(*x)).map_err(S::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&format(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or NaN/Infinity/-Infinity")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "NaN" => Ok(f64::NAN),
                    "Infinity" => Ok(f64::INFINITY),
                    "-Infinity" => Ok(f64::NEG_INFINITY),
                    _ => Err(E::custom(format!("invalid float string `{v}`"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}
