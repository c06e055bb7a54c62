use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const SCHEMA_VERSION: u32 = 1;

/// Pass rule for floating-point residuals: `diff ≤ max(rel·scale, abs)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 1e-12 }
    }
}

/// One comparison of two sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub diff: f64,
    pub scale: f64,
    pub exact_zero: bool,
}

impl Residual {
    pub fn zero() -> Self {
        Residual { diff: 0.0, scale: 0.0, exact_zero: true }
    }

    /// `diff / max(scale, abs/rel)`, so that passing means a value `≤ rel`.
    pub fn relative(&self, tol: Tolerance) -> f64 {
        self.diff / self.scale.max(tol.abs / tol.rel)
    }

    /// Raises the scale to at least `s`.
    pub fn widen(mut self, s: f64) -> Self {
        self.scale = self.scale.max(s);
        self
    }

    pub fn worst(self, other: Residual) -> Residual {
        Residual {
            diff: self.diff.max(other.diff),
            scale: self.scale.max(other.scale),
            exact_zero: self.exact_zero && other.exact_zero,
        }
    }
}

/// Compares `lhs` with `rhs`; `context` tensors only widen the scale (the
/// magnitudes of the individual terms that make up either side).
pub fn compare<S: Scalar>(lhs: &Tensor<S>, rhs: &Tensor<S>, context: &[&Tensor<S>]) -> Result<Residual> {
    let d = lhs.try_sub(rhs)?;
    let scale = context.iter().map(|t| t.max_magnitude()).fold(lhs.max_magnitude().max(rhs.max_magnitude()), f64::max);
    Ok(Residual { diff: d.max_magnitude(), scale, exact_zero: d.is_zero() })
}

pub fn compare_scalars<S: Scalar>(lhs: &S, rhs: &S, context: &[&S]) -> Residual {
    let d = lhs.clone() - rhs;
    let scale = context.iter().map(|x| x.magnitude()).fold(lhs.magnitude().max(rhs.magnitude()), f64::max);
    Residual { diff: d.magnitude(), scale, exact_zero: d.is_zero() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub exact: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn from_residuals(name: impl Into<String>, rs: &[Residual], tol: Tolerance, exact: bool) -> Self {
        let residuals: Vec<f64> = rs.iter().map(|r| r.relative(tol)).collect();
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        let pass = if exact { rs.iter().all(|r| r.exact_zero) } else { residuals.iter().all(|&r| r <= tol.rel) };
        Check {
            name: name.into(),
            residuals,
            max_residual,
            tolerance: if exact { 0.0 } else { tol.rel },
            exact,
            pass,
            note: None,
        }
    }

    /// A boolean outcome with no residual.
    pub fn outcome(name: impl Into<String>, pass: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            residuals: Vec::new(),
            max_residual: 0.0,
            tolerance: 0.0,
            exact: true,
            pass,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Collects residuals by check name across trials.
#[derive(Default)]
pub struct Collector {
    entries: BTreeMap<String, (Vec<Residual>, Tolerance)>,
    notes: BTreeMap<String, String>,
    extra: Vec<Check>,
}

impl Collector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, r: Residual, tol: Tolerance) {
        self.entries.entry(name.to_string()).or_insert_with(|| (Vec::new(), tol)).0.push(r);
    }

    pub fn note(&mut self, name: &str, note: impl Into<String>) {
        self.notes.insert(name.to_string(), note.into());
    }

    pub fn add(&mut self, check: Check) {
        self.extra.push(check);
    }

    pub fn merge(&mut self, other: Collector) {
        for (name, (rs, tol)) in other.entries {
            let e = self.entries.entry(name).or_insert_with(|| (Vec::new(), tol));
            e.0.extend(rs);
        }
        self.notes.extend(other.notes);
        self.extra.extend(other.extra);
    }

    pub fn finish(self, exact: bool) -> Vec<Check> {
        let notes = self.notes;
        let mut checks: Vec<Check> = self
            .entries
            .into_iter()
            .map(|(name, (rs, tol))| {
                let mut c = Check::from_residuals(name.clone(), &rs, tol, exact);
                c.note = notes.get(&name).cloned();
                c
            })
            .collect();
        checks.extend(self.extra);
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        checks
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub model: String,
    pub seed: Option<u64>,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, model: impl Into<String>, seed: Option<u64>, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport { schema: SCHEMA_VERSION, suite: suite.into(), model: model.into(), seed, pass, checks }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable residual table.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "suite {} on {}{}: {}\n",
            self.suite,
            self.model,
            self.seed.map(|s| format!(" (seed {s})")).unwrap_or_default(),
            if self.pass { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            let tol = if c.exact { "exact".to_string() } else { format!("{:.1e}", c.tolerance) };
            out.push_str(&format!(
                "  {:<width$}  {}  max {:>10.3e}  tol {:>7}{}\n",
                c.name,
                if c.pass { "ok  " } else { "FAIL" },
                c.max_residual,
                tol,
                c.note.as_ref().map(|n| format!("  [{n}]")).unwrap_or_default(),
            ));
        }
        out
    }
}
