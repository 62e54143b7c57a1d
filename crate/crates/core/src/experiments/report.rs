//! Suite reports: asserted inequalities with worst-case margins, observed
//! ratio ranges, and per-parameter sweeps.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SuiteConfig;

/// The input and values behind the worst check of an assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub input: String,
    pub expected: f64,
    pub observed: f64,
    /// The serialized input, kept only when the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub id: String,
    pub paper_ref: String,
    /// Smallest relative slack over all checks; negative means violated.
    pub margin: f64,
    pub pass: bool,
    pub checks: usize,
    pub failures: usize,
    /// The worst check, kept whether or not it failed.
    pub worst: Option<Failure>,
}

/// A ratio that is reported but not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub paper_ref: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Relative change of the ratio for one input when the mesh is refined.
    pub drift: Option<f64>,
}

impl Observation {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    /// Positive, finite, and `max/min ≤ 10³`.
    pub fn bounded(&self) -> bool {
        self.min > 0.0 && self.max.is_finite() && self.spread() <= 1e3
    }
}

/// One CSV row: `parameter, value_lhs, value_rhs, bound, pass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub value_lhs: f64,
    pub value_rhs: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub id: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub assertions: Vec<Assertion>,
    pub observations: Vec<Observation>,
    pub sweeps: Vec<Sweep>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> usize {
        self.assertions.iter().map(|a| a.failures).sum()
    }

    pub fn assertion(&self, id: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.id == id)
    }

    pub fn observation(&self, id: &str) -> Option<&Observation> {
        self.observations.iter().find(|o| o.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// One evaluated inequality `lhs ≤ rhs + slack`.
#[derive(Debug, Clone)]
pub(crate) struct Check {
    pub id: &'static str,
    pub input: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub data: Option<Arc<str>>,
    /// `rhs` is the computed value and `lhs` the bound.
    pub lower_bound: bool,
}

pub(crate) const COMPUTATION: &str = "computation";

impl Check {
    pub fn le(id: &'static str, input: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        Check {
            id,
            input: input.into(),
            lhs,
            rhs,
            slack,
            data: None,
            lower_bound: false,
        }
    }

    /// `observed ≥ bound − slack`.
    pub fn ge(id: &'static str, input: impl Into<String>, observed: f64, bound: f64, slack: f64) -> Self {
        Check {
            lower_bound: true,
            ..Check::le(id, input, bound, observed, slack)
        }
    }

    /// A computation that failed outright.
    pub fn error(input: impl Into<String>, err: &crate::Error) -> Self {
        Check::holds(COMPUTATION, format!("{}: {err}", input.into()), false)
    }

    /// `|a − b| ≤ tol·scale`, recorded as `|a − b|/scale ≤ tol`.
    pub fn close(id: &'static str, input: impl Into<String>, a: f64, b: f64, scale: f64, tol: f64) -> Self {
        let s = if scale > 0.0 { scale } else { 1.0 };
        Check::le(id, input, (a - b).abs() / s, tol, 0.0)
    }

    /// A boolean condition, margin ±1.
    pub fn holds(id: &'static str, input: impl Into<String>, ok: bool) -> Self {
        Check::le(id, input, if ok { 0.0 } else { 1.0 }, if ok { 1.0 } else { 0.0 }, 0.0)
    }

    fn pass(&self) -> bool {
        self.lhs <= self.rhs + self.slack
    }

    fn margin(&self) -> f64 {
        let scale = self.rhs.abs().max(self.lhs.abs()).max(f64::MIN_POSITIVE);
        if self.pass() {
            ((self.rhs - self.lhs) / scale).max(0.0)
        } else {
            (self.rhs + self.slack - self.lhs) / scale
        }
    }
}

/// Folds checks in order into per-id assertions.
pub(crate) fn tally(checks: &[Check], refs: &[(&'static str, &'static str)]) -> Vec<Assertion> {
    let mut out: Vec<Assertion> = refs
        .iter()
        .map(|(id, r)| Assertion {
            id: id.to_string(),
            paper_ref: r.to_string(),
            margin: f64::INFINITY,
            pass: true,
            checks: 0,
            failures: 0,
            worst: None,
        })
        .collect();
    for c in checks {
        let idx = match out.iter().position(|a| a.id == c.id) {
            Some(i) => i,
            None => {
                out.push(Assertion {
                    id: c.id.to_string(),
                    paper_ref: String::new(),
                    margin: f64::INFINITY,
                    pass: true,
                    checks: 0,
                    failures: 0,
                    worst: None,
                });
                out.len() - 1
            }
        };
        let a = &mut out[idx];
        a.checks += 1;
        let m = c.margin();
        if !c.pass() {
            a.failures += 1;
            a.pass = false;
        }
        if m < a.margin || a.worst.is_none() {
            a.margin = a.margin.min(m);
            let (expected, observed) = if c.lower_bound { (c.lhs, c.rhs) } else { (c.rhs, c.lhs) };
            a.worst = Some(Failure {
                input: c.input.clone(),
                expected,
                observed,
                data: (!c.pass()).then(|| c.data.as_deref().map(str::to_string)).flatten(),
            });
        }
    }
    // an assertion that was never exercised is not a pass
    for a in &mut out {
        if a.checks == 0 && a.id != COMPUTATION {
            a.pass = false;
            a.margin = f64::NAN;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_worst() {
        let checks = vec![
            Check::le("a", "x", 1.0, 2.0, 0.0),
            Check::le("a", "y", 1.9, 2.0, 0.0),
            Check::le("b", "z", 3.0, 2.0, 0.0),
            Check::holds("a", "w", true),
            Check::ge("c", "v", 5.0, 4.0, 0.0),
        ];
        let t = tally(&checks, &[("a", "ref a"), ("b", "ref b"), ("c", "ref c")]);
        assert!(t[0].pass && (t[0].margin - 0.05).abs() < 1e-12);
        assert_eq!(t[0].worst.as_ref().unwrap().input, "y");
        assert!(!t[1].pass && t[1].failures == 1 && t[1].margin < 0.0);
        let w = t[2].worst.as_ref().unwrap();
        assert!(t[2].pass && w.expected == 4.0 && w.observed == 5.0);
        let t = tally(&checks[..1], &[("a", ""), ("d", "")]);
        assert!(!t[1].pass, "unexercised assertion must not pass");
    }
}
