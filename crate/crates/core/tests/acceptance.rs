//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Runs each verification suite once at its full corpus size and judges the
//! criteria from the reports, including the wall-clock budget of each.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ces_interp::experiments::{run_suite, Report, Suite, SuiteConfig};

struct Runs {
    reports: HashMap<Suite, (Report, Duration)>,
}

impl Runs {
    fn get(&mut self, s: Suite) -> &(Report, Duration) {
        self.reports.entry(s).or_insert_with(|| {
            let start = Instant::now();
            let r = run_suite(s, &SuiteConfig::default()).expect("suite runs");
            (r, start.elapsed())
        })
    }
}

type Judge = Box<dyn FnOnce(&mut Runs) -> Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

/// All listed assertions pass and the suite ran within `budget`.
fn assertions(run: &(Report, Duration), ids: &[&str], budget: Duration) -> Verdict {
    let (r, took) = run;
    let mut pass = *took <= budget;
    let mut parts = Vec::new();
    for id in ids {
        match r.assertion(id) {
            Some(a) => {
                pass &= a.pass;
                parts.push(format!("{id}: {} checks, {} failures, margin {:.3e}", a.checks, a.failures, a.margin));
            }
            None => {
                pass = false;
                parts.push(format!("{id}: missing"));
            }
        }
    }
    if let Some(c) = r.assertion("computation") {
        pass &= c.pass;
        parts.push(format!("computation errors {}", c.failures));
    }
    parts.push(format!("{:.1}s of {}s", took.as_secs_f64(), budget.as_secs()));
    Verdict { pass, detail: parts.join("; ") }
}

fn observations(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [Suite::RestrictedSandwich, Suite::HalflineCes, Suite::LogWeighted] {
        let (r, _) = runs.get(s);
        for o in &r.observations {
            let drift_ok = o.drift.is_none_or(|d| d.is_finite() && d < 1e-2);
            pass &= o.bounded() && drift_ok;
            parts.push(format!(
                "{} [{:.4}, {:.4}] drift {}",
                o.id,
                o.min,
                o.max,
                o.drift.map_or("n/a".into(), |d| format!("{d:.1e}"))
            ));
        }
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let mut runs = Runs { reports: HashMap::new() };
    let secs = Duration::from_secs;
    let criteria: Vec<(&str, Judge)> = vec![
        (
            "operator identities",
            Box::new(move |r| {
                let ids = ["ces-of-cop", "cop-of-ces", "cop-of-ces-halfline", "discrete-ces-of-cop"];
                assertions(r.get(Suite::Identities), &ids, secs(10))
            }),
        ),
        (
            "exact (θ,p) identities",
            Box::new(move |r| assertions(r.get(Suite::InterpIdentities), &["identity-unit", "identity-halfline"], secs(60))),
        ),
        (
            "discrete sandwich and e₁",
            Box::new(move |r| assertions(r.get(Suite::InterpIdentities), &["discrete-sandwich", "unit-vector"], secs(60))),
        ),
        (
            "Hardy, Copson and embedding constants",
            Box::new(move |r| {
                let ids = ["hardy", "copson", "ces-le-cop", "cop-le-ces-l1"];
                assertions(r.get(Suite::Embeddings), &ids, secs(30))
            }),
        ),
        (
            "(Ces₁, Ces_∞) splitting sandwich",
            Box::new(move |r| {
                assertions(r.get(Suite::CesSandwich), &["ces-lower", "ces-upper", "ces-converged"], secs(600))
            }),
        ),
        (
            "non-increasing sandwich",
            Box::new(move |r| {
                let ids = ["decreasing-lower", "decreasing-upper", "decreasing-converged"];
                assertions(r.get(Suite::DecreasingSandwich), &ids, secs(300))
            }),
        ),
        (
            "log-weighted lower constant 1/72",
            Box::new(move |r| {
                let run = r.get(Suite::LogWeighted);
                let mut v = assertions(run, &["log-weighted-lower"], secs(600));
                let upper = run.0.observation("ces-couple-vs-ces-log");
                v.pass &= upper.is_some_and(|o| o.max.is_finite() && o.count > 0);
                v
            }),
        ),
        ("A_p bound for ln(e/x)", Box::new(move |r| assertions(r.get(Suite::Ap), &["ap-bound"], secs(60)))),
        (
            "indicator divergence",
            Box::new(move |r| {
                let ids = ["char-ratio", "char-increasing", "char-ces-closed-form"];
                assertions(r.get(Suite::CharDivergence), &ids, secs(600))
            }),
        ),
        (
            "f_h counterexample",
            Box::new(move |r| assertions(r.get(Suite::InterpIdentities), &["fh-ratio", "fh-divergence"], secs(60))),
        ),
        (
            "restricted (L₁(1−t), Ces_∞) sandwich",
            Box::new(move |r| {
                let ids = ["restricted-lower", "restricted-upper", "restricted-converged"];
                assertions(r.get(Suite::RestrictedSandwich), &ids, secs(120))
            }),
        ),
        ("bounded qualitative ratios", Box::new(observations)),
    ];

    let mut failed = 0;
    for (i, (name, judge)) in criteria.into_iter().enumerate() {
        let v = judge(&mut runs);
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
