//! The verification suites. Inputs are drawn sequentially from the seeded
//! corpus, evaluated in parallel, and folded in input order, so a report
//! depends only on the seed and the config.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::corpus::Corpus;
use super::families::{fh_ratio, fs_sweep, FhFamily, FsFamily};
use super::report::{tally, Check, Observation, Report, Sweep, SweepRow};
use super::{CorpusSpec, Suite, SuiteConfig};
use crate::error::Result;
use crate::funcore::{Seq, StepFunction};
use crate::interp::{identity_norm, theta_p_enclosure, theta_p_norm};
use crate::kfun::{
    build_kcurve, build_kcurve_discrete, decreasing_bounds, k_refined, k_weighted_l1,
    split_bounds, Couple, GridSpec, KCurve, Method,
};
use crate::norms::{
    ap_constant, ces_inf_norm, ces_log_norm, ces_norm, cop_norm, lp_weighted, maximal_ratio,
    seq_norm, Quadrature, SeqSpace, Weight,
};
use crate::operators::{cesaro, copson, discrete_cesaro, discrete_copson, PiecewiseSmooth};

type Refs = &'static [(&'static str, &'static str)];

#[derive(Default)]
struct Outcome {
    checks: Vec<Check>,
    observations: Vec<Observation>,
    sweeps: Vec<Sweep>,
}

impl Outcome {
    fn extend(&mut self, c: Vec<Check>) {
        self.checks.extend(c);
    }
}

/// Runs `suite` and folds its checks into a report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let n = cfg.count.unwrap_or(suite.default_count());
    let spec = cfg.corpus.with_count(n);
    let (refs, out): (Refs, Outcome) = match suite {
        Suite::Identities => (IDENTITIES, identities(spec)?),
        Suite::Embeddings => (EMBEDDINGS, embeddings(spec, cfg)?),
        Suite::InterpIdentities => (INTERP, interp_identities(spec, cfg)?),
        Suite::RestrictedSandwich => (RESTRICTED, restricted(spec, cfg)?),
        Suite::CesSandwich => (CES, ces_sandwich(spec, cfg)?),
        Suite::DecreasingSandwich => (DECREASING, decreasing(spec, cfg)?),
        Suite::LogWeighted => (LOG_WEIGHTED, log_weighted(spec, cfg)?),
        Suite::Ap => (AP, ap(spec, cfg)?),
        Suite::CharDivergence => (CHAR, char_divergence(spec, cfg)?),
        Suite::HalflineCes => (HALFLINE, halfline(spec, cfg)?),
    };
    Ok(Report {
        suite: suite.name().to_string(),
        seed: cfg.corpus.seed,
        config: cfg.clone(),
        assertions: tally(&out.checks, refs),
        observations: out.observations,
        sweeps: out.sweeps,
    })
}

/// Evaluates `f` on every item in parallel and concatenates the checks in
/// item order; an error becomes a failed check carrying the input.
fn each<T, F>(tag: &str, items: &[T], f: F) -> Vec<Check>
where
    T: Serialize + Sync,
    F: Fn(&T, &mut Vec<Check>) -> Result<()> + Sync,
{
    items
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut v = Vec::new();
            if let Err(e) = f(x, &mut v) {
                v.push(Check::error(format!("{tag}#{i}"), &e));
            }
            let data: Arc<str> = serde_json::to_string(x).unwrap_or_default().into();
            for c in &mut v {
                c.input = format!("{tag}#{i} {}", c.input);
                c.data = Some(data.clone());
            }
            v
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn p_values(cfg: &SuiteConfig, default: &[f64]) -> Vec<f64> {
    if cfg.p_values.is_empty() {
        default.to_vec()
    } else {
        cfg.p_values.clone()
    }
}

/// `n` log-spaced points strictly inside `(lo, hi)`.
fn log_points(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let r = (hi / lo).ln();
    (1..=n)
        .map(|i| lo * (r * i as f64 / (n + 1) as f64).exp())
        .collect()
}

/// Breakpoints, cell midpoints and a few fixed fractions of `end`.
fn sample_points(f: &StepFunction, end: f64) -> Vec<f64> {
    let mut x: Vec<f64> = f.breaks()[1..].to_vec();
    x.extend(f.cells().map(|(a, b, _)| 0.5 * (a + b)));
    x.extend((1..=8).map(|k| end * k as f64 / 8.0));
    x.sort_by(f64::total_cmp);
    x.dedup();
    x
}

fn lp_curve(f: &StepFunction, couple: &Couple, grid: &GridSpec, mesh_n: usize, tol: f64) -> Result<KCurve> {
    build_kcurve(f, couple, grid, Method::Lp { mesh_n, tol })
}

fn observe(id: &str, paper_ref: &str, ratios: &[f64], drift: Option<f64>) -> Observation {
    Observation {
        id: id.to_string(),
        paper_ref: paper_ref.to_string(),
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count: ratios.len(),
        drift,
    }
}

/// Ratios over `items` (errors dropped and counted as failed checks), plus
/// the relative change of the first ratio when the mesh is four times finer.
fn ratio_observation<T, F>(
    out: &mut Outcome,
    tag: &str,
    id: &str,
    paper_ref: &str,
    items: &[T],
    mesh_n: usize,
    ratio: F,
) where
    T: Serialize + Sync,
    F: Fn(&T, usize) -> Result<f64> + Sync,
{
    let rs: Vec<Result<f64>> = items.par_iter().map(|x| ratio(x, mesh_n)).collect();
    let mut good = Vec::new();
    for (i, r) in rs.into_iter().enumerate() {
        match r {
            Ok(v) => good.push(v),
            Err(e) => out.checks.push(Check::error(format!("{tag}#{i}"), &e)),
        }
    }
    let drift = items
        .first()
        .and_then(|x| Some((ratio(x, mesh_n).ok()?, ratio(x, 4 * mesh_n).ok()?)))
        .map(|(a, b)| (b - a).abs() / a);
    out.observations.push(observe(id, paper_ref, &good, drift));
}

const IDENTITIES: Refs = &[
    ("ces-of-cop", "C(C*f) = Cf + C*f on [0, 1], proof of the Copson-space identification"),
    ("cop-of-ces", "C*(Cf) = Cf + C*f − ‖f‖₁ on [0, 1], same proof"),
    ("cop-of-ces-halfline", "C*(Cf) = Cf + C*f on the half-line, proof of the half-line case"),
    ("discrete-ces-of-cop", "C_d(C*_d x)(n) = C_d x(n) + C*_d x(n+1), proof of the sequence case"),
];

fn identities(spec: CorpusSpec) -> Result<Outcome> {
    let n = spec.count;
    let fs = Corpus::stream(spec, 1)?.units();
    let mut c = Corpus::stream(spec, 2)?;
    let hs = (0..n).map(|_| c.half_line(16.0, 4.0)).collect::<Result<Vec<_>>>()?;
    let mut c = Corpus::stream(spec, 3)?;
    let xs: Vec<Seq> = (0..n).map(|_| c.sequence()).collect();
    let mut out = Outcome::default();

    out.extend(each("unit", &fs, |f, v| {
        let (cf, cs) = (cesaro(f), copson(f));
        let l1 = f.integral();
        for x in sample_points(f, 1.0) {
            let (a, b) = (cf.eval(x), cs.eval(x));
            let at = format!("x={x:e}");
            v.push(Check::close("ces-of-cop", &at, cs.average_at(x), a + b, a + b, 1e-9));
            v.push(Check::close("cop-of-ces", &at, cf.copson_at(x), a + b - l1, a + b, 1e-9));
        }
        Ok(())
    }));
    out.extend(each("halfline", &hs, |f, v| {
        let (cf, cs) = (cesaro(f), copson(f));
        let mut pts = sample_points(f, 16.0);
        pts.extend([20.0, 100.0]);
        for x in pts {
            let (a, b) = (cf.eval(x), cs.eval(x));
            v.push(Check::close(
                "cop-of-ces-halfline",
                format!("x={x:e}"),
                cf.copson_at(x),
                a + b,
                a + b,
                1e-9,
            ));
        }
        Ok(())
    }));
    out.extend(each("seq", &xs, |x, v| {
        let m = x.len() + 3;
        let cs = discrete_copson(x, m + 1)?;
        let lhs = discrete_cesaro(&Seq::new(cs[..m].to_vec())?, m)?;
        let cd = discrete_cesaro(x, m)?;
        for k in 0..m {
            let rhs = cd[k] + cs[k + 1];
            v.push(Check::close(
                "discrete-ces-of-cop",
                format!("n={}", k + 1),
                lhs[k],
                rhs,
                rhs,
                1e-14,
            ));
        }
        Ok(())
    }));
    Ok(out)
}

const EMBEDDINGS: Refs = &[
    ("hardy", "‖Cf‖_p ≤ p′‖f‖_p, the classical Hardy inequality"),
    ("copson", "‖C*f‖_p ≤ p‖f‖_p, the Copson inequality"),
    ("ces-le-cop", "Cop_p ↪ Ces_p on [0, 1] with constant p′"),
    ("cop-le-ces-l1", "Ces_p ∩ L_1 ↪ Cop_p on [0, 1] with constant p + 1"),
    ("ces-chain", "L_∞ ↪ Ces_∞ ↪ Ces_q ↪ Ces_p ↪ Ces_1 on [0, 1] with constant 1"),
    ("l1-le-ces-inf", "Ces_∞ ↪ L_1 on [0, 1] with constant 1"),
    ("ces1-log", "Ces_1 = L_1(ln 1/t) on [0, 1]"),
    ("fubini", "∫₀¹ C*f = ∫₀¹ f"),
];

fn embeddings(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let fs = Corpus::stream(spec, 11)?.units();
    let mut ps = p_values(cfg, &[1.5, 2.0, 3.0, 10.0]);
    ps.sort_by(f64::total_cmp);
    let q = &cfg.quad;
    let mut out = Outcome::default();
    out.extend(each("unit", &fs, |f, v| {
        let (cf, cs) = (cesaro(f), copson(f));
        let l1 = f.integral();
        let ces1 = ces_norm(f, 1.0, q)?;
        let mut chain = vec![(1.0, ces1)];
        for &p in &ps {
            let pd = p / (p - 1.0);
            let fp = f.power_integral(p).powf(1.0 / p);
            let at = format!("p={p}");
            let rel = |r: f64| 1e-10 * r;
            let h = lp_weighted(&cf, p, &Weight::One, q)?;
            v.push(Check::le("hardy", &at, h, pd * fp, rel(pd * fp)));
            let c = lp_weighted(&cs, p, &Weight::One, q)?;
            v.push(Check::le("copson", &at, c, p * fp, rel(p * fp)));
            let (ces, cop) = (ces_norm(f, p, q)?, cop_norm(f, p, q)?);
            v.push(Check::le("ces-le-cop", &at, ces, pd * cop, rel(pd * cop)));
            let r = (p + 1.0) * ces.max(l1);
            v.push(Check::le("cop-le-ces-l1", &at, cop, r, rel(r)));
            chain.push((p, ces));
        }
        let inf = ces_inf_norm(f);
        chain.push((f64::INFINITY, inf));
        for w in chain.windows(2) {
            let at = format!("p={} q={}", w[0].0, w[1].0);
            v.push(Check::le("ces-chain", at, w[0].1, w[1].1, 1e-10 * w[1].1));
        }
        v.push(Check::le("l1-le-ces-inf", "", l1, inf, 1e-12 * inf));
        let direct = lp_weighted(&PiecewiseSmooth::from(f), 1.0, &Weight::LogInv, q)?;
        v.push(Check::close("ces1-log", "", ces1, direct, direct, 1e-12));
        let mass = lp_weighted(&cs, 1.0, &Weight::One, q)?;
        v.push(Check::close("fubini", "", mass, l1, l1, 1e-10));
        Ok(())
    }));
    Ok(out)
}

const INTERP: Refs = &[
    ("identity-unit", "‖f‖_{1−1/p,p} over (L_1, L_1(1/t)) equals (‖Cf + C*f‖_p^p + ‖f‖₁^p/(p−1))^{1/p} on [0, 1]"),
    ("identity-halfline", "‖f‖_{1−1/p,p} over (L_1, L_1(1/t)) equals ‖Cf + C*f‖_p on the half-line"),
    ("copson-sandwich-unit", "cop_p ≤ ‖f‖_{1−1/p,p} ≤ (p′ + (p−1)^{−1/p})·cop_p on [0, 1]"),
    ("ces-cop-halfline", "Ces_p ≤ ‖Cf + C*f‖_p ≤ p·Ces_p and Cop_p ≤ ‖Cf + C*f‖_p ≤ p′·Cop_p on the half-line"),
    ("discrete-sandwich", "cop_p ≤ ‖x‖_{1−1/p,p} ≤ (p′ + 1)·cop_p for (l_1, l_1(1/k))"),
    ("unit-vector", "‖e₁‖_{1−1/p,p} = (p′)^{1/p}"),
    ("fh-closed-forms", "C(f_h) and C*(f_h) agree with their displayed formulas"),
    ("fh-ratio", "‖f_h‖_{Cop(p)}^p / ‖f_h‖_{Ces(p)}^p ≥ (p−1)h^p/(1 − h^{p−1})"),
    ("fh-intermediate", "‖f_h‖_{Cop(p)}^p ≥ 2^p h(1−h)^{p/2} and ‖f_h‖_{Ces(p)}^p ≤ 2^p(1−h)^{p/2}(1−h^{p−1})/((p−1)h^{p−1})"),
    ("fh-divergence", "the ratio bound increases along h = 1 − 2^{−k} and exceeds 10³ by k = 10"),
];

fn interp_identities(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let n = spec.count;
    let fs = Corpus::stream(spec, 21)?.units();
    let mut c = Corpus::stream(spec, 22)?;
    let hs = (0..n).map(|_| c.half_line(16.0, 4.0)).collect::<Result<Vec<_>>>()?;
    let mut c = Corpus::stream(spec, 23)?;
    let xs: Vec<Seq> = (0..4 * n).map(|_| c.sequence()).collect();
    let ps = p_values(cfg, &[1.5, 2.0, 3.0]);
    let (q, grid) = (&cfg.quad, &cfg.grid);
    let couple = Couple::WeightedL1 {
        w0: Weight::One,
        w1: Weight::InvT,
    };
    let mut out = Outcome::default();

    out.extend(each("unit", &fs, |f, v| {
        let kc = build_kcurve(f, &couple, grid, Method::ClosedForm)?;
        for &p in &ps {
            let at = format!("p={p}");
            let a = identity_norm(f, p, q)?;
            let b = theta_p_norm(&kc, 1.0 - 1.0 / p, p, q)?;
            v.push(Check::close("identity-unit", &at, b, a, a, 1e-6));
            let cop = cop_norm(f, p, q)?;
            let c = p / (p - 1.0) + (p - 1.0).powf(-1.0 / p);
            v.push(Check::ge("copson-sandwich-unit", &at, b, cop, 1e-9 * b));
            v.push(Check::le("copson-sandwich-unit", &at, b, c * cop, 1e-9 * b));
        }
        Ok(())
    }));
    out.extend(each("halfline", &hs, |f, v| {
        let kc = build_kcurve(f, &couple, grid, Method::ClosedForm)?;
        for &p in &ps {
            let at = format!("p={p}");
            let a = identity_norm(f, p, q)?;
            let b = theta_p_norm(&kc, 1.0 - 1.0 / p, p, q)?;
            v.push(Check::close("identity-halfline", &at, b, a, a, 1e-6));
            let (ces, cop) = (ces_norm(f, p, q)?, cop_norm(f, p, q)?);
            let s = 1e-9 * a;
            v.push(Check::ge("ces-cop-halfline", &at, a, ces, s));
            v.push(Check::le("ces-cop-halfline", &at, a, p * ces, s));
            v.push(Check::ge("ces-cop-halfline", &at, a, cop, s));
            v.push(Check::le("ces-cop-halfline", &at, a, p / (p - 1.0) * cop, s));
        }
        Ok(())
    }));
    let dps = p_values(cfg, &[1.5, 2.0, 4.0]);
    let dgrid = GridSpec {
        t_max: grid.t_max.max(100.0),
        ..*grid
    };
    out.extend(each("seq", &xs, |x, v| {
        let kc = build_kcurve_discrete(x, &dgrid)?;
        for &p in &dps {
            let at = format!("p={p}");
            let cop = seq_norm(x, SeqSpace::Cop { p }, x.len(), q.rel_tol)?;
            let val = theta_p_norm(&kc, 1.0 - 1.0 / p, p, q)?;
            let upper = (p / (p - 1.0) + 1.0) * cop;
            v.push(Check::ge("discrete-sandwich", &at, val, cop, 1e-9 * val));
            v.push(Check::le("discrete-sandwich", &at, val, upper, 1e-9 * val));
        }
        Ok(())
    }));
    let e1 = [Seq::unit_vector(1)];
    out.extend(each("e1", &e1, |x, v| {
        let kc = build_kcurve_discrete(x, &dgrid)?;
        for &p in &dps {
            let want = (p / (p - 1.0)).powf(1.0 / p);
            let got = theta_p_norm(&kc, 1.0 - 1.0 / p, p, q)?;
            v.push(Check::close("unit-vector", format!("p={p}"), got, want, 1.0, 1e-10));
        }
        Ok(())
    }));

    let quad = Quadrature::new(q)?;
    let hs = [0.5, 0.9, 1.0 - 2f64.powi(-10)];
    out.extend(each("fh", &hs, |&h, v| {
        let fam = FhFamily::new(h)?;
        for i in 1..=100 {
            let t = i as f64 / 100.0;
            let at = format!("t={t}");
            let a = fam.ces_at(t);
            v.push(Check::close("fh-closed-forms", &at, fam.ces_at_quad(&quad, t), a, a.max(1.0), 1e-10));
            let a = fam.cop_at(t);
            v.push(Check::close("fh-closed-forms", &at, fam.cop_at_quad(&quad, t), a, a.max(1.0), 1e-10));
        }
        Ok(())
    }));
    let hk: Vec<f64> = (1..=10).map(|k| 1.0 - 2f64.powi(-k)).collect();
    let rs: Vec<_> = hk.par_iter().map(|&h| fh_ratio(h, 2.0, q)).collect();
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for (h, r) in hk.iter().zip(rs) {
        let at = format!("h={h}");
        match r {
            Ok(r) => {
                out.checks.push(Check::ge("fh-ratio", &at, r.ratio_pow, r.lower_bound, 0.0));
                let cp = r.cop.powf(r.p);
                out.checks.push(Check::ge("fh-intermediate", &at, cp, r.cop_pow_lower, 1e-12 * cp));
                let sp = r.ces.powf(r.p);
                out.checks.push(Check::le("fh-intermediate", &at, sp, r.ces_pow_upper, 1e-12 * sp));
                bounds.push(r.lower_bound);
                rows.push(SweepRow {
                    parameter: *h,
                    value_lhs: cp,
                    value_rhs: sp,
                    bound: r.lower_bound,
                    pass: r.ratio_pow >= r.lower_bound,
                });
            }
            Err(e) => out.checks.push(Check::error(&at, &e)),
        }
    }
    let increasing = bounds.windows(2).all(|w| w[1] > w[0]);
    out.checks.push(Check::holds("fh-divergence", "bounds increase", increasing));
    let last = bounds.last().copied().unwrap_or(0.0);
    out.checks.push(Check::ge("fh-divergence", "k=10", last, 1e3, 0.0));
    out.sweeps.push(Sweep {
        id: "fh-ratio".into(),
        rows,
    });
    Ok(out)
}

const RESTRICTED: Refs = &[
    ("restricted-lower", "G(t, h) ≤ K(t, h) for (L_1(1−s), Ces_∞) restricted to [1/2, 1]"),
    ("restricted-upper", "K(t, h) ≤ 2G(t, h) for (L_1(1−s), Ces_∞) restricted to [1/2, 1]"),
    ("restricted-converged", "mesh refinement of K(t, h) converges"),
];

fn restricted(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let n = spec.count;
    let mut c = Corpus::stream(spec, 31)?;
    let hs: Vec<StepFunction> = (0..n).map(|_| c.unit_supported(0.5, 1.0)).collect();
    let ts = log_points(cfg.t_count.div_ceil(2), 1e-3, 2.0);
    let couple = Couple::restricted(Couple::L1wCesInf { w0: Weight::OneMinusT }, 0.5, 1.0);
    let mut out = Outcome::default();
    out.extend(each("h", &hs, |h, v| {
        for &t in &ts {
            let at = format!("t={t:e}");
            let r = k_refined(t, h, &couple, &cfg.lp)?;
            let k = r.decomposition.value;
            let g = k_weighted_l1(t, h, &Weight::OneMinusT, &Weight::One);
            v.push(Check::ge("restricted-lower", &at, k, g, 1e-9 * g));
            v.push(Check::le("restricted-upper", &at, k, 2.0 * g, 1e-9 * g));
            v.push(Check::holds("restricted-converged", &at, r.converged));
        }
        Ok(())
    }));

    let fs = Corpus::stream(spec.with_count(n.min(10)), 32)?.units();
    let weighted = Couple::L1wCesInf { w0: Weight::OneMinusT };
    ratio_observation(
        &mut out,
        "unit",
        "l1w-cesinf-vs-ces",
        "(L_1(1−t), Ces_∞)_{1−1/p,p} = Ces_p on [0, 1] with unspecified constants",
        &fs,
        cfg.curve_mesh,
        |f, mesh| {
            let kc = lp_curve(f, &weighted, &cfg.grid, mesh, cfg.lp.tol)?;
            Ok(theta_p_enclosure(&kc, 0.5, 2.0, &cfg.quad)?.value / ces_norm(f, 2.0, &cfg.quad)?)
        },
    );
    Ok(out)
}

const CES: Refs = &[
    ("ces-lower", "(A + tB)/(2e²) ≤ K(t, f; Ces_1, Ces_∞) for 0 < t < 1"),
    ("ces-upper", "K(t, f; Ces_1, Ces_∞) ≤ A + tB for 0 < t < 1"),
    ("ces-converged", "mesh refinement of K(t, f) converges"),
    ("ces-embedding", "Ces_p ↪ (Ces_1, Ces_∞)_{1−1/p,p} with constant 1 on [0, 1]"),
];

fn ces_sandwich(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let fs = Corpus::stream(spec, 41)?.units();
    let ts = log_points(cfg.t_count, 1e-3, 1.0);
    let mut out = Outcome::default();
    out.extend(each("unit", &fs, |f, v| {
        for &t in &ts {
            let at = format!("t={t:e}");
            let r = k_refined(t, f, &Couple::Ces1CesInfUnit, &cfg.lp)?;
            let k = r.decomposition.value;
            let b = split_bounds(t, f)?;
            let eps = 1e-6 * b.upper;
            v.push(Check::ge("ces-lower", &at, k, b.lower, eps));
            v.push(Check::le("ces-upper", &at, k, b.upper, eps));
            v.push(Check::holds("ces-converged", &at, r.converged));
        }
        Ok(())
    }));
    let few = &fs[..fs.len().min(10)];
    let ps = p_values(cfg, &[2.0]);
    out.extend(each("unit", few, |f, v| {
        let kc = lp_curve(f, &Couple::Ces1CesInfUnit, &cfg.grid, cfg.curve_mesh, cfg.lp.tol)?;
        for &p in &ps {
            let e = theta_p_enclosure(&kc, 1.0 - 1.0 / p, p, &cfg.quad)?;
            let ces = ces_norm(f, p, &cfg.quad)?;
            v.push(Check::le("ces-embedding", format!("p={p}"), ces, e.value, 1e-6 * e.value));
        }
        Ok(())
    }));
    Ok(out)
}

const DECREASING: Refs = &[
    ("decreasing-lower", "v/3 ≤ K(t, f; Ces_1, Ces_∞) for non-increasing f, v = ‖fχ_{[0,τ₁(t)]}‖_{Ces_1}"),
    ("decreasing-upper", "K(t, f; Ces_1, Ces_∞) ≤ v for non-increasing f"),
    ("decreasing-converged", "mesh refinement of K(t, f) converges"),
];

fn decreasing(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let mut c = Corpus::stream(spec, 51)?;
    let fs: Vec<StepFunction> = (0..spec.count).map(|_| c.nonincreasing()).collect();
    let ts = log_points(cfg.t_count, 1e-3, 1.0);
    let mut out = Outcome::default();
    out.extend(each("nonincreasing", &fs, |f, v| {
        for &t in &ts {
            let at = format!("t={t:e}");
            let r = k_refined(t, f, &Couple::Ces1CesInfUnit, &cfg.lp)?;
            let k = r.decomposition.value;
            let (lo, hi) = decreasing_bounds(t, f)?;
            let eps = 1e-6 * hi;
            v.push(Check::ge("decreasing-lower", &at, k, lo, eps));
            v.push(Check::le("decreasing-upper", &at, k, hi, eps));
            v.push(Check::holds("decreasing-converged", &at, r.converged));
        }
        Ok(())
    }));
    Ok(out)
}

const LOG_WEIGHTED: Refs = &[(
    "log-weighted-lower",
    "‖f‖_{1−1/p,p} over (Ces_1, Ces_∞) ≥ (1/72)‖f‖_{Ces(p, ln)} on [0, 1]",
)];

fn log_weighted(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let fs = Corpus::stream(spec, 61)?.units();
    let ps = p_values(cfg, &[2.0]);
    let mut out = Outcome::default();
    out.extend(each("unit", &fs, |f, v| {
        let kc = lp_curve(f, &Couple::Ces1CesInfUnit, &cfg.grid, cfg.curve_mesh, cfg.lp.tol)?;
        for &p in &ps {
            let e = theta_p_enclosure(&kc, 1.0 - 1.0 / p, p, &cfg.quad)?;
            let cl = ces_log_norm(f, p, &cfg.quad)?;
            v.push(Check::ge("log-weighted-lower", format!("p={p}"), e.lo, cl / 72.0, 1e-9 * cl));
        }
        Ok(())
    }));
    let p = ps[0];
    ratio_observation(
        &mut out,
        "unit",
        "ces-couple-vs-ces-log",
        "‖f‖_{1−1/p,p} over (Ces_1, Ces_∞) ≤ C_p‖f‖_{Ces(p, ln)} with unspecified C_p",
        &fs,
        cfg.curve_mesh,
        |f, mesh| {
            let kc = lp_curve(f, &Couple::Ces1CesInfUnit, &cfg.grid, mesh, cfg.lp.tol)?;
            let e = theta_p_enclosure(&kc, 1.0 - 1.0 / p, p, &cfg.quad)?;
            Ok(e.value / ces_log_norm(f, p, &cfg.quad)?)
        },
    );
    Ok(out)
}

const AP: Refs = &[(
    "ap-bound",
    "(avg_I ln(e/x))·(avg_I ln(e/x)^{−1/(p−1)})^{p−1} ≤ 2 for every I ⊂ [0, 1]",
)];

fn ap(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let ps = p_values(cfg, &[1.5, 2.0, 4.0]);
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for &p in &ps {
        match ap_constant(&Weight::LogE, p, 200, &cfg.quad) {
            Ok(a) => {
                out.checks.push(Check::le("ap-bound", format!("p={p}"), a, 2.0, 0.0));
                rows.push(SweepRow {
                    parameter: p,
                    value_lhs: a,
                    value_rhs: 2.0,
                    bound: 2.0,
                    pass: a <= 2.0,
                });
            }
            Err(e) => out.checks.push(Check::error(format!("p={p}"), &e)),
        }
    }
    out.sweeps.push(Sweep {
        id: "ap".into(),
        rows,
    });
    let fs = Corpus::stream(spec, 71)?.units();
    for &p in &ps {
        let rs: Vec<Result<f64>> = fs
            .par_iter()
            .map(|f| maximal_ratio(f, p, &Weight::LogE, &cfg.quad))
            .collect();
        let mut good = Vec::new();
        for (i, r) in rs.into_iter().enumerate() {
            match r {
                Ok(v) => good.push(v),
                Err(e) => out.checks.push(Check::error(format!("unit#{i}"), &e)),
            }
        }
        out.observations.push(observe(
            &format!("maximal-log-weight-p{p}"),
            "M is bounded on L_p(ln(e/x)) on [0, 1]; observed ‖Mf‖/‖f‖",
            &good,
            None,
        ));
    }
    Ok(out)
}

const CHAR: Refs = &[
    ("char-ratio", "‖χ_{[0,s]}‖_{(Ces_1,Ces_∞)_{1−1/p,∞}} / ‖χ_{[0,s]}‖_{Ces_p} ≥ (1/(6p′))(ln(e/s))^{1/p}"),
    ("char-increasing", "the ratio increases as s = e^{−k} decreases"),
    ("char-ces-closed-form", "‖χ_{[0,s]}‖_{Ces_p} = ((p/(p−1))s − s^p/(p−1))^{1/p}"),
];

fn char_divergence(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let ss: Vec<f64> = (1..=spec.count).map(|k| (-(k as f64)).exp()).collect();
    let ps = p_values(cfg, &[2.0]);
    let mut out = Outcome::default();
    for &p in &ps {
        out.extend(each("s", &ss, |&s, v| {
            let fam = FsFamily::new(s)?;
            let a = fam.ces_norm(p);
            let b = ces_norm(&fam.step(), p, &cfg.quad)?;
            v.push(Check::close("char-ces-closed-form", format!("p={p}"), b, a, a, 1e-10));
            Ok(())
        }));
        match fs_sweep(p, &ss, &cfg.grid, cfg.curve_mesh, cfg.lp.tol) {
            Ok(sw) => {
                for r in &sw.rows {
                    let at = format!("p={p} s={:e}", r.s);
                    out.checks.push(Check::ge("char-ratio", at, r.ratio, r.bound, 0.0));
                }
                out.checks.push(Check::holds("char-increasing", format!("p={p}"), sw.increasing));
                out.sweeps.push(Sweep {
                    id: format!("char-divergence-p{p}"),
                    rows: sw
                        .rows
                        .iter()
                        .map(|r| SweepRow {
                            parameter: r.s,
                            value_lhs: r.interp,
                            value_rhs: r.ces,
                            bound: r.bound,
                            pass: r.pass,
                        })
                        .collect(),
                });
            }
            Err(e) => out.checks.push(Check::error(format!("p={p}"), &e)),
        }
    }
    Ok(out)
}

const HALFLINE: Refs = &[];

fn halfline(spec: CorpusSpec, cfg: &SuiteConfig) -> Result<Outcome> {
    let mut c = Corpus::stream(spec, 81)?;
    let fs = (0..spec.count)
        .map(|_| c.half_line(16.0, 4.0))
        .collect::<Result<Vec<_>>>()?;
    let ps = p_values(cfg, &[2.0]);
    let mut out = Outcome::default();
    for &p in &ps {
        ratio_observation(
            &mut out,
            "halfline",
            &format!("l1-cesinf-vs-ces-p{p}"),
            "(L_1, Ces_∞)_{1−1/p,p} = Ces_p on the half-line with unspecified constants",
            &fs,
            cfg.curve_mesh,
            |f, mesh| {
                let kc = lp_curve(f, &Couple::L1CesInfHalfLine, &cfg.grid, mesh, cfg.lp.tol)?;
                let e = theta_p_enclosure(&kc, 1.0 - 1.0 / p, p, &cfg.quad)?;
                Ok(e.value / ces_norm(f, p, &cfg.quad)?)
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("thm9".parse::<Suite>().is_err());
    }

    #[test]
    fn small_identities_run_is_reproducible() {
        let cfg = SuiteConfig::default().with_count(5);
        let a = run_suite(Suite::Identities, &cfg).unwrap();
        let b = run_suite(Suite::Identities, &cfg).unwrap();
        assert!(a.passed(), "{}", a.to_json());
        assert_eq!(a.to_json(), b.to_json());
    }
}
