//! Peetre K-functionals: closed forms for weighted `L_1` couples, `(L_1, L_∞)`
//! and `(l_1, l_1(1/k))`, and an exact LP over step decompositions for the
//! Cesàro couples.

mod curve;
mod greedy;
pub mod simplex;

pub use curve::{build_kcurve, build_kcurve_discrete, GridSpec, Head, KCurve, Method, Tail};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::funcore::{rearrange, tau_pair, Domain, Seq, StepFunction};
use crate::norms::{ces_inf_norm, weighted_l1, Weight};
use greedy::{Caps, Problem};

/// A Banach couple `(X₀, X₁)` of function (or sequence) spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Couple {
    /// `(L_1(w₀), L_1(w₁))`
    WeightedL1 { w0: Weight, w1: Weight },
    L1Linf,
    /// `(l_1, l_1(1/k))`
    DiscreteL1L1InvK,
    /// `(Ces_1, Ces_∞)` on `[0, 1]`
    Ces1CesInfUnit,
    /// `(L_1(w₀), Ces_∞)`
    L1wCesInf { w0: Weight },
    /// `(L_1, Ces_∞)` on the half-line
    L1CesInfHalfLine,
    /// Subcouple of functions supported in `[a, b]`.
    Restricted {
        base: Box<Couple>,
        support: (f64, f64),
    },
}

impl Couple {
    pub fn restricted(base: Couple, a: f64, b: f64) -> Couple {
        Couple::Restricted {
            base: Box::new(base),
            support: (a, b),
        }
    }

    /// Checks the couple against the domain of its inputs.
    pub fn validate(&self, domain: Domain) -> Result<()> {
        let weight_ok = |w: &Weight| match w {
            Weight::Step(s) if s.domain() != domain => Err(Error::DomainMismatch),
            _ => Ok(()),
        };
        match self {
            Couple::WeightedL1 { w0, w1 } => {
                weight_ok(w0)?;
                weight_ok(w1)
            }
            Couple::L1wCesInf { w0 } => weight_ok(w0),
            Couple::L1Linf => Ok(()),
            Couple::DiscreteL1L1InvK => Err(Error::Unsupported(
                "the sequence couple takes sequences, not step functions".into(),
            )),
            Couple::Ces1CesInfUnit if !domain.is_unit() => Err(Error::DomainMismatch),
            Couple::L1CesInfHalfLine if domain.is_unit() => Err(Error::DomainMismatch),
            Couple::Ces1CesInfUnit | Couple::L1CesInfHalfLine => Ok(()),
            Couple::Restricted { base, support } => {
                let (a, b) = *support;
                if !(a >= 0.0 && a < b && b <= domain.right_end()) {
                    return Err(Error::OutOfRange {
                        name: "support",
                        value: b,
                        expected: "an interval [a, b] inside the domain",
                    });
                }
                base.validate(domain)
            }
        }
    }

    /// `f·χ_support` for restricted couples, with the couple they restrict.
    fn effective(&self, f: &StepFunction) -> (StepFunction, &Couple, Vec<f64>) {
        match self {
            Couple::Restricted { base, support } => {
                let g = f.restricted(support.0, support.1);
                let (g, c, mut pts) = base.effective(&g);
                pts.extend([support.0, support.1]);
                (g, c, pts)
            }
            other => (f.clone(), other, Vec::new()),
        }
    }

    pub fn x0_norm(&self, f: &StepFunction) -> Result<f64> {
        self.validate(f.domain())?;
        let (f, base, _) = self.effective(f);
        Ok(match base {
            Couple::WeightedL1 { w0, .. } | Couple::L1wCesInf { w0 } => weighted_l1(&f, w0),
            Couple::L1Linf | Couple::L1CesInfHalfLine => f.integral(),
            Couple::Ces1CesInfUnit => weighted_l1(&f, &Weight::LogInv),
            Couple::DiscreteL1L1InvK | Couple::Restricted { .. } => unreachable!("validated"),
        })
    }

    pub fn x1_norm(&self, f: &StepFunction) -> Result<f64> {
        self.validate(f.domain())?;
        let (f, base, _) = self.effective(f);
        Ok(match base {
            Couple::WeightedL1 { w1, .. } => weighted_l1(&f, w1),
            Couple::L1Linf => f.max_value(),
            Couple::Ces1CesInfUnit | Couple::L1wCesInf { .. } | Couple::L1CesInfHalfLine => {
                ces_inf_norm(&f)
            }
            Couple::DiscreteL1L1InvK | Couple::Restricted { .. } => unreachable!("validated"),
        })
    }

    /// Whether `K(t, f)` has a closed form for this couple.
    pub fn has_closed_form(&self) -> bool {
        match self {
            Couple::WeightedL1 { .. } | Couple::L1Linf | Couple::DiscreteL1L1InvK => true,
            Couple::Restricted { base, .. } => base.has_closed_form(),
            _ => false,
        }
    }

    /// A `t_c` with `K(t) = ‖f‖_{X₀}` for every `t ≥ t_c`, when one is known.
    pub fn constant_beyond(&self, f: &StepFunction) -> Option<f64> {
        let (f, base, _) = self.effective(f);
        let supp = f.support_end();
        match base {
            Couple::WeightedL1 { w0, w1 } if w0 == w1 => Some(1.0),
            Couple::WeightedL1 {
                w0: Weight::One,
                w1: Weight::InvT,
            } => Some(supp.max(f64::MIN_POSITIVE)),
            Couple::L1Linf => Some(rearrange(&f).support_end().max(f64::MIN_POSITIVE)),
            Couple::Ces1CesInfUnit => Some(1.0),
            // t‖h‖_{Ces_∞} ≥ t‖h‖_{L_1} ≥ ‖h‖_{L_1(w₀)} once t ≥ sup w₀
            Couple::L1wCesInf { w0 } if f.domain().is_unit() && w0.sup().is_finite() => {
                Some(w0.sup().max(f64::MIN_POSITIVE))
            }
            // t‖h‖_{Ces_∞} ≥ (t/x)∫₀ˣ h with x the end of the support
            Couple::L1CesInfHalfLine => Some(supp.max(f64::MIN_POSITIVE)),
            _ => None,
        }
    }

    fn is_prefix(&self) -> bool {
        matches!(
            self,
            Couple::Ces1CesInfUnit | Couple::L1wCesInf { .. } | Couple::L1CesInfHalfLine
        )
    }

    /// Points where an optimal decomposition may switch at this `t`.
    fn geometry(&self, t: f64, end: f64) -> Vec<f64> {
        match self {
            Couple::WeightedL1 { w0, w1 } => {
                let mut v = w0.crossovers(w1, t, 0.0, end);
                v.extend(w0.breaks());
                v.extend(w1.breaks());
                v
            }
            Couple::Ces1CesInfUnit if t < 1.0 => match tau_pair(t) {
                Ok(tp) => vec![tp.tau1, tp.tau2],
                Err(_) => vec![],
            },
            Couple::L1wCesInf { w0 } => {
                let mut v = w0.crossovers(&Weight::One, t, 0.0, end);
                v.extend(w0.breaks());
                if matches!(w0, Weight::LogInv) && t < 1.0 {
                    v.push(crate::funcore::tau1(t));
                }
                v
            }
            _ => vec![],
        }
    }

    fn x0_weight(&self) -> Weight {
        match self {
            Couple::WeightedL1 { w0, .. } | Couple::L1wCesInf { w0 } => w0.clone(),
            Couple::Ces1CesInfUnit => Weight::LogInv,
            _ => Weight::One,
        }
    }
}

/// `K(t, f; L_1(w₀), L_1(w₁)) = ∫ min(w₀, t·w₁)|f|`, exact with the
/// crossover points inserted into the mesh.
pub fn k_weighted_l1(t: f64, f: &StepFunction, w0: &Weight, w1: &Weight) -> f64 {
    let end = f.right_end();
    let mut pts = w0.crossovers(w1, t, 0.0, end);
    pts.extend(w0.breaks());
    pts.extend(w1.breaks());
    let g = f.refined_at(&pts);
    g.cells()
        .filter(|c| c.2 > 0.0)
        .map(|(a, b, v)| {
            let mid = 0.5 * (a + b);
            if w0.eval(mid) <= t * w1.eval(mid) {
                v * w0.integral(a, b)
            } else {
                v * t * w1.integral(a, b)
            }
        })
        .sum()
}

/// `K(t, f; L_1, L_∞) = ∫₀ᵗ f*`.
pub fn k_l1_linf(t: f64, f: &StepFunction) -> f64 {
    rearrange(f)
        .cells()
        .map(|(a, b, v)| v * (b.min(t) - a).max(0.0))
        .sum()
}

/// `K(t, x; l_1, l_1(1/k)) = Σ |x_k| min(1, t/k)`.
pub fn k_discrete(t: f64, x: &Seq) -> f64 {
    (1..=x.len())
        .map(|k| x.get(k) * (t / k as f64).min(1.0))
        .sum()
}

/// Closed-form `K(t, f)` for the couples that have one.
pub fn k_closed(t: f64, f: &StepFunction, couple: &Couple) -> Result<f64> {
    check_range("t", t, t > 0.0, "(0, ∞)")?;
    couple.validate(f.domain())?;
    let (f, base, _) = couple.effective(f);
    match base {
        Couple::WeightedL1 { w0, w1 } => Ok(k_weighted_l1(t, &f, w0, w1)),
        Couple::L1Linf => Ok(k_l1_linf(t, &f)),
        _ => Err(Error::Unsupported(format!(
            "no closed-form K-functional for {couple:?}"
        ))),
    }
}

/// How `K` is computed on a fixed mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpSolver {
    /// Greedy allocation plus convex line search (any mesh size).
    Structured,
    /// Dense simplex on the epigraph formulation (small meshes only).
    Simplex,
}

/// Solver diagnostics attached to a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `max |g + h − f|` over cells, plus any negativity of `g` or `h`.
    pub primal_residual: f64,
    /// Witness value minus a certified lower bound for the mesh LP.
    pub gap: f64,
    pub cells: usize,
}

/// A split `f = g + h` with `0 ≤ g, h ≤ f` and its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub g: StepFunction,
    pub h: StepFunction,
    /// `‖g‖_{X₀} + t‖h‖_{X₁}` recomputed from the witness.
    pub value: f64,
    pub t: f64,
    pub certificate: Certificate,
}

/// Mesh refinement protocol for [`k_refined`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    /// Cells of the first mesh.
    pub mesh_n: usize,
    /// Relative duality gap accepted on each mesh.
    pub tol: f64,
    pub max_cells: usize,
    /// Stop when two successive meshes differ by less than this, relatively.
    pub refine_rel: f64,
    pub solver: LpSolver,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            mesh_n: 64,
            tol: 1e-12,
            max_cells: 1 << 13,
            refine_rel: 1e-4,
            solver: LpSolver::Structured,
        }
    }
}

/// Result of the refinement protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refined {
    pub decomposition: Decomposition,
    /// `(cells, value)` for every mesh solved.
    pub history: Vec<(usize, f64)>,
    pub rel_change: f64,
    pub converged: bool,
}

/// Geometric points `x₁·2^{-k}` toward 0 for the `Ces_∞` couples.
const GEOMETRIC_LEVELS: i32 = 40;

/// `f`'s mesh with the geometry points of every `t` in `ts` inserted.
fn base_mesh(ts: &[f64], f: &StepFunction, couple: &Couple) -> Result<(StepFunction, Couple)> {
    for &t in ts {
        check_range("t", t, t > 0.0 && t.is_finite(), "(0, ∞)")?;
    }
    couple.validate(f.domain())?;
    let (fe, base, mut pts) = couple.effective(f);
    for &t in ts {
        pts.extend(base.geometry(t, fe.right_end()));
    }
    let mut mesh = fe.refined_at(&pts);
    if base.is_prefix() {
        let x1 = mesh.breaks()[1];
        let geo: Vec<f64> = (1..=GEOMETRIC_LEVELS).map(|k| x1 * 0.5f64.powi(k)).collect();
        mesh = mesh.refined_at(&geo);
    }
    Ok((mesh, base.clone()))
}

/// `K(t, f)` as the exact minimum over step decompositions on `f`'s mesh,
/// refined so that it has at least `mesh_n` cells.
///
/// The value is an upper bound for the true K-functional.
pub fn k_variational(
    t: f64,
    f: &StepFunction,
    couple: &Couple,
    mesh_n: usize,
    tol: f64,
) -> Result<Decomposition> {
    k_variational_with(t, f, couple, mesh_n, tol, LpSolver::Structured)
}

pub fn k_variational_with(
    t: f64,
    f: &StepFunction,
    couple: &Couple,
    mesh_n: usize,
    tol: f64,
    solver: LpSolver,
) -> Result<Decomposition> {
    check_range("tol", tol, tol > 0.0, "(0, ∞)")?;
    let (mesh, base) = base_mesh(&[t], f, couple)?;
    let k = mesh_n.div_ceil(mesh.n_pieces()).max(1);
    solve_mesh(t, &mesh.subdivided(k), &base, tol, solver)
}

/// `K` at every `t` in `ts` on one common mesh, so that the values are the
/// minimum of a fixed family of affine functions of `t`.
pub fn k_variational_curve(
    ts: &[f64],
    f: &StepFunction,
    couple: &Couple,
    mesh_n: usize,
    tol: f64,
) -> Result<Vec<Decomposition>> {
    use rayon::prelude::*;
    check_range("tol", tol, tol > 0.0, "(0, ∞)")?;
    let (mesh, base) = base_mesh(ts, f, couple)?;
    let k = mesh_n.div_ceil(mesh.n_pieces()).max(1);
    let mesh = mesh.subdivided(k);
    ts.par_iter()
        .map(|&t| solve_mesh(t, &mesh, &base, tol, LpSolver::Structured))
        .collect()
}

/// Doubles the mesh until two successive values agree to `cfg.refine_rel`
/// or `cfg.max_cells` is reached (then `converged` is false).
pub fn k_refined(t: f64, f: &StepFunction, couple: &Couple, cfg: &LpConfig) -> Result<Refined> {
    check_range("tol", cfg.tol, cfg.tol > 0.0, "(0, ∞)")?;
    let (mesh, base) = base_mesh(&[t], f, couple)?;
    let n0 = mesh.n_pieces();
    let mut k = cfg.mesh_n.div_ceil(n0).max(1);
    let mut history = Vec::new();
    let mut prev: Option<Decomposition> = None;
    loop {
        let d = solve_mesh(t, &mesh.subdivided(k), &base, cfg.tol, cfg.solver)?;
        history.push((d.certificate.cells, d.value));
        if let Some(p) = &prev {
            let change = rel_change(p.value, d.value);
            if change < cfg.refine_rel {
                return Ok(Refined {
                    decomposition: d,
                    history,
                    rel_change: change,
                    converged: true,
                });
            }
        }
        if n0 * k * 2 > cfg.max_cells {
            let rel = prev.as_ref().map_or(f64::INFINITY, |p| rel_change(p.value, d.value));
            return Ok(Refined {
                decomposition: d,
                history,
                rel_change: rel,
                converged: false,
            });
        }
        prev = Some(d);
        k *= 2;
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn solve_mesh(
    t: f64,
    mesh: &StepFunction,
    base: &Couple,
    tol: f64,
    solver: LpSolver,
) -> Result<Decomposition> {
    let cells: Vec<(f64, f64, f64)> = mesh.cells().collect();
    let n = cells.len();
    let len: Vec<f64> = cells.iter().map(|c| c.1 - c.0).collect();
    let right: Vec<f64> = cells.iter().map(|c| c.1).collect();
    let big_m: Vec<f64> = cells.iter().map(|c| c.2 * (c.1 - c.0)).collect();
    let w0 = base.x0_weight();
    let c: Vec<f64> = cells.iter().map(|&(a, b, _)| w0.average(a, b)).collect();

    let (masses, lower) = match base {
        Couple::WeightedL1 { w1, .. } => {
            let d: Vec<f64> = cells.iter().map(|&(a, b, _)| w1.average(a, b)).collect();
            weighted_l1_lp(t, &c, &d, &big_m, solver)?
        }
        Couple::L1Linf => structured_or_simplex(t, &c, &big_m, Caps::Cell(&len), tol, solver)?,
        b if b.is_prefix() => {
            structured_or_simplex(t, &c, &big_m, Caps::Prefix(&right), tol, solver)?
        }
        other => {
            return Err(Error::Unsupported(format!(
                "no variational solver for {other:?}"
            )))
        }
    };

    let hv: Vec<f64> = (0..n)
        .map(|i| (masses[i] / len[i]).clamp(0.0, cells[i].2))
        .collect();
    let gv: Vec<f64> = (0..n).map(|i| (cells[i].2 - hv[i]).max(0.0)).collect();
    let residual = (0..n)
        .map(|i| (gv[i] + hv[i] - cells[i].2).abs())
        .fold(0.0, f64::max);
    let g = StepFunction::new(mesh.domain(), mesh.breaks().to_vec(), gv)?;
    let h = StepFunction::new(mesh.domain(), mesh.breaks().to_vec(), hv)?;
    let x1 = match base {
        Couple::WeightedL1 { w1, .. } => weighted_l1(&h, w1),
        Couple::L1Linf => h.max_value(),
        _ => ces_inf_norm(&h),
    };
    let x0 = weighted_l1(&g, &w0);
    let value = x0 + t * x1;
    if !value.is_finite() {
        return Err(Error::Divergent(format!(
            "K({t}) is infinite for this couple and function"
        )));
    }
    Ok(Decomposition {
        g,
        h,
        value,
        t,
        certificate: Certificate {
            primal_residual: residual,
            gap: (value - lower).max(0.0),
            cells: n,
        },
    })
}

/// Pointwise choice per cell; the simplex on small meshes.
fn weighted_l1_lp(
    t: f64,
    c: &[f64],
    d: &[f64],
    big_m: &[f64],
    solver: LpSolver,
) -> Result<(Vec<f64>, f64)> {
    let n = c.len();
    let mut m = vec![0.0; n];
    let mut free = Vec::new();
    for i in 0..n {
        if big_m[i] == 0.0 {
            continue;
        }
        match (c[i].is_finite(), d[i].is_finite()) {
            (true, true) => free.push(i),
            (false, true) => m[i] = big_m[i],
            (true, false) => {}
            (false, false) => {
                return Err(Error::Divergent("both weights are infinite on a cell".into()))
            }
        }
    }
    if solver == LpSolver::Simplex {
        let obj: Vec<f64> = free.iter().map(|&i| c[i] - t * d[i]).collect();
        let a: Vec<Vec<f64>> = (0..free.len())
            .map(|r| (0..free.len()).map(|j| if r == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let b: Vec<f64> = free.iter().map(|&i| big_m[i]).collect();
        let s = simplex::maximize(&obj, &a, &b)?;
        for (k, &i) in free.iter().enumerate() {
            m[i] = s.x[k];
        }
    } else {
        for &i in &free {
            if c[i] > t * d[i] {
                m[i] = big_m[i];
            }
        }
    }
    let lower = (0..n)
        .map(|i| {
            let keep = big_m[i] - m[i];
            let a = if keep > 0.0 { c[i] * keep } else { 0.0 };
            let b = if m[i] > 0.0 { t * d[i] * m[i] } else { 0.0 };
            a + b
        })
        .sum();
    Ok((m, lower))
}

fn structured_or_simplex(
    t: f64,
    c: &[f64],
    big_m: &[f64],
    caps: Caps,
    tol: f64,
    solver: LpSolver,
) -> Result<(Vec<f64>, f64)> {
    match solver {
        LpSolver::Structured => {
            let sol = Problem { c, big_m, caps }.solve(t, tol)?;
            Ok((sol.masses, sol.lower))
        }
        LpSolver::Simplex => {
            // variables mᵢ/Mᵢ and z; maximise Σcᵢmᵢ − t·z. Rows are scaled by
            // xⱼ (or lenⱼ) so that tiny cells near 0 keep O(1) coefficients.
            let n = c.len();
            let scale: Vec<f64> = big_m.iter().map(|&m| if m > 0.0 { m } else { 1.0 }).collect();
            let mut obj: Vec<f64> = (0..n).map(|i| c[i] * scale[i]).collect();
            obj.push(-t);
            let mut a = Vec::with_capacity(2 * n);
            let mut b = Vec::with_capacity(2 * n);
            for i in 0..n {
                let mut row = vec![0.0; n + 1];
                row[i] = 1.0;
                a.push(row);
                b.push(if big_m[i] > 0.0 { 1.0 } else { 0.0 });
            }
            for j in 0..n {
                let mut row = vec![0.0; n + 1];
                match caps {
                    Caps::Prefix(x) => {
                        for i in 0..=j {
                            row[i] = scale[i] / x[j];
                        }
                    }
                    Caps::Cell(len) => row[j] = scale[j] / len[j],
                }
                row[n] = -1.0;
                a.push(row);
                b.push(0.0);
            }
            let s = simplex::maximize(&obj, &a, &b)?;
            let (primal, _, _) = s.certificate(&obj, &a, &b);
            if primal > 1e-9 {
                return Err(Error::Solver(format!("simplex residual {primal:e}")));
            }
            let total: f64 = c.iter().zip(big_m).map(|(c, m)| c * m).sum();
            let m = (0..n).map(|i| s.x[i] * scale[i]).collect();
            Ok((m, total - s.objective))
        }
    }
}

/// The two-sided splitting estimate for `(Ces_1, Ces_∞)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitBounds {
    pub lower: f64,
    pub upper: f64,
    /// `‖fχ_{[0,τ₁]∪[τ₂,1]}‖_{Ces_1}`
    pub a: f64,
    /// `‖fχ_{[τ₁,τ₂]}‖_{Ces_∞}`, zero when the band is empty
    pub b: f64,
}

/// `((A + tB)/(2e²), A + tB)` for `0 < t < 1`.
pub fn split_bounds(t: f64, f: &StepFunction) -> Result<SplitBounds> {
    check_range("t", t, t > 0.0 && t < 1.0, "(0, 1)")?;
    if !f.domain().is_unit() {
        return Err(Error::DomainMismatch);
    }
    let tp = tau_pair(t)?;
    let (a, b) = match tp.band() {
        Some((t1, t2)) => {
            let outer = f.restricted_to_union(&[(0.0, t1), (t2, 1.0)]);
            let band = f.restricted(t1, t2);
            (weighted_l1(&outer, &Weight::LogInv), ces_inf_norm(&band))
        }
        None => (weighted_l1(f, &Weight::LogInv), 0.0),
    };
    let upper = a + t * b;
    Ok(SplitBounds {
        lower: upper / (2.0 * std::f64::consts::E.powi(2)),
        upper,
        a,
        b,
    })
}

/// `(v/3, v)` with `v = ‖fχ_{[0,τ₁(t)]}‖_{Ces_1}` for non-increasing `f`.
pub fn decreasing_bounds(t: f64, f: &StepFunction) -> Result<(f64, f64)> {
    check_range("t", t, t > 0.0 && t < 1.0, "(0, 1)")?;
    if !f.domain().is_unit() {
        return Err(Error::DomainMismatch);
    }
    if !f.is_nonincreasing() {
        return Err(Error::InvalidFunction("f must be non-increasing".into()));
    }
    let v = weighted_l1(&f.restricted(0.0, tau_pair(t)?.tau1), &Weight::LogInv);
    Ok((v / 3.0, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> StepFunction {
        StepFunction::constant(Domain::UnitInterval, 1.0).unwrap()
    }

    fn ces() -> Couple {
        Couple::Ces1CesInfUnit
    }

    #[test]
    fn closed_forms() {
        let k = k_weighted_l1(0.5, &one(), &Weight::One, &Weight::InvT);
        assert!((k - (0.5 + 0.5 * 2f64.ln())).abs() < 1e-15);
        assert_eq!(k_weighted_l1(2.0, &one(), &Weight::One, &Weight::InvT), 1.0);
        let k = k_weighted_l1(0.3, &one(), &Weight::LogE, &Weight::LogE);
        assert!((k - 0.6).abs() < 1e-15);

        assert!((k_l1_linf(0.3, &one()) - 0.3).abs() < 1e-15);
        let f = StepFunction::unit(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], vec![1.0, 3.0, 2.0]).unwrap();
        assert!((k_l1_linf(0.5, &f) - 4.0 / 3.0).abs() < 1e-15);
        assert!((k_l1_linf(7.0, &f) - 2.0).abs() < 1e-15);

        let e1 = Seq::unit_vector(1);
        assert_eq!(k_discrete(0.5, &e1), 0.5);
        assert_eq!(k_discrete(2.0, &e1), 1.0);
        let x = Seq::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(k_discrete(1.5, &x), 1.75);
    }

    #[test]
    fn lp_matches_weighted_closed_form() {
        let c = Couple::WeightedL1 {
            w0: Weight::One,
            w1: Weight::InvT,
        };
        for solver in [LpSolver::Structured, LpSolver::Simplex] {
            let d = k_variational_with(0.5, &one(), &c, 16, 1e-12, solver).unwrap();
            assert!((d.value - 0.846_573_590_279_972_6).abs() < 1e-12, "{}", d.value);
        }
    }

    #[test]
    fn split_bounds_example() {
        let b = split_bounds(0.5, &one()).unwrap();
        assert!((b.a - 0.745_709_993_663_085).abs() < 1e-13, "{}", b.a);
        assert!((b.b - 0.513_119_329_013_419).abs() < 1e-13, "{}", b.b);
        assert!((b.lower - 0.067_821_224_033_936).abs() < 1e-13);
        assert!((b.upper - 1.002_269_658_169_794).abs() < 1e-13);
        let z = StepFunction::zero(Domain::UnitInterval);
        let b = split_bounds(0.5, &z).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert!(split_bounds(1.0, &one()).is_err());
    }

    #[test]
    fn ces_lp_respects_bounds_and_beyond_one() {
        let d = k_variational(0.5, &one(), &ces(), 256, 1e-12).unwrap();
        let b = split_bounds(0.5, &one()).unwrap();
        assert!(d.value >= b.lower && d.value <= b.upper + 1e-12);
        assert!(d.value <= 0.5 + 1e-12);
        let f = StepFunction::unit(vec![0.0, 0.2, 0.7, 1.0], vec![5.0, 0.1, 2.0]).unwrap();
        let d = k_variational(1.5, &f, &ces(), 64, 1e-12).unwrap();
        let x0 = ces().x0_norm(&f).unwrap();
        assert!((d.value - x0).abs() < 1e-12 * x0);
    }

    #[test]
    fn structured_matches_simplex_on_small_meshes() {
        let f = StepFunction::unit(vec![0.0, 0.1, 0.4, 0.5, 1.0], vec![2.0, 0.3, 4.0, 1.0]).unwrap();
        let couples = [
            ces(),
            Couple::L1wCesInf {
                w0: Weight::OneMinusT,
            },
            Couple::L1Linf,
            Couple::L1wCesInf {
                w0: Weight::Step(
                    StepFunction::unit(vec![0.0, 0.3, 1.0], vec![0.5, 2.0]).unwrap(),
                ),
            },
        ];
        for c in &couples {
            for t in [0.01, 0.2, 0.7] {
                let a = k_variational_with(t, &f, c, 8, 1e-12, LpSolver::Structured).unwrap();
                let b = k_variational_with(t, &f, c, 8, 1e-12, LpSolver::Simplex).unwrap();
                assert!(
                    (a.value - b.value).abs() <= 1e-9 * a.value,
                    "{c:?} t={t}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn decreasing_bounds_example() {
        let t = 0.5;
        let a = crate::funcore::tau1(t);
        let (lo, hi) = decreasing_bounds(t, &one()).unwrap();
        assert!((hi - a * (1.0 - a.ln())).abs() < 1e-14);
        assert!((lo - hi / 3.0).abs() < 1e-15);
        let up = StepFunction::unit(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(decreasing_bounds(t, &up).is_err());
    }

    #[test]
    fn restricted_couple_uses_support() {
        let c = Couple::restricted(Couple::L1wCesInf { w0: Weight::OneMinusT }, 0.5, 1.0);
        let d = k_variational(0.3, &one(), &c, 64, 1e-12).unwrap();
        let h = one().restricted(0.5, 1.0);
        let g = k_weighted_l1(0.3, &h, &Weight::OneMinusT, &Weight::One);
        assert!(d.value >= g - 1e-12 && d.value <= 2.0 * g + 1e-12);
    }
}
