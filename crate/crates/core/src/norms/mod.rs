//! Weighted Lebesgue, Cesàro and Copson norms (continuous and discrete), and
//! the Muckenhoupt `A_p` expression.

mod quad;
mod weight;

pub use quad::{QuadConfig, Quadrature, Singular};
pub use weight::Weight;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::funcore::{Domain, Seq, StepFunction};
use crate::operators::{cesaro, copson, discrete_cesaro, discrete_copson, maximal, PiecewiseSmooth};

fn check_p(p: f64) -> Result<()> {
    check_range("p", p, p >= 1.0, "[1, ∞]")
}

/// `(∫ |g|^p w)^{1/p}`, or `ess sup |g|` for `p = ∞`.
///
/// Half-line tails of the form `β/x` beyond the mesh are added in closed form
/// for `w ∈ {1, 1/t}`.
pub fn lp_weighted(g: &PiecewiseSmooth, p: f64, w: &Weight, q: &QuadConfig) -> Result<f64> {
    let quad = Quadrature::new(q)?;
    lp_weighted_with(&quad, g, p, w)
}

pub fn lp_weighted_with(quad: &Quadrature, g: &PiecewiseSmooth, p: f64, w: &Weight) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(g.sup_abs());
    }
    let mut total = 0.0;
    for (l, r, piece) in g.segments() {
        let mut cuts = vec![l];
        cuts.extend(w.breaks().iter().copied().filter(|&x| x > l && x < r));
        cuts.push(r);
        let integrand = |x: f64| {
            let v = piece.eval(x).abs();
            if v == 0.0 {
                0.0
            } else {
                v.powf(p) * w.eval(x)
            }
        };
        for c in cuts.windows(2) {
            if c[0] == 0.0 {
                total += quad.integrate(0.0, c[1], Singular::Left, integrand);
                continue;
            }
            // 1/x and ln x terms vary on the scale of x: panels of ratio 2
            let mut a = c[0];
            while a < c[1] {
                let b = (2.0 * a).min(c[1]);
                total += quad.legendre(a, b, integrand);
                a = b;
            }
        }
    }
    if let Some(t) = g.tail() {
        total += tail_power_integral(t, g.right_end(), p, w)?;
    }
    Ok(total.powf(1.0 / p))
}

fn tail_power_integral(t: &crate::operators::Piece, from: f64, p: f64, w: &Weight) -> Result<f64> {
    if t.alpha == 0.0 && t.beta == 0.0 && t.gamma == 0.0 {
        return Ok(0.0);
    }
    if t.alpha != 0.0 || t.gamma != 0.0 {
        return Err(Error::Unsupported(
            "closed-form tails are only available for β/x".into(),
        ));
    }
    let b = t.beta.abs().powf(p);
    match w {
        Weight::One if p > 1.0 => Ok(b * from.powf(1.0 - p) / (p - 1.0)),
        Weight::One => Err(Error::Divergent(
            "∫ (β/x) dx over an infinite tail".into(),
        )),
        Weight::InvT => Ok(b * from.powf(-p) / p),
        Weight::Step(s) if s.right_end() <= from => Ok(0.0),
        _ => Err(Error::Unsupported(format!(
            "half-line tail with weight {w:?}"
        ))),
    }
}

/// `∫ f·w` for a step function (closed-form cell weights).
pub fn weighted_l1(f: &StepFunction, w: &Weight) -> f64 {
    let mut cuts: Vec<f64> = f.breaks().to_vec();
    cuts.extend(w.breaks().iter().copied());
    let g = f.refined_at(&cuts);
    g.cells()
        .filter(|c| c.2 > 0.0)
        .map(|(a, b, v)| v * w.integral(a, b))
        .sum()
}

/// `‖f‖_{Ces_∞} = sup_x (1/x)∫₀ˣ f`, attained at a breakpoint.
pub fn ces_inf_norm(f: &StepFunction) -> f64 {
    f.primitive_at_breaks()
        .iter()
        .zip(f.breaks())
        .skip(1)
        .map(|(fx, x)| fx / x)
        .fold(0.0, f64::max)
}

/// `‖Cf‖_{L_p}`.
///
/// `p = 1` on `[0, 1]` is `∫ f ln(1/t)` in closed form; `p = ∞` is a maximum
/// over breakpoints.
pub fn ces_norm(f: &StepFunction, p: f64, q: &QuadConfig) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(ces_inf_norm(f));
    }
    if p == 1.0 {
        return match f.domain() {
            Domain::UnitInterval => Ok(weighted_l1(f, &Weight::LogInv)),
            Domain::HalfLine { .. } if f.is_zero() => Ok(0.0),
            Domain::HalfLine { .. } => Err(Error::Divergent(
                "Ces_1 on the half-line only contains 0".into(),
            )),
        };
    }
    lp_weighted(&cesaro(f), p, &Weight::One, q)
}

/// `‖C*f‖_{L_p}`, `1 ≤ p < ∞`.
pub fn cop_norm(f: &StepFunction, p: f64, q: &QuadConfig) -> Result<f64> {
    check_range("p", p, p >= 1.0 && p.is_finite(), "[1, ∞)")?;
    lp_weighted(&copson(f), p, &Weight::One, q)
}

/// `(∫₀¹ (Cf)^p ln(e/x) dx)^{1/p}` on the unit interval.
pub fn ces_log_norm(f: &StepFunction, p: f64, q: &QuadConfig) -> Result<f64> {
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    if !f.domain().is_unit() {
        return Err(Error::Unsupported(
            "the ln(e/x)-weighted Cesàro norm is defined on [0, 1]".into(),
        ));
    }
    lp_weighted(&cesaro(f), p, &Weight::LogE, q)
}

/// Weights for discrete `l_p` norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeqWeight {
    One,
    /// `1/k`
    InvK,
}

/// Sequence spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeqSpace {
    Lp { p: f64, weight: SeqWeight },
    Ces { p: f64 },
    Cop { p: f64 },
    CesInf,
}

/// Norm of a finitely supported sequence.
///
/// `ces_p` sums `(C_d x)(n)^p` explicitly up to `max(m, N)` and encloses the
/// remainder `Σ_{n>M} (S/n)^p` between its integral bounds; `M` grows until
/// the enclosure is narrower than `rel_tol` times the value.
pub fn seq_norm(x: &Seq, space: SeqSpace, m: usize, rel_tol: f64) -> Result<f64> {
    let n = x.len();
    match space {
        SeqSpace::Lp { p, weight } => {
            check_p(p)?;
            let w = |k: usize| match weight {
                SeqWeight::One => 1.0,
                SeqWeight::InvK => 1.0 / k as f64,
            };
            if p.is_infinite() {
                return Ok((1..=n).map(|k| x.get(k) * w(k)).fold(0.0, f64::max));
            }
            let s: f64 = (1..=n).map(|k| x.get(k).powf(p) * w(k)).sum();
            Ok(s.powf(1.0 / p))
        }
        SeqSpace::Cop { p } => {
            check_range("p", p, p >= 1.0 && p.is_finite(), "[1, ∞)")?;
            let c = discrete_copson(x, n)?;
            Ok(c.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
        }
        SeqSpace::CesInf => Ok(discrete_cesaro(x, n)?.into_iter().fold(0.0, f64::max)),
        SeqSpace::Ces { p } => {
            check_p(p)?;
            if p.is_infinite() {
                return seq_norm(x, SeqSpace::CesInf, m, rel_tol);
            }
            let total = x.sum();
            if total == 0.0 {
                return Ok(0.0);
            }
            if p == 1.0 {
                return Err(Error::Divergent("ces_1 only contains 0".into()));
            }
            let head: f64 = discrete_cesaro(x, n)?.iter().map(|v| v.powf(p)).sum();
            let sp = total.powf(p);
            let mut upto = n;
            let mut mid_sum = 0.0; // Σ_{n<k≤upto} k^{-p}
            let mut target = m.max(n);
            loop {
                for k in (upto + 1)..=target {
                    mid_sum += (k as f64).powf(-p);
                }
                upto = target;
                let mf = upto as f64;
                let lo = (mf + 1.0).powf(1.0 - p) / (p - 1.0);
                let hi = mf.powf(1.0 - p) / (p - 1.0);
                let base = head + sp * mid_sum;
                let vlo = (base + sp * lo).powf(1.0 / p);
                let vhi = (base + sp * hi).powf(1.0 / p);
                let mid = 0.5 * (vlo + vhi);
                if vhi - vlo <= rel_tol * mid {
                    return Ok(mid);
                }
                if upto >= 1 << 28 {
                    return Err(Error::Truncation {
                        width: (vhi - vlo) / mid,
                        tol: rel_tol,
                    });
                }
                target = upto * 4;
            }
        }
    }
}

/// Largest value of `(avg_I w)·(avg_I w^{−1/(p−1)})^{p−1}` over intervals `I`
/// with endpoints on an equispaced grid of `grid_n + 1` points plus geometric
/// points `2^{-k}/grid_n` near 0.
///
/// This is a lower bound for the `A_p` constant of `w` on `[0, 1]`.
pub fn ap_constant(w: &Weight, p: f64, grid_n: usize, q: &QuadConfig) -> Result<f64> {
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    check_range("grid_n", grid_n as f64, grid_n >= 1, "[1, ∞)")?;
    if let Weight::Step(s) = w {
        if s.vals().iter().any(|&v| v <= 0.0) {
            return Err(Error::OutOfRange {
                name: "w",
                value: 0.0,
                expected: "a positive weight",
            });
        }
        if !s.domain().is_unit() {
            return Err(Error::DomainMismatch);
        }
    }
    let quad = Quadrature::new(q)?;
    let alpha = 1.0 / (p - 1.0);
    let dual = |x: f64| w.eval(x).powf(-alpha);
    let mut pts: Vec<f64> = (0..=grid_n).map(|i| i as f64 / grid_n as f64).collect();
    let extra = q.refine_levels + (grid_n as f64).log2().ceil() as usize;
    pts.extend((1..=extra).map(|k| 0.5f64.powi(k as i32) / grid_n as f64));
    pts.extend(w.breaks().iter().copied());
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut prim_w = Vec::with_capacity(pts.len());
    let mut prim_d = Vec::with_capacity(pts.len());
    let (mut acc_w, mut acc_d) = (0.0, 0.0);
    prim_w.push(0.0);
    prim_d.push(0.0);
    for c in pts.windows(2) {
        acc_w += w.integral(c[0], c[1]);
        let sing = if c[0] == 0.0 && w.singular_at_zero() {
            Singular::Left
        } else {
            Singular::None
        };
        acc_d += quad.integrate(c[0], c[1], sing, dual);
        prim_w.push(acc_w);
        prim_d.push(acc_d);
    }
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let len = pts[j] - pts[i];
            let aw = (prim_w[j] - prim_w[i]) / len;
            let ad = (prim_d[j] - prim_d[i]) / len;
            best = best.max(aw * ad.powf(p - 1.0));
        }
    }
    Ok(best)
}

/// `‖Mf‖_{L_p(w)} / ‖f‖_{L_p(w)}` on `[0, 1]`, `Mf` evaluated at Gauss nodes.
pub fn maximal_ratio(f: &StepFunction, p: f64, w: &Weight, q: &QuadConfig) -> Result<f64> {
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    if !f.domain().is_unit() {
        return Err(Error::Unsupported("maximal ratio is computed on [0, 1]".into()));
    }
    let quad = Quadrature::new(q)?;
    let mut num = 0.0;
    let mut err = None;
    for (a, b, _) in f.cells() {
        let sing = if a == 0.0 { Singular::Left } else { Singular::None };
        num += quad.integrate(a, b, sing, |x| match maximal(f, x) {
            Ok(m) => m.powf(p) * w.eval(x),
            Err(e) => {
                err = Some(e);
                0.0
            }
        });
    }
    if let Some(e) = err {
        return Err(e);
    }
    let den = lp_weighted_with(&quad, &PiecewiseSmooth::from(f), p, w)?;
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(num.powf(1.0 / p) / den)
}
