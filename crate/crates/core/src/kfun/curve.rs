use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{k_closed, k_discrete, k_variational_curve, Couple};
use crate::error::{check_range, Error, Result};
use crate::funcore::{rearrange, Seq, StepFunction};
use crate::norms::Weight;

/// Log-spaced sampling range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t_min: 1e-4,
            t_max: 10.0,
            per_decade: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    /// Common mesh of at least `mesh_n` cells for every grid point.
    Lp { mesh_n: usize, tol: f64 },
}

/// Behaviour of `K` below the first grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Head {
    /// `K(t) = t·(a + b·ln(t_min/t))` for `t ≤ t_min`, exactly.
    LogLinear { t_min: f64, a: f64, b: f64 },
    /// `slope_lo ≤ K(t)/t ≤ slope_hi` for `t ≤ t_min` (`K/t` is non-increasing).
    Bracketed {
        t_min: f64,
        slope_lo: f64,
        slope_hi: f64,
    },
}

/// Behaviour of `K` above the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tail {
    /// `K(t) = value` for `t ≥ t`.
    ConstantBeyond { t: f64, value: f64 },
    /// `lower ≤ K(t) ≤ upper` for `t ≥ t`.
    Bracketed { t: f64, lower: f64, upper: f64 },
}

/// Samples of `t ↦ K(t, f)` with descriptors of both ends.
///
/// The grid is uniform in `ln t` between knots (points where `K` may bend),
/// and every knot sits at an even index, so composite Simpson applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KCurve {
    pub couple: Couple,
    pub label: String,
    pub tgrid: Vec<f64>,
    pub kvals: Vec<f64>,
    pub head: Head,
    pub tail: Tail,
    pub method: Method,
    pub x0_norm: f64,
    pub x1_norm: f64,
}

impl KCurve {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `α·K` for `α > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<KCurve> {
        check_range("alpha", alpha, alpha > 0.0 && alpha.is_finite(), "(0, ∞)")?;
        let mut c = self.clone();
        c.kvals.iter_mut().for_each(|k| *k *= alpha);
        c.x0_norm *= alpha;
        c.x1_norm *= alpha;
        c.head = match c.head {
            Head::LogLinear { t_min, a, b } => Head::LogLinear {
                t_min,
                a: a * alpha,
                b: b * alpha,
            },
            Head::Bracketed {
                t_min,
                slope_lo,
                slope_hi,
            } => Head::Bracketed {
                t_min,
                slope_lo: slope_lo * alpha,
                slope_hi: slope_hi * alpha,
            },
        };
        c.tail = match c.tail {
            Tail::ConstantBeyond { t, value } => Tail::ConstantBeyond {
                t,
                value: value * alpha,
            },
            Tail::Bracketed { t, lower, upper } => Tail::Bracketed {
                t,
                lower: lower * alpha,
                upper: upper * alpha,
            },
        };
        Ok(c)
    }

    /// Relative tolerance used when checking the curve's invariants.
    fn slack(&self) -> f64 {
        match self.method {
            Method::ClosedForm => 1e-12,
            Method::Lp { tol, .. } => (10.0 * tol).max(1e-12),
        }
    }

    /// `K ≥ 0`, non-decreasing, `K/t` non-increasing and
    /// `K ≤ min(‖f‖_{X₀}, t‖f‖_{X₁})`, up to the method's tolerance.
    pub fn validate(&self) -> Result<()> {
        let n = self.tgrid.len();
        if n < 3 || self.kvals.len() != n {
            return Err(Error::Invariant("a K-curve needs at least three samples".into()));
        }
        let kmax = self.kvals.iter().fold(0.0f64, |m, &k| m.max(k));
        let eps = self.slack() * kmax.max(f64::MIN_POSITIVE);
        let bad = |what: &str, i: usize| {
            Err(Error::Invariant(format!(
                "{what} at t = {:e} (K = {:e})",
                self.tgrid[i], self.kvals[i]
            )))
        };
        for i in 0..n {
            let (t, k) = (self.tgrid[i], self.kvals[i]);
            if !(k >= -eps) || !k.is_finite() {
                return bad("K negative or not finite", i);
            }
            if k > self.x0_norm + eps || k > t * self.x1_norm * (1.0 + self.slack()) + eps {
                return bad("K above min(‖f‖₀, t‖f‖₁)", i);
            }
            if i > 0 {
                let (tp, kp) = (self.tgrid[i - 1], self.kvals[i - 1]);
                if k < kp - eps {
                    return bad("K decreasing", i);
                }
                if k / t > kp / tp * (1.0 + self.slack()) + eps / t {
                    return bad("K/t increasing", i);
                }
            }
        }
        if let Tail::ConstantBeyond { value, .. } = self.tail {
            if (self.kvals[n - 1] - value).abs() > eps {
                return bad("K does not reach its constant tail", n - 1);
            }
        }
        Ok(())
    }
}

/// Log grid from `lo` to `hi` with every knot at an even index.
pub(crate) fn log_grid(lo: f64, hi: f64, knots: &[f64], per_decade: usize) -> Vec<f64> {
    let mut ks: Vec<f64> = knots
        .iter()
        .copied()
        .filter(|&k| k > lo && k < hi)
        .collect();
    ks.push(lo);
    ks.push(hi);
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a / *b - 1.0).abs() < 1e-9);
    *ks.last_mut().unwrap() = hi;
    let mut out = vec![ks[0]];
    for w in ks.windows(2) {
        let (a, b) = (w[0].ln(), w[1].ln());
        let decades = (b - a) / std::f64::consts::LN_10;
        let half = ((decades * per_decade as f64) / 2.0).ceil().max(1.0) as usize;
        let m = 2 * half;
        for j in 1..m {
            out.push((a + (b - a) * j as f64 / m as f64).exp());
        }
        out.push(w[1]);
    }
    out
}

/// Samples `K(·, f)` on the grid and attaches head and tail descriptors.
pub fn build_kcurve(
    f: &StepFunction,
    couple: &Couple,
    grid: &GridSpec,
    method: Method,
) -> Result<KCurve> {
    check_range("t_min", grid.t_min, grid.t_min > 0.0, "(0, ∞)")?;
    check_range("t_max", grid.t_max, grid.t_max > grid.t_min, "(t_min, ∞)")?;
    check_range(
        "per_decade",
        grid.per_decade as f64,
        grid.per_decade >= 1,
        "[1, ∞)",
    )?;
    couple.validate(f.domain())?;
    match method {
        Method::ClosedForm if !couple.has_closed_form() => {
            return Err(Error::Unsupported(format!(
                "{couple:?} has no closed-form K-functional"
            )))
        }
        Method::Lp { mesh_n, tol } => {
            check_range("mesh_n", mesh_n as f64, mesh_n >= 1, "[1, ∞)")?;
            check_range("tol", tol, tol > 0.0, "(0, ∞)")?;
        }
        _ => {}
    }
    let x0 = couple.x0_norm(f)?;
    let x1 = couple.x1_norm(f)?;
    let (fe, base, _) = couple.effective(f);

    let tc = couple.constant_beyond(f);
    let hi = match tc {
        Some(tc) if tc <= grid.t_max => tc,
        _ => grid.t_max,
    };
    let mut lo = grid.t_min.min(hi / 10.0);
    let mut knots = vec![1.0];
    let mut log_linear: Option<(f64, f64)> = None; // (b, known a) for the head
    match base {
        Couple::WeightedL1 {
            w0: Weight::One,
            w1: Weight::InvT,
        } => {
            lo = lo.min(fe.breaks()[1]);
            knots.extend(fe.breaks());
            log_linear = Some((fe.vals()[0], f64::NAN));
        }
        Couple::L1Linf => {
            let r = rearrange(&fe);
            lo = lo.min(r.breaks()[1]);
            knots.extend(r.breaks());
            log_linear = Some((0.0, r.vals()[0]));
        }
        _ => {}
    }
    let tgrid = log_grid(lo, hi, &knots, grid.per_decade);
    let kvals: Vec<f64> = match method {
        Method::ClosedForm => tgrid
            .par_iter()
            .map(|&t| k_closed(t, f, couple))
            .collect::<Result<_>>()?,
        Method::Lp { mesh_n, tol } => k_variational_curve(&tgrid, f, couple, mesh_n, tol)?
            .into_iter()
            .map(|d| d.value)
            .collect(),
    };
    let head = match log_linear {
        Some((b, a)) => Head::LogLinear {
            t_min: lo,
            a: if a.is_nan() { kvals[0] / lo } else { a },
            b,
        },
        None => Head::Bracketed {
            t_min: lo,
            slope_lo: kvals[0] / lo,
            slope_hi: x1,
        },
    };
    let last = *kvals.last().unwrap();
    let tail = if tc.is_some_and(|tc| tc <= grid.t_max) {
        Tail::ConstantBeyond { t: hi, value: x0 }
    } else {
        Tail::Bracketed {
            t: hi,
            lower: last,
            upper: x0,
        }
    };
    let kc = KCurve {
        couple: couple.clone(),
        label: String::new(),
        tgrid,
        kvals,
        head,
        tail,
        method,
        x0_norm: x0,
        x1_norm: x1,
    };
    kc.validate()?;
    Ok(kc)
}

/// `K(·, x; l_1, l_1(1/k))` for a finitely supported sequence.
pub fn build_kcurve_discrete(x: &Seq, grid: &GridSpec) -> Result<KCurve> {
    check_range("t_min", grid.t_min, grid.t_min > 0.0, "(0, ∞)")?;
    check_range("t_max", grid.t_max, grid.t_max > grid.t_min, "(t_min, ∞)")?;
    let n = x.len().max(1) as f64;
    let x0 = x.sum();
    let x1: f64 = (1..=x.len()).map(|k| x.get(k) / k as f64).sum();
    let hi = if n <= grid.t_max { n.max(2.0) } else { grid.t_max };
    let lo = grid.t_min.min(1.0).min(hi / 10.0);
    let knots: Vec<f64> = (1..=x.len()).map(|k| k as f64).collect();
    let tgrid = log_grid(lo, hi, &knots, grid.per_decade.max(1));
    let kvals: Vec<f64> = tgrid.iter().map(|&t| k_discrete(t, x)).collect();
    let tail = if n <= grid.t_max {
        Tail::ConstantBeyond { t: hi, value: x0 }
    } else {
        Tail::Bracketed {
            t: hi,
            lower: *kvals.last().unwrap(),
            upper: x0,
        }
    };
    let kc = KCurve {
        couple: Couple::DiscreteL1L1InvK,
        label: String::new(),
        tgrid,
        kvals,
        head: Head::LogLinear {
            t_min: lo,
            a: x1,
            b: 0.0,
        },
        tail,
        method: Method::ClosedForm,
        x0_norm: x0,
        x1_norm: x1,
    };
    kc.validate()?;
    Ok(kc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcore::Domain;

    #[test]
    fn grid_keeps_knots_at_even_indices() {
        let g = log_grid(1e-3, 10.0, &[0.5, 1.0, 2.0], 7);
        for k in [0.5, 1.0, 2.0] {
            let i = g.iter().position(|&t| t == k).unwrap();
            assert_eq!(i % 2, 0);
        }
        assert_eq!(g.len() % 2, 1);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn weighted_curve_closed_form() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        let c = Couple::WeightedL1 {
            w0: Weight::One,
            w1: Weight::InvT,
        };
        let grid = GridSpec {
            t_min: 1e-3,
            t_max: 10.0,
            per_decade: 20,
        };
        let kc = build_kcurve(&f, &c, &grid, Method::ClosedForm).unwrap();
        for (&t, &k) in kc.tgrid.iter().zip(&kc.kvals) {
            let want = if t < 1.0 { t - t * t.ln() } else { 1.0 };
            assert!((k - want).abs() < 1e-14, "{t}");
        }
        assert_eq!(kc.tail, Tail::ConstantBeyond { t: 1.0, value: 1.0 });
        assert!(build_kcurve(&f, &Couple::Ces1CesInfUnit, &grid, Method::ClosedForm).is_err());
    }

    #[test]
    fn discrete_unit_vector_curve() {
        let kc = build_kcurve_discrete(&Seq::unit_vector(1), &GridSpec::default()).unwrap();
        for (&t, &k) in kc.tgrid.iter().zip(&kc.kvals) {
            assert!((k - t.min(1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn ces_curve_sits_inside_split_bounds() {
        let f = StepFunction::unit(vec![0.0, 0.05, 0.3, 1.0], vec![4.0, 0.5, 1.0]).unwrap();
        let grid = GridSpec {
            t_min: 1e-3,
            t_max: 10.0,
            per_decade: 5,
        };
        let kc = build_kcurve(
            &f,
            &Couple::Ces1CesInfUnit,
            &grid,
            Method::Lp {
                mesh_n: 256,
                tol: 1e-12,
            },
        )
        .unwrap();
        assert!(matches!(kc.tail, Tail::ConstantBeyond { t, .. } if t == 1.0));
        for (&t, &k) in kc.tgrid.iter().zip(&kc.kvals) {
            if t < 1.0 {
                let b = super::super::split_bounds(t, &f).unwrap();
                assert!(k >= b.lower && k <= b.upper * (1.0 + 1e-12), "{t}: {k} {b:?}");
            }
        }
    }
}
