//! Real-interpolation norms `‖f‖_{θ,p}` and `‖f‖_{θ,∞}` from sampled
//! K-curves, with closed-form or bracketed contributions beyond the grid.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::funcore::{Domain, StepFunction};
use crate::kfun::{Head, KCurve, Tail};
use crate::norms::{lp_weighted, QuadConfig, Quadrature, Weight};
use crate::operators::{cesaro, copson};

/// Parameters of the K-method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpParams {
    pub theta: f64,
    pub p: f64,
}

impl InterpParams {
    /// `θ ∈ (0, 1)` for finite `p`, `θ ∈ [0, 1]` for `p = ∞`.
    pub fn new(theta: f64, p: f64) -> Result<Self> {
        check_range("p", p, p >= 1.0, "[1, ∞]")?;
        if p.is_finite() {
            check_range("theta", theta, theta > 0.0 && theta < 1.0, "(0, 1)")?;
        } else {
            check_range("theta", theta, (0.0..=1.0).contains(&theta), "[0, 1]")?;
        }
        Ok(InterpParams { theta, p })
    }

    /// `θ = 1 − 1/p`.
    pub fn dual_index(p: f64) -> Result<Self> {
        Self::new(1.0 - 1.0 / p, p)
    }
}

/// Two-sided enclosure of a norm plus a quadrature error indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    /// `|Simpson − trapezoid|` on the sampled range, relative to the value.
    pub quad_err: f64,
}

impl Enclosure {
    pub fn rel_width(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            (self.hi - self.lo) / self.value
        }
    }
}

/// `(∫₀^∞ (t^{−θ}K(t))^p dt/t)^{1/p}` as an enclosure.
pub fn theta_p_enclosure(kc: &KCurve, theta: f64, p: f64, q: &QuadConfig) -> Result<Enclosure> {
    let prm = InterpParams::new(theta, p)?;
    if p.is_infinite() {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            expected: "[1, ∞)",
        });
    }
    kc.validate()?;
    let quad = Quadrature::new(q)?;
    let (theta, p) = (prm.theta, prm.p);
    let g: Vec<f64> = kc
        .tgrid
        .iter()
        .zip(&kc.kvals)
        .map(|(&t, &k)| (t.powf(-theta) * k).powf(p))
        .collect();
    let u: Vec<f64> = kc.tgrid.iter().map(|t| t.ln()).collect();
    let (mut simpson, mut trap) = (0.0, 0.0);
    let mut i = 0;
    while i + 2 < u.len() {
        let h = u[i + 2] - u[i];
        simpson += h / 6.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
        trap += 0.5 * (u[i + 1] - u[i]) * (g[i] + g[i + 1])
            + 0.5 * (u[i + 2] - u[i + 1]) * (g[i + 1] + g[i + 2]);
        i += 2;
    }
    if i != u.len() - 1 {
        return Err(Error::Invariant("grid must have an even number of intervals".into()));
    }

    let alpha = (1.0 - theta) * p;
    let (head_lo, head_hi) = match kc.head {
        Head::LogLinear { t_min, a, b } => {
            let v = t_min.powf(alpha) / alpha * quad.laguerre(|w| (a + b * w / alpha).powf(p));
            (v, v)
        }
        Head::Bracketed {
            t_min,
            slope_lo,
            slope_hi,
        } => {
            let c = t_min.powf(alpha) / alpha;
            (c * slope_lo.powf(p), c * slope_hi.powf(p))
        }
    };
    let tail_factor = |t: f64| t.powf(-theta * p) / (theta * p);
    let (tail_lo, tail_hi) = match kc.tail {
        Tail::ConstantBeyond { t, value } => {
            let v = value.powf(p) * tail_factor(t);
            (v, v)
        }
        Tail::Bracketed { t, lower, upper } => {
            (lower.powf(p) * tail_factor(t), upper.powf(p) * tail_factor(t))
        }
    };
    let lo = (simpson + head_lo + tail_lo).powf(1.0 / p);
    let hi = (simpson + head_hi + tail_hi).powf(1.0 / p);
    let value = 0.5 * (lo + hi);
    let body = simpson.max(f64::MIN_POSITIVE);
    Ok(Enclosure {
        lo,
        hi,
        value,
        quad_err: (simpson - trap).abs() / body,
    })
}

/// Midpoint of [`theta_p_enclosure`], failing when the enclosure is wider
/// than `q.rel_tol`.
pub fn theta_p_norm(kc: &KCurve, theta: f64, p: f64, q: &QuadConfig) -> Result<f64> {
    let e = theta_p_enclosure(kc, theta, p, q)?;
    let w = e.rel_width();
    if !(w <= q.rel_tol) {
        return Err(Error::Truncation {
            width: w,
            tol: q.rel_tol,
        });
    }
    Ok(e.value)
}

/// `sup_t t^{−θ}K(t)`: `lo` is attained on the grid or by the exact head,
/// `hi` also covers bracketed ends.
pub fn theta_inf_enclosure(kc: &KCurve, theta: f64) -> Result<Enclosure> {
    InterpParams::new(theta, f64::INFINITY)?;
    kc.validate()?;
    let mut lo = kc
        .tgrid
        .iter()
        .zip(&kc.kvals)
        .map(|(&t, &k)| t.powf(-theta) * k)
        .fold(0.0, f64::max);
    let mut hi = lo;
    let r = 1.0 - theta;
    match kc.head {
        Head::LogLinear { t_min, a, b } => {
            // t^{1−θ}(a + b ln(t_min/t)) with v = ln(t_min/t) ≥ 0
            let s = if r == 0.0 {
                if b > 0.0 {
                    f64::INFINITY
                } else {
                    a
                }
            } else if b > 0.0 {
                let v = (1.0 / r - a / b).max(0.0);
                t_min.powf(r) * (-r * v).exp() * (a + b * v)
            } else {
                t_min.powf(r) * a
            };
            lo = lo.max(s);
            hi = hi.max(s);
        }
        Head::Bracketed {
            t_min, slope_hi, ..
        } => hi = hi.max(t_min.powf(r) * slope_hi),
    }
    if let Tail::Bracketed { t, upper, .. } = kc.tail {
        hi = hi.max(t.powf(-theta) * upper);
    }
    Ok(Enclosure {
        lo,
        hi,
        value: lo,
        quad_err: 0.0,
    })
}

/// The attained supremum (the lower end of [`theta_inf_enclosure`]).
pub fn theta_inf_norm(kc: &KCurve, theta: f64) -> Result<f64> {
    Ok(theta_inf_enclosure(kc, theta)?.lo)
}

/// `‖f‖_{1−1/p,p}` for `(L_1, L_1(1/t))` through the operator identity:
/// `‖Cf + C*f‖_p` on the half-line and
/// `(‖Cf + C*f‖_p^p + ‖f‖_1^p/(p−1))^{1/p}` on `[0, 1]`.
pub fn identity_norm(f: &StepFunction, p: f64, q: &QuadConfig) -> Result<f64> {
    if p == 1.0 && !f.domain().is_unit() && !f.is_zero() {
        return Err(Error::Divergent("the identity norm diverges for p = 1".into()));
    }
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    let g = cesaro(f).try_add(&copson(f))?;
    let s = lp_weighted(&g, p, &Weight::One, q)?;
    Ok(match f.domain() {
        Domain::UnitInterval => (s.powf(p) + f.integral().powf(p) / (p - 1.0)).powf(1.0 / p),
        Domain::HalfLine { .. } => s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcore::Seq;
    use crate::kfun::{build_kcurve, build_kcurve_discrete, Couple, GridSpec, Method};

    fn grid() -> GridSpec {
        GridSpec {
            t_min: 1e-4,
            t_max: 10.0,
            per_decade: 400,
        }
    }

    #[test]
    fn unit_vector_norms() {
        let kc = build_kcurve_discrete(&Seq::unit_vector(1), &grid()).unwrap();
        let q = QuadConfig::default();
        for p in [1.5, 2.0, 4.0] {
            let v = theta_p_norm(&kc, 1.0 - 1.0 / p, p, &q).unwrap();
            let want = (p / (p - 1.0)).powf(1.0 / p);
            assert!((v - want).abs() < 1e-10, "{p}: {v} vs {want}");
        }
        assert!((theta_inf_norm(&kc, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((theta_inf_norm(&kc, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn homogeneity() {
        let kc = build_kcurve_discrete(&Seq::new(vec![1.0, 0.5, 2.0]).unwrap(), &grid()).unwrap();
        let q = QuadConfig::default();
        let a = theta_p_norm(&kc, 0.5, 2.0, &q).unwrap();
        let b = theta_p_norm(&kc.scaled(3.0).unwrap(), 0.5, 2.0, &q).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn identity_example_and_cross_check() {
        let q = QuadConfig::default();
        let one = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        assert!((identity_norm(&one, 2.0, &q).unwrap() - 6f64.sqrt()).abs() < 1e-12);
        let z = StepFunction::zero(Domain::UnitInterval);
        assert_eq!(identity_norm(&z, 2.0, &q).unwrap(), 0.0);

        let f = StepFunction::unit(vec![0.0, 0.1, 0.6, 1.0], vec![2.0, 0.0, 5.0]).unwrap();
        let c = Couple::WeightedL1 {
            w0: Weight::One,
            w1: Weight::InvT,
        };
        let kc = build_kcurve(&f, &c, &grid(), Method::ClosedForm).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let a = identity_norm(&f, p, &q).unwrap();
            let b = theta_p_norm(&kc, 1.0 - 1.0 / p, p, &q).unwrap();
            assert!((a - b).abs() < 1e-6 * a, "{p}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let kc = build_kcurve_discrete(&Seq::unit_vector(1), &grid()).unwrap();
        let q = QuadConfig::default();
        assert!(theta_p_norm(&kc, 0.0, 2.0, &q).is_err());
        assert!(theta_p_norm(&kc, 0.5, f64::INFINITY, &q).is_err());
        assert!(theta_inf_norm(&kc, 1.5).is_err());
    }
}
