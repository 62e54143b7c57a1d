//! The two analytic families behind the counterexamples: `f_h`, whose
//! Copson norm outgrows its Cesàro norm as `h → 1`, and the indicators
//! `f_s = χ_{[0,s]}`, whose `(Ces₁, Ces_∞)_{1−1/p,∞}` norm outgrows the
//! `Ces_p` norm as `s → 0`.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::funcore::{Domain, StepFunction};
use crate::interp::theta_inf_enclosure;
use crate::kfun::{build_kcurve, Couple, GridSpec, Method};
use crate::norms::{QuadConfig, Quadrature, Singular};

/// `f_h(t) = (1 − t)^{−1/2} χ_{[h,1)}(t)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FhFamily {
    pub h: f64,
}

impl FhFamily {
    pub fn new(h: f64) -> Result<Self> {
        check_range("h", h, h > 0.0 && h < 1.0, "(0, 1)")?;
        Ok(FhFamily { h })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.h && t < 1.0 {
            (1.0 - t).powf(-0.5)
        } else {
            0.0
        }
    }

    /// `C(f_h)(t)`: 0 up to `h`, then `(2/t)(√(1−h) − √(1−t))`.
    pub fn ces_at(&self, t: f64) -> f64 {
        if t <= self.h {
            0.0
        } else {
            2.0 * ((1.0 - self.h).sqrt() - (1.0 - t).sqrt()) / t
        }
    }

    /// `C*(f_h)(t) = ∫_{max(t,h)}^1 ds/(s√(1−s)) = 2 artanh √(1 − max(t, h))`.
    pub fn cop_at(&self, t: f64) -> f64 {
        2.0 * (1.0 - t.max(self.h)).sqrt().atanh()
    }

    /// `C(f_h)(t)` by quadrature in the distance `d = 1 − s` to the singularity.
    pub fn ces_at_quad(&self, quad: &Quadrature, t: f64) -> f64 {
        if t <= self.h {
            return 0.0;
        }
        quad.integrate(1.0 - t, 1.0 - self.h, Singular::Left, |d| d.powf(-0.5)) / t
    }

    /// `C*(f_h)(t)` by quadrature in the distance to 1.
    pub fn cop_at_quad(&self, quad: &Quadrature, t: f64) -> f64 {
        quad.integrate_to_right(t.max(self.h), 1.0, |d| 1.0 / ((1.0 - d) * d.sqrt()))
    }
}

/// Norms of `f_h` and the bounds used to compare them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FhRatio {
    pub h: f64,
    pub p: f64,
    /// `‖f_h‖_{Cop(p)}`
    pub cop: f64,
    /// `‖f_h‖_{Ces(p)}`
    pub ces: f64,
    /// `(cop/ces)^p`
    pub ratio_pow: f64,
    /// `(p−1)h^p/(1 − h^{p−1})`
    pub lower_bound: f64,
    /// `2^p h(1−h)^{p/2}`, a lower bound for `cop^p`
    pub cop_pow_lower: f64,
    /// `2^p(1−h)^{p/2}(1−h^{p−1})/((p−1)h^{p−1})`, an upper bound for `ces^p`
    pub ces_pow_upper: f64,
}

impl FhRatio {
    /// Relative slack of the three inequalities, the smallest first.
    pub fn margin(&self) -> f64 {
        let a = self.ratio_pow / self.lower_bound - 1.0;
        let b = self.cop.powf(self.p) / self.cop_pow_lower - 1.0;
        let c = 1.0 - self.ces.powf(self.p) / self.ces_pow_upper;
        a.min(b).min(c)
    }
}

/// `‖f_h‖_{Cop(p)}`, `‖f_h‖_{Ces(p)}` by quadrature of the closed forms.
///
/// Fails with [`Error::Invariant`] if the ratio falls below its lower bound.
pub fn fh_ratio(h: f64, p: f64, q: &QuadConfig) -> Result<FhRatio> {
    let fam = FhFamily::new(h)?;
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    let quad = Quadrature::new(q)?;
    let sh = (1.0 - h).sqrt();
    // both integrands in d = 1 − t, non-smooth at d = 0
    let cop_pow = h * fam.cop_at(h).powf(p)
        + quad.integrate(0.0, 1.0 - h, Singular::Left, |d| (2.0 * d.sqrt().atanh()).powf(p));
    let ces_pow = quad.integrate(0.0, 1.0 - h, Singular::Left, |d| {
        (2.0 * (sh - d.sqrt()) / (1.0 - d)).powf(p)
    });
    let hp1 = h.powf(p - 1.0);
    let r = FhRatio {
        h,
        p,
        cop: cop_pow.powf(1.0 / p),
        ces: ces_pow.powf(1.0 / p),
        ratio_pow: cop_pow / ces_pow,
        lower_bound: (p - 1.0) * h.powf(p) / (1.0 - hp1),
        cop_pow_lower: 2f64.powf(p) * h * (1.0 - h).powf(p / 2.0),
        ces_pow_upper: 2f64.powf(p) * (1.0 - h).powf(p / 2.0) * (1.0 - hp1) / ((p - 1.0) * hp1),
    };
    if !(r.ratio_pow >= r.lower_bound) {
        return Err(Error::Invariant(format!(
            "f_h ratio {} below its bound {} at h = {h}, p = {p}",
            r.ratio_pow, r.lower_bound
        )));
    }
    Ok(r)
}

/// `f_s = χ_{[0,s]}` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsFamily {
    pub s: f64,
}

impl FsFamily {
    pub fn new(s: f64) -> Result<Self> {
        check_range("s", s, s > 0.0 && s <= 1.0, "(0, 1]")?;
        Ok(FsFamily { s })
    }

    pub fn step(&self) -> StepFunction {
        StepFunction::indicator(Domain::UnitInterval, 0.0, self.s).expect("validated s")
    }

    /// `((p/(p−1))s − s^p/(p−1))^{1/p}`.
    pub fn ces_norm(&self, p: f64) -> f64 {
        let s = self.s;
        ((p / (p - 1.0)) * s - s.powf(p) / (p - 1.0)).powf(1.0 / p)
    }

    /// `(1/(6p′))(ln(e/s))^{1/p}`, the lower bound for the norm ratio when `s < 1/e`.
    pub fn ratio_bound(&self, p: f64) -> f64 {
        let pd = p / (p - 1.0);
        (1.0 - self.s.ln()).powf(1.0 / p) / (6.0 * pd)
    }
}

/// One row of [`fs_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsRow {
    pub s: f64,
    pub ces: f64,
    /// `‖f_s‖_{(Ces₁,Ces_∞)_{1−1/p,∞}}` from the LP K-curve
    pub interp: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsSweep {
    pub p: f64,
    /// Sorted by decreasing `s`.
    pub rows: Vec<FsRow>,
    /// The ratio grows strictly as `s` decreases.
    pub increasing: bool,
}

/// Ratio of the `(1−1/p, ∞)` norm to the `Ces_p` norm along `s_grid`.
pub fn fs_sweep(p: f64, s_grid: &[f64], grid: &GridSpec, mesh_n: usize, tol: f64) -> Result<FsSweep> {
    check_range("p", p, p > 1.0 && p.is_finite(), "(1, ∞)")?;
    let mut fams = s_grid
        .iter()
        .map(|&s| FsFamily::new(s))
        .collect::<Result<Vec<_>>>()?;
    fams.sort_by(|a, b| b.s.total_cmp(&a.s));
    let theta = 1.0 - 1.0 / p;
    let mut rows = Vec::with_capacity(fams.len());
    for fam in fams {
        let kc = build_kcurve(
            &fam.step(),
            &Couple::Ces1CesInfUnit,
            grid,
            Method::Lp { mesh_n, tol },
        )?;
        let interp = theta_inf_enclosure(&kc, theta)?.lo;
        let ces = fam.ces_norm(p);
        let ratio = interp / ces;
        let bound = fam.ratio_bound(p);
        rows.push(FsRow {
            s: fam.s,
            ces,
            interp,
            ratio,
            bound,
            pass: ratio >= bound,
        });
    }
    let increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    Ok(FsSweep { p, rows, increasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fh_examples() {
        let f = FhFamily::new(0.75).unwrap();
        assert!((f.ces_at(1.0) - 1.0).abs() < 1e-15);
        let r = fh_ratio(0.9, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.lower_bound - 8.1).abs() < 1e-12);
        assert!(r.margin() > 0.0);
        assert!(FhFamily::new(1.0).is_err());
    }

    #[test]
    fn fh_quadrature_matches_closed_forms() {
        let quad = Quadrature::new(&QuadConfig::default()).unwrap();
        let f = FhFamily::new(0.3).unwrap();
        for i in 1..=100 {
            let t = i as f64 / 100.0;
            let (a, b) = (f.ces_at(t), f.ces_at_quad(&quad, t));
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "C at {t}: {a} vs {b}");
            let (a, b) = (f.cop_at(t), f.cop_at_quad(&quad, t));
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "C* at {t}: {a} vs {b}");
        }
    }

    #[test]
    fn fs_examples() {
        let one = FsFamily::new(1.0).unwrap();
        assert!((one.ces_norm(2.0) - 1.0).abs() < 1e-15);
        let b = FsFamily::new((-4f64).exp()).unwrap().ratio_bound(2.0);
        assert!((b - 5f64.sqrt() / 12.0).abs() < 1e-15);
        assert!((b - 0.18634).abs() < 1e-5);
    }
}
