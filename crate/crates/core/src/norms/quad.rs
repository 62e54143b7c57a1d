use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussLaguerre, GaussLegendre};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// Quadrature settings shared by every norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Gauss–Legendre points per smooth piece.
    pub gauss_order: usize,
    /// Number of halvings toward a singular endpoint.
    pub refine_levels: usize,
    /// Points per decade for `t`-integrals over K-curves.
    pub log_grid_points: usize,
    pub rel_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            gauss_order: 32,
            refine_levels: 20,
            log_grid_points: 400,
            rel_tol: 1e-9,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        check_range(
            "gauss_order",
            self.gauss_order as f64,
            self.gauss_order >= 2,
            "[2, ∞)",
        )?;
        check_range("rel_tol", self.rel_tol, self.rel_tol > 0.0, "(0, ∞)")?;
        check_range(
            "log_grid_points",
            self.log_grid_points as f64,
            self.log_grid_points >= 2,
            "[2, ∞)",
        )
    }
}

/// Which end of an interval carries an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singular {
    None,
    Left,
    Right,
}

/// Gauss–Legendre on smooth pieces, geometric subdivision (ratio ½) toward a
/// singular endpoint, and a Gauss–Laguerre rule on the innermost sliver via
/// `s = ε·e^{−u}`.
#[derive(Debug, Clone)]
pub struct Quadrature {
    legendre: Vec<(f64, f64)>,
    laguerre: Vec<(f64, f64)>,
    levels: usize,
}

impl Quadrature {
    pub fn new(cfg: &QuadConfig) -> Result<Self> {
        cfg.validate()?;
        let deg = NonZeroUsize::new(cfg.gauss_order).expect("validated");
        let legendre = GaussLegendre::new(deg).iter().map(|(x, w)| (*x, *w)).collect();
        let alpha = FiniteAboveNegOneF64::new(0.0).expect("0 > -1");
        let laguerre = GaussLaguerre::new(deg, alpha)
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect();
        Ok(Quadrature {
            legendre,
            laguerre,
            levels: cfg.refine_levels,
        })
    }

    /// Plain Gauss–Legendre on `[a, b]`.
    pub fn legendre<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self
            .legendre
            .iter()
            .map(|&(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// `∫ₐᵇ f` with refinement toward the singular end.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, sing: Singular, mut f: F) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match sing {
            Singular::None => self.legendre(a, b, f),
            Singular::Left => {
                let mut acc = 0.0;
                let mut hi = b;
                let len = b - a;
                for k in 1..=self.levels {
                    let lo = a + len * 0.5f64.powi(k as i32);
                    acc += self.legendre(lo, hi, &mut f);
                    hi = lo;
                }
                let eps = hi - a;
                acc + eps
                    * self
                        .laguerre
                        .iter()
                        .map(|&(u, w)| w * f(a + eps * (-u).exp()))
                        .sum::<f64>()
            }
            Singular::Right => {
                let mut acc = 0.0;
                let mut lo = a;
                let len = b - a;
                for k in 1..=self.levels {
                    let hi = b - len * 0.5f64.powi(k as i32);
                    acc += self.legendre(lo, hi, &mut f);
                    lo = hi;
                }
                let eps = b - lo;
                // nodes that round onto b are dropped; use `integrate_to_right`
                // when the integrand is known as a function of the distance to b
                acc + eps
                    * self
                        .laguerre
                        .iter()
                        .map(|&(u, w)| (w, b - eps * (-u).exp()))
                        .filter(|&(_, x)| x < b)
                        .map(|(w, x)| w * f(x))
                        .sum::<f64>()
            }
        }
    }

    /// `∫ₐᵇ g(b − x) dx` for `g` singular at 0, evaluated in the distance
    /// variable so nothing is lost to rounding near `b`.
    pub fn integrate_to_right<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, g: F) -> f64 {
        self.integrate(0.0, b - a, Singular::Left, g)
    }

    /// `∫₀^∞ e^{−u} g(u) du` by Gauss–Laguerre.
    pub fn laguerre<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.laguerre.iter().map(|&(u, w)| w * g(u)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_singularity_moments() {
        let q = Quadrature::new(&QuadConfig::default()).unwrap();
        // ∫₀¹ (ln 1/x)^k dx = k!
        let mut fact = 1.0;
        for k in 1..=10 {
            fact *= k as f64;
            let v = q.integrate(0.0, 1.0, Singular::Left, |x| (-x.ln()).powi(k));
            assert!((v / fact - 1.0).abs() < 1e-12, "k = {k}: {v}");
        }
    }

    #[test]
    fn sqrt_singularity_at_right_end() {
        let q = Quadrature::new(&QuadConfig::default()).unwrap();
        // ∫₀¹ (1 − s)^{−1/2} ds = 2
        let v = q.integrate_to_right(0.0, 1.0, |d| d.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        let v = q.integrate(0.0, 1.0, Singular::Right, |s| (1.0 - s).powf(-0.5));
        assert!((v - 2.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuadConfig {
            gauss_order: 1,
            ..QuadConfig::default()
        };
        assert!(Quadrature::new(&cfg).is_err());
    }
}
