use serde::{Deserialize, Serialize};

use crate::funcore::StepFunction;

/// Named weights on the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    One,
    /// `1/t`
    InvT,
    /// `ln(1/t)`
    LogInv,
    /// `ln(e/t)`
    LogE,
    /// `1 − t`
    OneMinusT,
    Step(StepFunction),
}

impl Weight {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::InvT => 1.0 / x,
            Weight::LogInv => -x.ln(),
            Weight::LogE => 1.0 - x.ln(),
            Weight::OneMinusT => 1.0 - x,
            Weight::Step(w) => w.value_at(x),
        }
    }

    /// Antiderivative, vanishing at 0 except for `1/t`.
    fn primitive(&self, x: f64) -> f64 {
        let xlogx = if x == 0.0 { 0.0 } else { x * x.ln() };
        match self {
            Weight::One => x,
            Weight::InvT => x.ln(),
            Weight::LogInv => x - xlogx,
            Weight::LogE => 2.0 * x - xlogx,
            Weight::OneMinusT => x - 0.5 * x * x,
            Weight::Step(w) => w.primitive_at(x),
        }
    }

    /// `∫ₐᵇ w` in closed form; `+∞` for `1/t` on an interval starting at 0.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match self {
            Weight::InvT if a == 0.0 => f64::INFINITY,
            Weight::InvT => (b / a).ln(),
            // the x ln x terms cancel badly for short cells far from 0
            Weight::LogInv | Weight::LogE if a > 0.0 && b - a < 0.25 * a => {
                let shift = if matches!(self, Weight::LogE) { 1.0 } else { 0.0 };
                let m = 0.5 * (a + b);
                let h = b - a;
                let r = h / (2.0 * m);
                // b ln b − a ln a = h ln m + m[(1+r)ln(1+r) − (1−r)ln(1−r)]
                let corr = m * ((1.0 + r) * r.ln_1p() - (1.0 - r) * (-r).ln_1p());
                h * (1.0 + shift - m.ln()) - corr
            }
            _ => self.primitive(b) - self.primitive(a),
        }
    }

    /// Average of the weight over a cell.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b) / (b - a)
    }

    /// Whether the weight (or a power of it) needs refinement toward 0.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self, Weight::InvT | Weight::LogInv | Weight::LogE)
    }

    /// Breakpoints a step weight contributes to a mesh.
    pub fn breaks(&self) -> &[f64] {
        match self {
            Weight::Step(w) => w.breaks(),
            _ => &[],
        }
    }

    /// Supremum over the domain.
    pub fn sup(&self) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::OneMinusT => 1.0,
            Weight::InvT | Weight::LogInv | Weight::LogE => f64::INFINITY,
            Weight::Step(w) => w.max_value(),
        }
    }

    /// Points in `(a, b)` where `self = t·other` can switch sign, exact for the
    /// named pairs and found by sampling plus bisection otherwise.
    pub fn crossovers(&self, other: &Weight, t: f64, a: f64, b: f64) -> Vec<f64> {
        let exact = match (self, other) {
            (Weight::One, Weight::InvT) | (Weight::InvT, Weight::One) => Some(vec![t]),
            (Weight::LogInv, Weight::One) => Some(vec![(-t).exp()]),
            (Weight::One, Weight::LogInv) => Some(vec![(-1.0 / t).exp()]),
            (Weight::OneMinusT, Weight::One) => Some(vec![1.0 - t]),
            (Weight::One, Weight::OneMinusT) => Some(vec![1.0 - 1.0 / t]),
            (x, y) if x == y => Some(vec![]),
            _ => None,
        };
        let pts = match exact {
            Some(v) => v,
            None => {
                let g = |x: f64| self.eval(x) - t * other.eval(x);
                let samples = 32;
                let mut out = Vec::new();
                let xs: Vec<f64> = (0..=samples)
                    .map(|i| a + (b - a) * i as f64 / samples as f64)
                    .map(|x| x.clamp(a + (b - a) * 1e-12, b - (b - a) * 1e-12))
                    .collect();
                for w in xs.windows(2) {
                    let (mut lo, mut hi) = (w[0], w[1]);
                    let (glo, ghi) = (g(lo), g(hi));
                    if glo.is_finite() && ghi.is_finite() && glo * ghi < 0.0 {
                        for _ in 0..100 {
                            let mid = 0.5 * (lo + hi);
                            if g(mid) * glo > 0.0 {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        out.push(0.5 * (lo + hi));
                    }
                }
                out
            }
        };
        pts.into_iter().filter(|&x| x > a && x < b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_integrals() {
        assert!((Weight::LogInv.integral(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((Weight::LogE.integral(0.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((Weight::OneMinusT.integral(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(Weight::InvT.integral(0.0, 0.5), f64::INFINITY);
        assert!((Weight::InvT.integral(0.5, 1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn short_cells_match_quadrature() {
        let q = crate::norms::Quadrature::new(&Default::default()).unwrap();
        for (a, b) in [(0.5, 0.51), (0.9, 0.9000001), (1e-3, 1.1e-3), (0.2, 0.7)] {
            for w in [Weight::LogInv, Weight::LogE] {
                let oracle = q.legendre(a, b, |x| w.eval(x));
                let v = w.integral(a, b);
                assert!((v / oracle - 1.0).abs() < 1e-13, "{a} {b}: {v} vs {oracle}");
            }
        }
    }

    #[test]
    fn named_crossovers() {
        assert_eq!(Weight::One.crossovers(&Weight::InvT, 0.3, 0.0, 1.0), vec![0.3]);
        assert_eq!(Weight::One.crossovers(&Weight::InvT, 1.5, 0.0, 1.0), Vec::<f64>::new());
        let x = Weight::LogE.crossovers(&Weight::InvT, 0.2, 0.0, 1.0);
        for c in x {
            assert!((Weight::LogE.eval(c) - 0.2 / c).abs() < 1e-9);
        }
    }
}
