//! Cesàro, Copson, discrete and maximal operators.
//!
//! For a step function the primitive is piecewise linear, so `Cf` is
//! `α + β/x` on every cell and `C*f` is `α + γ·ln(1/x)`. Both are carried as
//! exact per-piece closed forms in [`PiecewiseSmooth`].

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::funcore::{Domain, Seq, StepFunction};

/// `x ↦ α + β/x + γ·ln(1/x)` on one piece.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Piece {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Piece {
    pub fn constant(c: f64) -> Self {
        Piece {
            alpha: c,
            ..Piece::default()
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.alpha;
        if self.beta != 0.0 {
            v += self.beta / x;
        }
        if self.gamma != 0.0 {
            v -= self.gamma * x.ln();
        }
        v
    }

    fn add(&self, o: &Piece) -> Piece {
        Piece {
            alpha: self.alpha + o.alpha,
            beta: self.beta + o.beta,
            gamma: self.gamma + o.gamma,
        }
    }

    /// `∫ₐᵇ g`, `a = 0` allowed when `β = 0`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        // antiderivative: αx + β ln x + γ(x ln(1/x) + x)
        let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
        let mut v = self.alpha * (b - a);
        if self.beta != 0.0 {
            v += if a == 0.0 {
                f64::INFINITY * self.beta.signum()
            } else {
                self.beta * (b / a).ln()
            };
        }
        if self.gamma != 0.0 {
            v += self.gamma * ((b - a) - (xlogx(b) - xlogx(a)));
        }
        v
    }

    /// `∫ₐᵇ g(s)/s ds` for `0 < a < b ≤ ∞`.
    fn integral_over_s(&self, a: f64, b: f64) -> f64 {
        // antiderivative: α ln s − β/s − γ (ln s)²/2
        if b.is_infinite() {
            if self.alpha != 0.0 || self.gamma != 0.0 {
                return f64::INFINITY;
            }
            return self.beta / a;
        }
        let (la, lb) = (a.ln(), b.ln());
        let mut v = self.alpha * (lb - la);
        if self.beta != 0.0 {
            v += self.beta * (1.0 / a - 1.0 / b);
        }
        if self.gamma != 0.0 {
            v -= self.gamma * 0.5 * (lb - la) * (lb + la);
        }
        v
    }

    /// Critical point of `α + β/x + γ ln(1/x)` (derivative `−(β + γx)/x²`).
    fn critical_point(&self) -> Option<f64> {
        (self.gamma != 0.0).then(|| -self.beta / self.gamma)
    }
}

/// Piecewise closed-form function on `(0, x_n]`, optionally continued on `(x_n, ∞)`
/// by a single tail piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSmooth {
    breaks: Vec<f64>,
    pieces: Vec<Piece>,
    tail: Option<Piece>,
}

impl PiecewiseSmooth {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Piece>, tail: Option<Piece>) -> Result<Self> {
        if pieces.is_empty() || breaks.len() != pieces.len() + 1 || breaks[0] != 0.0 {
            return Err(Error::InvalidFunction(
                "piecewise function needs a mesh 0 = x_0 < … < x_n and n pieces".into(),
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFunction(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewiseSmooth {
            breaks,
            pieces,
            tail,
        })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn tail(&self) -> Option<&Piece> {
        self.tail.as_ref()
    }

    pub fn right_end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// `(left, right, piece)` triples on the bounded mesh.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &Piece)> + '_ {
        self.breaks
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (w[0], w[1], p))
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        if x > self.right_end() {
            return self.tail.as_ref();
        }
        let i = self.breaks.partition_point(|&b| b < x);
        Some(&self.pieces[i.saturating_sub(1).min(self.pieces.len() - 1)])
    }

    /// Value at `x > 0`; zero beyond the mesh when there is no tail.
    pub fn eval(&self, x: f64) -> f64 {
        self.piece_at(x).map_or(0.0, |p| p.eval(x))
    }

    /// `∫ₐᵇ g` in closed form, `0 ≤ a ≤ b`, including the tail piece.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, p) in self.segments() {
            let (lo, hi) = (l.max(a), r.min(b));
            if lo < hi {
                acc += p.integral(lo, hi);
            }
        }
        if let Some(t) = &self.tail {
            let lo = a.max(self.right_end());
            if lo < b {
                acc += t.integral(lo, b);
            }
        }
        acc
    }

    /// Cesàro average `(1/x)∫₀ˣ g` at a point.
    pub fn average_at(&self, x: f64) -> f64 {
        self.integral(0.0, x) / x
    }

    /// Copson transform `∫ₓ^∞ g(s)/s ds` at a point (the bounded mesh plus the tail).
    pub fn copson_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, p) in self.segments() {
            let lo = l.max(x);
            if lo < r {
                acc += p.integral_over_s(lo, r);
            }
        }
        if let Some(t) = &self.tail {
            acc += t.integral_over_s(x.max(self.right_end()), f64::INFINITY);
        }
        acc
    }

    /// Pointwise sum of two functions on the same mesh.
    pub fn try_add(&self, other: &PiecewiseSmooth) -> Result<PiecewiseSmooth> {
        if self.breaks != other.breaks {
            return Err(Error::DomainMismatch);
        }
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| a.add(b))
            .collect();
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or_default().add(&b.unwrap_or_default())),
        };
        Ok(PiecewiseSmooth {
            breaks: self.breaks.clone(),
            pieces,
            tail,
        })
    }

    /// Essential supremum of `|g|` from per-piece endpoint/critical-point analysis.
    pub fn sup_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        let consider = |best: &mut f64, p: &Piece, x: f64| *best = best.max(p.eval(x).abs());
        for (l, r, p) in self.segments() {
            if l > 0.0 {
                consider(&mut best, p, l);
            } else if p.beta != 0.0 || p.gamma != 0.0 {
                // unbounded near 0 unless both singular terms vanish
                return f64::INFINITY;
            }
            consider(&mut best, p, r);
            if let Some(c) = p.critical_point() {
                if c > l && c < r {
                    consider(&mut best, p, c);
                }
            }
        }
        if let Some(t) = &self.tail {
            let x = self.right_end();
            if t.gamma != 0.0 || t.alpha != 0.0 {
                let lim = if t.gamma != 0.0 { f64::INFINITY } else { t.alpha.abs() };
                best = best.max(lim);
            }
            consider(&mut best, t, x);
            if let Some(c) = t.critical_point() {
                if c > x {
                    consider(&mut best, t, c);
                }
            }
        }
        best
    }
}

impl From<&StepFunction> for PiecewiseSmooth {
    fn from(f: &StepFunction) -> Self {
        PiecewiseSmooth {
            breaks: f.breaks().to_vec(),
            pieces: f.vals().iter().map(|&v| Piece::constant(v)).collect(),
            tail: None,
        }
    }
}

/// `Cf(x) = (1/x)∫₀ˣ f`; on the half-line continued by `S/x` beyond the mesh.
pub fn cesaro(f: &StepFunction) -> PiecewiseSmooth {
    let prim = f.primitive_at_breaks();
    let pieces = f
        .cells()
        .zip(&prim)
        .map(|((a, _, v), &fa)| Piece {
            alpha: v,
            beta: fa - v * a,
            gamma: 0.0,
        })
        .collect();
    let tail = match f.domain() {
        Domain::UnitInterval => None,
        Domain::HalfLine { .. } => Some(Piece {
            beta: *prim.last().unwrap(),
            ..Piece::default()
        }),
    };
    PiecewiseSmooth {
        breaks: f.breaks().to_vec(),
        pieces,
        tail,
    }
}

/// `C*f(x) = ∫ₓ f(t)/t dt` over the domain (zero beyond the mesh).
pub fn copson(f: &StepFunction) -> PiecewiseSmooth {
    let n = f.n_pieces();
    let b = f.breaks();
    let v = f.vals();
    // remainder R_k = Σ_{i>k} v_i ln(x_i / x_{i−1})
    let mut rem = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let i = k + 1;
        rem[k] = rem[i]
            + if v[i] == 0.0 {
                0.0
            } else {
                v[i] * (b[i + 1] / b[i]).ln()
            };
    }
    let pieces = (0..n)
        .map(|k| Piece {
            alpha: rem[k] + v[k] * b[k + 1].ln(),
            beta: 0.0,
            gamma: v[k],
        })
        .collect();
    PiecewiseSmooth {
        breaks: b.to_vec(),
        pieces,
        tail: match f.domain() {
            Domain::UnitInterval => None,
            Domain::HalfLine { .. } => Some(Piece::default()),
        },
    }
}

/// `(C_d x)(n) = (1/n) Σ_{k ≤ n} x_k` for `n = 1..=m`.
pub fn discrete_cesaro(x: &Seq, m: usize) -> Result<Vec<f64>> {
    check_range("M", m as f64, m >= 1, "[1, ∞)")?;
    let mut acc = 0.0;
    Ok((1..=m)
        .map(|n| {
            acc += x.get(n);
            acc / n as f64
        })
        .collect())
}

/// `(C*_d x)(n) = Σ_{k ≥ n} x_k / k` for `n = 1..=m` (exact, finite support).
pub fn discrete_copson(x: &Seq, m: usize) -> Result<Vec<f64>> {
    check_range("M", m as f64, m >= 1, "[1, ∞)")?;
    let n = x.len();
    let mut suffix = vec![0.0; n + 2];
    for k in (1..=n).rev() {
        suffix[k] = suffix[k + 1] + x.get(k) / k as f64;
    }
    Ok((1..=m)
        .map(|i| if i <= n { suffix[i] } else { 0.0 })
        .collect())
}

/// Hardy–Littlewood maximal function `Mf(x)`, the supremum of averages of `f`
/// over intervals containing `x`.
///
/// With one endpoint fixed, the average is a Möbius function of the other
/// endpoint on every cell, hence monotone there; the supremum is attained with
/// both endpoints in `breaks ∪ {x}`.
pub fn maximal(f: &StepFunction, x: f64) -> Result<f64> {
    let end = f.right_end();
    let inside = match f.domain() {
        Domain::UnitInterval => x > 0.0 && x < end,
        Domain::HalfLine { .. } => x > 0.0 && x.is_finite(),
    };
    check_range("x", x, inside, "the open domain")?;
    let prim = |y: f64| f.primitive_at(y);
    let lefts: Vec<f64> = f
        .breaks()
        .iter()
        .copied()
        .filter(|&b| b < x)
        .chain(std::iter::once(x))
        .collect();
    let rights: Vec<f64> = std::iter::once(x)
        .chain(f.breaks().iter().copied().filter(|&b| b > x))
        .collect();
    let fx = prim(x);
    let mut best = f.value_at(x).max(if x < end {
        // value just right of x
        f.value_at(x + (end - x) * 1e-15)
    } else {
        0.0
    });
    for &a in &lefts {
        let fa = if a == x { fx } else { prim(a) };
        for &b in &rights {
            if b > a {
                let fb = if b == x { fx } else { prim(b) };
                best = best.max((fb - fa) / (b - a));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_const() -> StepFunction {
        StepFunction::constant(Domain::UnitInterval, 1.0).unwrap()
    }

    #[test]
    fn cesaro_of_constant_is_constant() {
        let c = cesaro(&unit_const());
        for x in [1e-9, 0.1, 0.5, 1.0] {
            assert!((c.eval(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cesaro_of_half_indicator() {
        let f = StepFunction::indicator(Domain::UnitInterval, 0.0, 0.5).unwrap();
        let c = cesaro(&f);
        assert!((c.eval(0.3) - 1.0).abs() < 1e-15);
        assert!((c.eval(0.8) - 0.5 / 0.8).abs() < 1e-15);
    }

    #[test]
    fn copson_of_constant_and_block() {
        let c = copson(&unit_const());
        for x in [1e-6, 0.3, 0.9] {
            assert!((c.eval(x) - (1.0 / x).ln()).abs() < 1e-14);
        }
        let f = StepFunction::indicator(Domain::UnitInterval, 0.5, 1.0).unwrap();
        let c = copson(&f);
        assert!((c.eval(0.7) - (1.0f64 / 0.7).ln()).abs() < 1e-14);
        assert!((c.eval(0.2) - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn cesaro_of_copson_of_constant() {
        let c = copson(&unit_const());
        for x in [0.01, 0.5, 0.99] {
            assert!((c.average_at(x) - (1.0 + (1.0 / x).ln())).abs() < 1e-13);
        }
    }

    #[test]
    fn discrete_examples() {
        let e1 = Seq::unit_vector(1);
        assert_eq!(
            discrete_cesaro(&e1, 4).unwrap(),
            vec![1.0, 0.5, 1.0 / 3.0, 0.25]
        );
        let ones = Seq::new(vec![1.0; 3]).unwrap();
        assert_eq!(
            discrete_cesaro(&ones, 5).unwrap(),
            vec![1.0, 1.0, 1.0, 0.75, 0.6]
        );
        assert_eq!(discrete_copson(&e1, 3).unwrap(), vec![1.0, 0.0, 0.0]);
        let cop = discrete_copson(&ones, 4).unwrap();
        let want = [11.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0, 0.0];
        for (a, b) in cop.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let zero = Seq::new(vec![0.0; 3]).unwrap();
        assert!(discrete_cesaro(&zero, 3).unwrap().iter().all(|&v| v == 0.0));
        assert!(discrete_cesaro(&ones, 0).is_err());
    }

    #[test]
    fn discrete_composition_at_two() {
        let ones = Seq::new(vec![1.0; 3]).unwrap();
        let cop = discrete_copson(&ones, 6).unwrap();
        let cc = discrete_cesaro(&Seq::new(cop.clone()).unwrap(), 6).unwrap();
        let c = discrete_cesaro(&ones, 6).unwrap();
        assert!((cc[1] - (1.0 + 1.0 / 3.0)).abs() < 1e-15);
        assert!((cc[1] - (c[1] + cop[2])).abs() < 1e-15);
    }

    #[test]
    fn maximal_examples() {
        let one = unit_const();
        for x in [0.1, 0.5, 0.9] {
            assert!((maximal(&one, x).unwrap() - 1.0).abs() < 1e-15);
        }
        let f = StepFunction::indicator(Domain::UnitInterval, 0.0, 0.5).unwrap();
        assert!((maximal(&f, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!((maximal(&f, 0.75).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(maximal(&f, 1.0).is_err());
        assert!(maximal(&f, 0.0).is_err());
    }

    #[test]
    fn sup_of_cesaro_is_attained_at_breaks() {
        let f = StepFunction::indicator(Domain::UnitInterval, 0.0, 0.5).unwrap();
        assert!((cesaro(&f).sup_abs() - 1.0).abs() < 1e-15);
        assert_eq!(copson(&unit_const()).sup_abs(), f64::INFINITY);
    }
}
