//! Domain types: nonnegative step functions, finitely supported sequences,
//! the non-increasing rearrangement, and the `τ₁`/`τ₂` splitting geometry
//! used by the `(Ces₁, Ces_∞)` K-functional.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// The underlying interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `[0, 1]`.
    UnitInterval,
    /// `[0, ∞)`, with functions supported in `[0, truncation]`.
    HalfLine { truncation: f64 },
}

impl Domain {
    pub fn half_line(truncation: f64) -> Result<Self> {
        check_range(
            "truncation",
            truncation,
            truncation > 0.0 && truncation.is_finite(),
            "(0, ∞)",
        )?;
        Ok(Domain::HalfLine { truncation })
    }

    /// Right end of the mesh: 1 on the unit interval, the truncation on the half-line.
    pub fn right_end(&self) -> f64 {
        match *self {
            Domain::UnitInterval => 1.0,
            Domain::HalfLine { truncation } => truncation,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Domain::UnitInterval)
    }
}

/// A nonnegative piecewise-constant function.
///
/// `vals[i]` is the value on `(breaks[i], breaks[i + 1]]`. The mesh always
/// starts at 0 and ends at [`Domain::right_end`]; on the half-line the
/// function vanishes beyond the truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    domain: Domain,
    breaks: Vec<f64>,
    vals: Vec<f64>,
}

impl StepFunction {
    pub fn new(domain: Domain, breaks: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if vals.is_empty() {
            return Err(Error::InvalidFunction("at least one piece is required".into()));
        }
        if breaks.len() != vals.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints for {} values",
                breaks.len(),
                vals.len()
            )));
        }
        if breaks[0] != 0.0 {
            return Err(Error::InvalidFunction("mesh must start at 0".into()));
        }
        let end = *breaks.last().unwrap();
        if end != domain.right_end() {
            return Err(Error::InvalidFunction(format!(
                "mesh ends at {end}, domain ends at {}",
                domain.right_end()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFunction(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if let Some(v) = vals.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidFunction(format!(
                "values must be finite and nonnegative, got {v}"
            )));
        }
        Ok(StepFunction {
            domain,
            breaks,
            vals,
        })
    }

    /// Step function on `[0, 1]`.
    pub fn unit(breaks: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        Self::new(Domain::UnitInterval, breaks, vals)
    }

    pub fn constant(domain: Domain, c: f64) -> Result<Self> {
        Self::new(domain, vec![0.0, domain.right_end()], vec![c])
    }

    pub fn zero(domain: Domain) -> Self {
        Self::constant(domain, 0.0).expect("zero is a valid step function")
    }

    /// `c·χ_[a,b]`.
    pub fn indicator(domain: Domain, a: f64, b: f64) -> Result<Self> {
        let end = domain.right_end();
        check_range("a", a, (0.0..end).contains(&a), "[0, right end)")?;
        check_range("b", b, b > a && b <= end, "(a, right end]")?;
        let mut breaks = vec![0.0];
        let mut vals = Vec::new();
        if a > 0.0 {
            breaks.push(a);
            vals.push(0.0);
        }
        breaks.push(b);
        vals.push(1.0);
        if b < end {
            breaks.push(end);
            vals.push(0.0);
        }
        Self::new(domain, breaks, vals)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn n_pieces(&self) -> usize {
        self.vals.len()
    }

    pub fn right_end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Cells as `(left, right, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks
            .windows(2)
            .zip(&self.vals)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Index of the cell `(x_{i-1}, x_i]` containing `x`; `x = 0` maps to the first cell.
    pub fn cell_index(&self, x: f64) -> Option<usize> {
        if x < 0.0 || x > self.right_end() {
            return None;
        }
        let i = self.breaks.partition_point(|&b| b < x);
        Some(i.saturating_sub(1).min(self.vals.len() - 1))
    }

    /// Value at `x`, zero outside the mesh.
    pub fn value_at(&self, x: f64) -> f64 {
        self.cell_index(x).map_or(0.0, |i| self.vals[i])
    }

    /// `∫₀ˣ f`.
    pub fn primitive_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (a, b, v) in self.cells() {
            if x <= a {
                break;
            }
            acc += v * (x.min(b) - a);
        }
        acc
    }

    /// Primitive at every breakpoint, `F(x_0) = 0, …, F(x_n) = ∫ f`.
    pub fn primitive_at_breaks(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.breaks.len());
        let mut acc = 0.0;
        out.push(0.0);
        for (a, b, v) in self.cells() {
            acc += v * (b - a);
            out.push(acc);
        }
        out
    }

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.cells().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// `∫ f^p` (exact).
    pub fn power_integral(&self, p: f64) -> f64 {
        self.cells()
            .filter(|c| c.2 > 0.0)
            .map(|(a, b, v)| v.powf(p) * (b - a))
            .sum()
    }

    pub fn max_value(&self) -> f64 {
        self.vals.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.vals.windows(2).all(|w| w[0] >= w[1])
    }

    /// Right end of the support (last breakpoint of a nonzero cell), 0 for `f = 0`.
    pub fn support_end(&self) -> f64 {
        self.vals
            .iter()
            .rposition(|&v| v > 0.0)
            .map_or(0.0, |i| self.breaks[i + 1])
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_range("c", c, c >= 0.0 && c.is_finite(), "[0, ∞)")?;
        Ok(StepFunction {
            domain: self.domain,
            breaks: self.breaks.clone(),
            vals: self.vals.iter().map(|v| v * c).collect(),
        })
    }

    /// Same function on a mesh that also contains `points` (points outside the
    /// open mesh range are ignored).
    pub fn refined_at(&self, points: &[f64]) -> Self {
        let end = self.right_end();
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .copied()
            .chain(points.iter().copied().filter(|&p| p > 0.0 && p < end))
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let vals = breaks
            .windows(2)
            .map(|w| self.value_at(0.5 * (w[0] + w[1])))
            .collect();
        StepFunction {
            domain: self.domain,
            breaks,
            vals,
        }
    }

    /// Every cell split into `k` equal parts.
    pub fn subdivided(&self, k: usize) -> Self {
        let k = k.max(1);
        let mut breaks = Vec::with_capacity(self.vals.len() * k + 1);
        let mut vals = Vec::with_capacity(self.vals.len() * k);
        breaks.push(0.0);
        for (a, b, v) in self.cells() {
            for j in 1..=k {
                let x = if j == k {
                    b
                } else {
                    a + (b - a) * j as f64 / k as f64
                };
                if x > *breaks.last().unwrap() {
                    breaks.push(x);
                    vals.push(v);
                }
            }
        }
        StepFunction {
            domain: self.domain,
            breaks,
            vals,
        }
    }

    /// `f·χ_[a,b]`.
    pub fn restricted(&self, a: f64, b: f64) -> Self {
        let mut r = self.refined_at(&[a, b]);
        for (i, w) in r.breaks.windows(2).enumerate() {
            let mid = 0.5 * (w[0] + w[1]);
            if mid < a || mid > b {
                r.vals[i] = 0.0;
            }
        }
        r
    }

    /// `f·χ_A` for a union of closed intervals `A`.
    pub fn restricted_to_union(&self, intervals: &[(f64, f64)]) -> Self {
        let pts: Vec<f64> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut r = self.refined_at(&pts);
        for (i, w) in r.breaks.windows(2).enumerate() {
            let mid = 0.5 * (w[0] + w[1]);
            if !intervals.iter().any(|&(a, b)| mid >= a && mid <= b) {
                r.vals[i] = 0.0;
            }
        }
        r
    }

    /// Pointwise difference `self − other`, which must stay nonnegative.
    pub fn minus(&self, other: &StepFunction) -> Result<Self> {
        let (a, b) = common_refinement(self, other)?;
        let vals = a
            .vals
            .iter()
            .zip(&b.vals)
            .map(|(x, y)| (x - y).max(0.0))
            .collect();
        StepFunction::new(a.domain, a.breaks, vals)
    }

    /// Adjacent cells with equal values merged.
    pub fn coalesced(&self) -> Self {
        let mut breaks = vec![0.0];
        let mut vals: Vec<f64> = Vec::new();
        for (_, b, v) in self.cells() {
            if vals.last() == Some(&v) {
                *breaks.last_mut().unwrap() = b;
            } else {
                vals.push(v);
                breaks.push(b);
            }
        }
        StepFunction {
            domain: self.domain,
            breaks,
            vals,
        }
    }
}

/// Non-increasing rearrangement `f*` of a step function, on the same domain.
pub fn rearrange(f: &StepFunction) -> StepFunction {
    let mut cells: Vec<(f64, f64)> = f.cells().map(|(a, b, v)| (v, b - a)).collect();
    cells.sort_by(|x, y| y.0.total_cmp(&x.0));
    // merge equal values first so that lengths are summed before placement
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(cells.len());
    for (v, len) in cells {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += len,
            _ => merged.push((v, len)),
        }
    }
    let end = f.right_end();
    let mut breaks = vec![0.0];
    let mut vals = Vec::with_capacity(merged.len());
    let mut x = 0.0;
    let last = merged.len() - 1;
    for (i, (v, len)) in merged.into_iter().enumerate() {
        x = if i == last { end } else { (x + len).min(end) };
        if x > *breaks.last().unwrap() {
            breaks.push(x);
            vals.push(v);
        }
    }
    if *breaks.last().unwrap() < end {
        *breaks.last_mut().unwrap() = end;
    }
    StepFunction {
        domain: f.domain,
        breaks,
        vals,
    }
}

/// Both functions on the union of their meshes.
pub fn common_refinement(
    f: &StepFunction,
    g: &StepFunction,
) -> Result<(StepFunction, StepFunction)> {
    if f.domain != g.domain {
        return Err(Error::DomainMismatch);
    }
    Ok((f.refined_at(&g.breaks), g.refined_at(&f.breaks)))
}

/// A finitely supported nonnegative sequence `a₁, …, a_N` (zero afterwards).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seq {
    vals: Vec<f64>,
}

impl Seq {
    pub fn new(vals: Vec<f64>) -> Result<Self> {
        if vals.is_empty() {
            return Err(Error::InvalidSequence("at least one term is required".into()));
        }
        if let Some(v) = vals.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidSequence(format!(
                "terms must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Seq { vals })
    }

    /// The unit vector `e_k` (1-based).
    pub fn unit_vector(k: usize) -> Self {
        let mut vals = vec![0.0; k.max(1)];
        vals[k.max(1) - 1] = 1.0;
        Seq { vals }
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Term `a_k` (1-based), zero past the support.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.vals.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn sum(&self) -> f64 {
        self.vals.iter().sum()
    }
}

/// `τ₁(t) = t / ln(e/t)` and `τ₂(t) = e^{−t}` at a fixed `t ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauPair {
    pub t: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl TauPair {
    /// The middle band `[τ₁, τ₂]`, `None` when it is empty (`t ≥ t₀`).
    pub fn band(&self) -> Option<(f64, f64)> {
        (self.tau1 < self.tau2).then_some((self.tau1, self.tau2))
    }
}

pub fn tau1(t: f64) -> f64 {
    t / (1.0 - t.ln())
}

pub fn tau2(t: f64) -> f64 {
    (-t).exp()
}

pub fn tau_pair(t: f64) -> Result<TauPair> {
    check_range("t", t, t > 0.0 && t <= 1.0, "(0, 1]")?;
    Ok(TauPair {
        t,
        tau1: tau1(t),
        tau2: tau2(t),
    })
}

/// The unique `t₀ ∈ (0, 1)` with `τ₁(t₀) = τ₂(t₀)`, by bisection.
pub fn t_zero() -> f64 {
    let gap = |t: f64| tau1(t) - tau2(t);
    // gap < 0 near 0 and gap(1) = 1 − e^{−1} > 0
    let (mut lo, mut hi) = (1e-6, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thirds(v: [f64; 3]) -> StepFunction {
        StepFunction::unit(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_malformed_functions() {
        assert!(StepFunction::unit(vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepFunction::unit(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 3]).is_err());
        assert!(StepFunction::unit(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepFunction::unit(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(StepFunction::unit(vec![0.0, 1.0], vec![]).is_err());
        assert!(Seq::new(vec![]).is_err());
        assert!(Seq::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn rearrange_translates_a_block() {
        let f = StepFunction::indicator(Domain::UnitInterval, 0.5, 1.0).unwrap();
        let r = rearrange(&f);
        assert_eq!(r.breaks(), &[0.0, 0.5, 1.0]);
        assert_eq!(r.vals(), &[1.0, 0.0]);
    }

    #[test]
    fn rearrange_of_constant_is_itself() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        assert_eq!(rearrange(&f), f);
    }

    #[test]
    fn rearrange_sorts_blocks() {
        let r = rearrange(&thirds([1.0, 3.0, 2.0]));
        assert_eq!(r.vals(), &[3.0, 2.0, 1.0]);
        for (x, y) in r.breaks().iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn tau_at_one_and_half() {
        let p = tau_pair(1.0).unwrap();
        assert_eq!(p.tau1, 1.0);
        assert!((p.tau2 - (-1.0f64).exp()).abs() < 1e-15);
        let p = tau_pair(0.5).unwrap();
        // 0.5 / (1 + ln 2), e^{-1/2}
        assert!((p.tau1 - 0.295_308_054_574_8).abs() < 1e-12);
        assert!((p.tau2 - 0.606_530_66).abs() < 1e-8);
        let p = tau_pair(1e-12).unwrap();
        assert!(p.tau1 < 1e-13 && p.tau2 > 1.0 - 1e-11);
    }

    #[test]
    fn tau_rejects_out_of_range() {
        assert!(tau_pair(0.0).is_err());
        assert!(tau_pair(1.5).is_err());
        assert!(tau_pair(f64::NAN).is_err());
    }

    #[test]
    fn t_zero_is_the_crossing() {
        let t0 = t_zero();
        assert!(t0 > 0.5 && t0 < 1.0);
        assert!((tau1(t0) - tau2(t0)).abs() < 1e-11);
        // frozen from a 30-digit secant solve of t/ln(e/t) = e^{-t}
        assert!((t0 - 0.689_045_060_788_817).abs() < 1e-12, "t0 = {t0}");
    }

    #[test]
    fn tau_ordering_on_grid() {
        let t0 = t_zero();
        for i in 1..=1000 {
            let t = i as f64 / 1000.0;
            let p = tau_pair(t).unwrap();
            assert!(p.tau1 <= t + 1e-15);
            if (t - t0).abs() > 1e-9 {
                assert_eq!(p.tau1 < p.tau2, t < t0, "t = {t}");
            }
        }
    }

    #[test]
    fn common_refinement_merges_meshes() {
        let f = StepFunction::unit(vec![0.0, 1.0 / 3.0, 1.0], vec![1.0, 2.0]).unwrap();
        let g = StepFunction::unit(vec![0.0, 2.0 / 3.0, 1.0], vec![5.0, 7.0]).unwrap();
        let (a, b) = common_refinement(&f, &g).unwrap();
        assert_eq!(a.breaks(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(a.breaks(), b.breaks());
        assert_eq!(a.vals(), &[1.0, 2.0, 2.0]);
        assert_eq!(b.vals(), &[5.0, 5.0, 7.0]);

        let (c, d) = common_refinement(&f, &f).unwrap();
        assert_eq!(c, f);
        assert_eq!(d, f);

        let h = StepFunction::constant(Domain::HalfLine { truncation: 1.0 }, 1.0).unwrap();
        assert_eq!(common_refinement(&f, &h), Err(Error::DomainMismatch));
    }

    #[test]
    fn restriction_and_support() {
        let f = StepFunction::constant(Domain::UnitInterval, 2.0).unwrap();
        let r = f.restricted(0.25, 0.5);
        assert!((r.integral() - 0.5).abs() < 1e-15);
        assert_eq!(r.support_end(), 0.5);
        let u = f.restricted_to_union(&[(0.0, 0.1), (0.9, 1.0)]);
        assert!((u.integral() - 0.4).abs() < 1e-15);
    }
}
