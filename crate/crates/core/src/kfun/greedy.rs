//! Exact solver for `min_{0 ≤ m ≤ M} Σ cᵢ(Mᵢ − mᵢ) + t·N(m)` where `m` are the
//! cell masses of `h` and `N` is a max of prefix functionals (`Ces_∞`) or of
//! per-cell functionals (`L_∞`).
//!
//! For a fixed level `z`, `{m : 0 ≤ m ≤ M, N(m) ≤ z}` is a polymatroid (its
//! constraints form a laminar family), so `G(z) = max Σ cᵢmᵢ` is attained by
//! the greedy allocation in decreasing `c`. `φ(z) = Σ cᵢMᵢ − G(z) + t·z` is
//! convex and piecewise linear; allocations carry their right derivative in
//! `z`, which drives a bisection on the sign of `φ'(z+)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A value together with its right derivative in `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lin {
    v: f64,
    s: f64,
}

impl Lin {
    const ZERO: Lin = Lin { v: 0.0, s: 0.0 };

    fn add(self, o: Lin) -> Lin {
        Lin {
            v: self.v + o.v,
            s: self.s + o.s,
        }
    }

    fn sub(self, o: Lin) -> Lin {
        Lin {
            v: self.v - o.v,
            s: self.s - o.s,
        }
    }

    fn scale(self, c: f64) -> Lin {
        Lin {
            v: self.v * c,
            s: self.s * c,
        }
    }

    /// Lexicographic minimum: the smaller value, ties broken by the smaller
    /// slope, which is the minimum just to the right of `z`.
    fn min(self, o: Lin) -> Lin {
        match self.v.partial_cmp(&o.v) {
            Some(Ordering::Less) => self,
            Some(Ordering::Greater) => o,
            _ => {
                if self.s <= o.s {
                    self
                } else {
                    o
                }
            }
        }
    }
}

/// Constraint family of the second norm on the mesh.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Caps<'a> {
    /// `Σ_{i≤j} mᵢ ≤ z·xⱼ` with `xⱼ` the right cell ends.
    Prefix(&'a [f64]),
    /// `mᵢ ≤ z·lenᵢ`.
    Cell(&'a [f64]),
}

pub(crate) struct Problem<'a> {
    pub c: &'a [f64],
    pub big_m: &'a [f64],
    pub caps: Caps<'a>,
}

pub(crate) struct Solution {
    #[cfg_attr(not(test), allow(dead_code))]
    pub value: f64,
    /// Lower bound from the two supporting lines around the minimiser.
    pub lower: f64,
    pub masses: Vec<f64>,
}

/// Lazy segment tree with range add and range lexicographic minimum.
struct MinTree {
    n: usize,
    min: Vec<Lin>,
    lazy: Vec<Lin>,
}

impl MinTree {
    fn new(init: &[Lin]) -> Self {
        let n = init.len();
        let mut t = MinTree {
            n,
            min: vec![Lin::ZERO; 4 * n.max(1)],
            lazy: vec![Lin::ZERO; 4 * n.max(1)],
        };
        t.build(1, 0, n - 1, init);
        t
    }

    fn build(&mut self, node: usize, l: usize, r: usize, init: &[Lin]) {
        if l == r {
            self.min[node] = init[l];
            return;
        }
        let m = (l + r) / 2;
        self.build(2 * node, l, m, init);
        self.build(2 * node + 1, m + 1, r, init);
        self.min[node] = self.min[2 * node].min(self.min[2 * node + 1]);
    }

    fn push(&mut self, node: usize) {
        let d = self.lazy[node];
        if d != Lin::ZERO {
            for ch in [2 * node, 2 * node + 1] {
                self.min[ch] = self.min[ch].add(d);
                self.lazy[ch] = self.lazy[ch].add(d);
            }
            self.lazy[node] = Lin::ZERO;
        }
    }

    fn add_from(&mut self, from: usize, d: Lin) {
        self.add(1, 0, self.n - 1, from, d);
    }

    fn add(&mut self, node: usize, l: usize, r: usize, from: usize, d: Lin) {
        if r < from {
            return;
        }
        if l >= from {
            self.min[node] = self.min[node].add(d);
            self.lazy[node] = self.lazy[node].add(d);
            return;
        }
        self.push(node);
        let m = (l + r) / 2;
        self.add(2 * node, l, m, from, d);
        self.add(2 * node + 1, m + 1, r, from, d);
        self.min[node] = self.min[2 * node].min(self.min[2 * node + 1]);
    }

    fn min_from(&mut self, from: usize) -> Lin {
        self.query(1, 0, self.n - 1, from)
    }

    fn query(&mut self, node: usize, l: usize, r: usize, from: usize) -> Lin {
        if l >= from {
            return self.min[node];
        }
        self.push(node);
        let m = (l + r) / 2;
        if from > m {
            self.query(2 * node + 1, m + 1, r, from)
        } else {
            self.query(2 * node, l, m, from)
                .min(self.min[2 * node + 1])
        }
    }
}

impl Problem<'_> {
    fn total(&self) -> f64 {
        self.c.iter().zip(self.big_m).map(|(c, m)| c * m).sum()
    }

    /// Smallest level at which `m = M` is feasible.
    fn z_max(&self) -> f64 {
        match self.caps {
            Caps::Prefix(x) => {
                let mut acc = 0.0;
                let mut best: f64 = 0.0;
                for (m, x) in self.big_m.iter().zip(x) {
                    acc += m;
                    best = best.max(acc / x);
                }
                best
            }
            Caps::Cell(len) => self
                .big_m
                .iter()
                .zip(len)
                .map(|(m, l)| m / l)
                .fold(0.0, f64::max),
        }
    }

    /// Greedy allocation at level `z`: `(G(z), G'(z+))` and the masses.
    fn allocate(&self, z: f64, order: Option<&[usize]>) -> (Lin, Vec<Lin>) {
        let n = self.c.len();
        let mut m = vec![Lin::ZERO; n];
        match (self.caps, order) {
            (Caps::Cell(len), _) => {
                for i in 0..n {
                    m[i] = Lin { v: self.big_m[i], s: 0.0 }.min(Lin {
                        v: z * len[i],
                        s: len[i],
                    });
                }
            }
            (Caps::Prefix(x), None) => {
                // c non-increasing: the binding prefix for cell i is i itself
                let mut p = Lin::ZERO;
                for i in 0..n {
                    let full = p.add(Lin { v: self.big_m[i], s: 0.0 });
                    let cap = Lin { v: z * x[i], s: x[i] };
                    let next = full.min(cap);
                    m[i] = next.sub(p);
                    p = next;
                }
            }
            (Caps::Prefix(x), Some(order)) => {
                let init: Vec<Lin> = x.iter().map(|&x| Lin { v: z * x, s: x }).collect();
                let mut tree = MinTree::new(&init);
                for &i in order {
                    let slack = tree.min_from(i);
                    let mi = Lin { v: self.big_m[i], s: 0.0 }.min(slack);
                    let mi = if mi.v < 0.0 { Lin::ZERO } else { mi };
                    m[i] = mi;
                    tree.add_from(i, mi.scale(-1.0));
                }
            }
        }
        let g = m
            .iter()
            .zip(self.c)
            .fold(Lin::ZERO, |acc, (mi, c)| acc.add(mi.scale(*c)));
        (g, m)
    }

    /// Minimises `φ(z)` over `[0, z_max]`.
    pub fn solve(&self, t: f64, rel_tol: f64) -> Result<Solution> {
        let n = self.c.len();
        if n == 0 {
            return Err(Error::Solver("empty mesh".into()));
        }
        if self.c.iter().chain(self.big_m).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Solver("costs and masses must be finite and nonnegative".into()));
        }
        let monotone = self.c.windows(2).all(|w| w[1] <= w[0]);
        let order: Option<Vec<usize>> = (!monotone).then(|| {
            let mut o: Vec<usize> = (0..n).collect();
            o.sort_by(|&a, &b| self.c[b].total_cmp(&self.c[a]).then(a.cmp(&b)));
            o
        });
        let total = self.total();
        let phi = |z: f64| {
            let (g, m) = self.allocate(z, order.as_deref());
            (total - g.v + t * z, t - g.s, m)
        };
        let zmax = self.z_max();
        let (f0, d0, m0) = phi(0.0);
        if zmax == 0.0 || d0 >= 0.0 {
            return Ok(Solution {
                value: f0,
                lower: f0,
                masses: m0.iter().map(|l| l.v).collect(),
            });
        }
        let (mut lo, mut hi) = (0.0, zmax);
        let (mut flo, mut dlo) = (f0, d0);
        let (fz, dz, _) = phi(zmax);
        let (mut fhi, mut dhi) = (fz, dz);
        for _ in 0..200 {
            if hi - lo <= 4.0 * f64::EPSILON * zmax {
                break;
            }
            // Kelley step: the supporting lines at lo and hi intersect at zc
            let zc = if dhi > dlo {
                (fhi - flo + dlo * lo - dhi * hi) / (dlo - dhi)
            } else {
                0.5 * (lo + hi)
            };
            let lower = flo + dlo * (zc - lo);
            let upper = flo.min(fhi);
            if upper - lower <= rel_tol * upper.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            // alternate Kelley and bisection points so the bracket always halves
            let w = hi - lo;
            let mid = if zc > lo + 0.05 * w && zc < hi - 0.05 * w { zc } else { 0.5 * (lo + hi) };
            let (fm, dm, _) = phi(mid);
            if dm >= 0.0 {
                hi = mid;
                fhi = fm;
                dhi = dm;
            } else {
                lo = mid;
                flo = fm;
                dlo = dm;
            }
            if hi - lo > 0.5 * w {
                let mid = 0.5 * (lo + hi);
                let (fm, dm, _) = phi(mid);
                if dm >= 0.0 {
                    hi = mid;
                    fhi = fm;
                    dhi = dm;
                } else {
                    lo = mid;
                    flo = fm;
                    dlo = dm;
                }
            }
        }
        let zc = if dhi > dlo {
            ((fhi - flo + dlo * lo - dhi * hi) / (dlo - dhi)).clamp(lo, hi)
        } else {
            hi
        };
        let lower = (flo + dlo * (zc - lo)).max(fhi + dhi * (zc - hi));
        let (fc, _, mc) = phi(zc);
        let (mut best, mut m) = (fc, mc);
        for cand in [lo, hi] {
            let (fv, _, mv) = phi(cand);
            if fv < best {
                best = fv;
                m = mv;
            }
        }
        let gap = best - lower;
        if gap > rel_tol * best.abs().max(1e-300) + 1e-14 * total {
            return Err(Error::Solver(format!(
                "duality gap {gap:e} above tolerance at value {best:e}"
            )));
        }
        Ok(Solution {
            value: best,
            lower: lower.min(best),
            masses: m.iter().map(|l| l.v.clamp(0.0, f64::INFINITY)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: &Problem, t: f64) -> f64 {
        // scan z finely and use the same greedy: checks the bisection only
        let zmax = p.z_max();
        (0..=20000)
            .map(|k| {
                let z = zmax * k as f64 / 20000.0;
                let (g, _) = p.allocate(z, None);
                p.total() - g.v + t * z
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn bisection_matches_scan() {
        let c = [3.0, 2.0, 1.5, 0.5];
        let big_m = [0.2, 0.1, 0.4, 0.3];
        let x = [0.1, 0.3, 0.6, 1.0];
        let p = Problem {
            c: &c,
            big_m: &big_m,
            caps: Caps::Prefix(&x),
        };
        for t in [0.01, 0.1, 0.5, 1.0, 3.0] {
            let s = p.solve(t, 1e-12).unwrap();
            let b = brute(&p, t);
            assert!(s.value <= b + 1e-12 && s.value >= b - 1e-3, "{t}: {} vs {b}", s.value);
        }
    }

    #[test]
    fn tree_order_agrees_with_fast_path() {
        let c = [3.0, 2.0, 1.5, 0.5, 0.25];
        let big_m = [0.2, 0.1, 0.4, 0.3, 0.9];
        let x = [0.1, 0.3, 0.6, 0.8, 1.0];
        let p = Problem {
            c: &c,
            big_m: &big_m,
            caps: Caps::Prefix(&x),
        };
        let order: Vec<usize> = (0..5).collect();
        for z in [0.0, 0.3, 0.7, 1.1, 2.5] {
            let (a, _) = p.allocate(z, None);
            let (b, _) = p.allocate(z, Some(&order));
            assert!((a.v - b.v).abs() < 1e-14 && (a.s - b.s).abs() < 1e-14);
        }
    }

    #[test]
    fn cell_caps_are_pointwise() {
        // L1/L∞ with a single cell: K = min(m, t·m/len) for c = 1
        let p = Problem {
            c: &[1.0],
            big_m: &[0.5],
            caps: Caps::Cell(&[0.5]),
        };
        let s = p.solve(0.2, 1e-12).unwrap();
        assert!((s.value - 0.2).abs() < 1e-12);
    }
}
