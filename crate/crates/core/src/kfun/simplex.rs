//! Dense tableau simplex for small problems `max cᵀx, Ax ≤ b, x ≥ 0` with
//! `b ≥ 0`, using Bland's rule.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers of the rows of `A`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    /// `(primal residual, dual residual, |cᵀx − bᵀy|)`.
    pub fn certificate(&self, c: &[f64], a: &[Vec<f64>], b: &[f64]) -> (f64, f64, f64) {
        let mut primal = self.x.iter().fold(0.0f64, |r, &x| r.max(-x));
        for (row, bi) in a.iter().zip(b) {
            let ax: f64 = row.iter().zip(&self.x).map(|(a, x)| a * x).sum();
            primal = primal.max(ax - bi);
        }
        let mut dual = self.duals.iter().fold(0.0f64, |r, &y| r.max(-y));
        for (j, cj) in c.iter().enumerate() {
            let aty: f64 = a.iter().zip(&self.duals).map(|(row, y)| row[j] * y).sum();
            dual = dual.max(cj - aty);
        }
        let by: f64 = b.iter().zip(&self.duals).map(|(b, y)| b * y).sum();
        (primal, dual, (self.objective - by).abs())
    }
}

const EPS: f64 = 1e-12;

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Solver("constraint matrix has the wrong shape".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Solver("right-hand side must be finite and nonnegative".into()));
    }
    if c.iter().chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite coefficient".into()));
    }
    let width = n + m;
    // row i: [A | I], rhs separately
    let mut tab: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.resize(width, 0.0);
            r[n + i] = 1.0;
            r
        })
        .collect();
    let mut rhs = b.to_vec();
    let mut red: Vec<f64> = c.to_vec();
    red.resize(width, 0.0);
    let mut basis: Vec<usize> = (n..width).collect();
    let mut obj = 0.0;
    let scale = c.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let cap = 50 * (width + 1);
    let mut it = 0;
    while let Some(enter) = (0..width).find(|&j| red[j] > EPS * scale) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let aij = tab[i][enter];
            if aij > EPS {
                let ratio = rhs[i] / aij;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - EPS * best.abs().max(1.0)
                            || (ratio <= best + EPS * best.abs().max(1.0) && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::Solver("unbounded linear program".into()));
        };
        let piv = tab[r][enter];
        for v in tab[r].iter_mut() {
            *v /= piv;
        }
        rhs[r] /= piv;
        let prow = tab[r].clone();
        for i in 0..m {
            if i != r {
                let f = tab[i][enter];
                if f != 0.0 {
                    for (v, p) in tab[i].iter_mut().zip(&prow) {
                        *v -= f * p;
                    }
                    rhs[i] = (rhs[i] - f * rhs[r]).max(0.0);
                }
            }
        }
        let f = red[enter];
        for (v, p) in red.iter_mut().zip(&prow) {
            *v -= f * p;
        }
        obj += f * rhs[r];
        basis[r] = enter;
        it += 1;
        if it > cap {
            return Err(Error::Solver("simplex iteration cap reached".into()));
        }
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = rhs[i];
        }
    }
    let duals = (0..m).map(|i| (-red[n + i]).max(0.0)).collect();
    Ok(LpSolution {
        x,
        objective: obj,
        duals,
        iterations: it,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let (b, c) = ([4.0, 12.0, 18.0], [3.0, 5.0]);
        let s = maximize(&c, &a, &b).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        let (p, d, gap) = s.certificate(&c, &a, &b);
        assert!(p < 1e-12 && d < 1e-12 && gap < 1e-12);
    }

    #[test]
    fn detects_unbounded() {
        let a = vec![vec![1.0, -1.0]];
        assert!(maximize(&[0.0, 1.0], &a, &[1.0]).is_err());
    }

    #[test]
    fn degenerate_problem_terminates() {
        let a = vec![
            vec![0.5, -5.5, -2.5, 9.0],
            vec![0.5, -1.5, -0.5, 1.0],
            vec![1.0, 0.0, 0.0, 0.0],
        ];
        let s = maximize(&[10.0, -57.0, -9.0, -24.0], &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
