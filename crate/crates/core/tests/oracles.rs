//! Independent oracles: closed-form cell integrals, brute-force maxima,
//! high-precision constants, and randomized properties.

use approx::assert_relative_eq;
use proptest::prelude::*;

use ces_interp::funcore::{rearrange, t_zero, tau1, Domain, StepFunction};
use ces_interp::kfun::{k_closed, k_l1_linf, k_weighted_l1, split_bounds, Couple};
use ces_interp::norms::{ces_norm, cop_norm, lp_weighted, weighted_l1, QuadConfig, Weight};
use ces_interp::operators::{cesaro, copson, maximal, PiecewiseSmooth};

fn q() -> QuadConfig {
    QuadConfig::default()
}

/// `∫ (Cf)²` cell by cell: on `(a, b]`, `Cf = v + c/x` with `c = F(a) − va`.
fn ces2_exact(f: &StepFunction) -> f64 {
    let mut big_f = 0.0;
    let mut s = 0.0;
    for (a, b, v) in f.cells() {
        let c = big_f - v * a;
        s += v * v * (b - a);
        if a > 0.0 {
            s += 2.0 * v * c * (b / a).ln() + c * c * (1.0 / a - 1.0 / b);
        }
        big_f += v * (b - a);
    }
    s
}

/// `∫ (C*f)²` cell by cell: on `(a, b]`, `C*f = G(b) + v ln(b/x)`.
fn cop2_exact(f: &StepFunction) -> f64 {
    let cells: Vec<_> = f.cells().collect();
    let mut g = 0.0;
    let mut s = 0.0;
    for &(a, b, v) in cells.iter().rev() {
        let l1 = |x: f64| if x == 0.0 { 0.0 } else { x * ((b / x).ln() + 1.0) };
        let l2 = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                let l = (b / x).ln();
                x * (l * l + 2.0 * l + 2.0)
            }
        };
        s += g * g * (b - a) + 2.0 * g * v * (l1(b) - l1(a)) + v * v * (l2(b) - l2(a));
        if a > 0.0 {
            g += v * (b / a).ln();
        }
    }
    s
}

fn sample() -> Vec<StepFunction> {
    vec![
        StepFunction::constant(Domain::UnitInterval, 1.0).unwrap(),
        StepFunction::unit(vec![0.0, 0.1, 0.6, 1.0], vec![2.0, 0.0, 5.0]).unwrap(),
        StepFunction::unit(vec![0.0, 1e-6, 1e-3, 0.5, 1.0], vec![1e3, 1e-3, 7.0, 0.25]).unwrap(),
        StepFunction::indicator(Domain::UnitInterval, 0.0, (-8f64).exp()).unwrap(),
    ]
}

#[test]
fn l2_norms_match_cell_integrals() {
    for f in sample() {
        assert_relative_eq!(ces_norm(&f, 2.0, &q()).unwrap(), ces2_exact(&f).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(cop_norm(&f, 2.0, &q()).unwrap(), cop2_exact(&f).sqrt(), max_relative = 1e-12);
    }
}

#[test]
fn copson_mass_identity() {
    for f in sample() {
        let m = lp_weighted(&copson(&f), 1.0, &Weight::One, &q()).unwrap();
        assert_relative_eq!(m, f.integral(), max_relative = 1e-10);
    }
}

#[test]
fn maximal_function_against_brute_force() {
    let f = StepFunction::unit(vec![0.0, 0.2, 0.35, 0.7, 1.0], vec![1.0, 6.0, 0.5, 3.0]).unwrap();
    let n = 700;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    for &x in &[0.05, 0.2, 0.3, 0.5, 0.69, 0.95] {
        let mut brute: f64 = 0.0;
        for &a in grid.iter().filter(|&&a| a <= x) {
            for &b in grid.iter().filter(|&&b| b >= x && b > a) {
                brute = brute.max((f.primitive_at(b) - f.primitive_at(a)) / (b - a));
            }
        }
        let m = maximal(&f, x).unwrap();
        // the grid contains every breakpoint, so the supremum is found exactly
        assert_relative_eq!(m, brute, max_relative = 1e-12);
    }
}

#[test]
fn high_precision_constants() {
    assert!((t_zero() - 0.689_045_060_788_817).abs() < 1e-13);
    assert!((tau1(0.5) - 0.295_308_054_574_820).abs() < 1e-14);
    let one = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
    let b = split_bounds(0.5, &one).unwrap();
    assert!((b.a - 0.745_709_993_663_085).abs() < 1e-12);
    assert!((b.b - 0.513_119_329_013_419).abs() < 1e-12);
    assert!((b.lower - 0.067_821_224_033_936_1).abs() < 1e-13);
    assert!((b.upper - 1.002_269_658_169_79).abs() < 1e-12);
}

fn step_strategy() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.01f64..1.0, -3.0f64..3.0), 1..12).prop_map(|cells| {
        let total: f64 = cells.iter().map(|c| c.0).sum();
        let mut breaks = vec![0.0];
        let mut acc = 0.0;
        let mut vals = Vec::new();
        for (i, (w, lv)) in cells.iter().enumerate() {
            acc += w / total;
            breaks.push(if i + 1 == cells.len() { 1.0 } else { acc });
            vals.push(10f64.powf(*lv));
        }
        StepFunction::unit(breaks, vals).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hardy_and_copson(f in step_strategy(), p in 1.2f64..8.0) {
        let fp = f.power_integral(p).powf(1.0 / p);
        let c = lp_weighted(&cesaro(&f), p, &Weight::One, &q()).unwrap();
        let s = lp_weighted(&copson(&f), p, &Weight::One, &q()).unwrap();
        prop_assert!(c <= p / (p - 1.0) * fp * (1.0 + 1e-10));
        prop_assert!(s <= p * fp * (1.0 + 1e-10));
    }

    #[test]
    fn closed_k_is_concave_and_bounded(f in step_strategy(), t in 1e-3f64..5.0) {
        let couples = [
            Couple::WeightedL1 { w0: Weight::One, w1: Weight::InvT },
            Couple::WeightedL1 { w0: Weight::LogE, w1: Weight::One },
            Couple::L1Linf,
        ];
        for c in &couples {
            let k = k_closed(t, &f, c).unwrap();
            let k2 = k_closed(2.0 * t, &f, c).unwrap();
            let x0 = c.x0_norm(&f).unwrap();
            let x1 = c.x1_norm(&f).unwrap();
            prop_assert!(k <= k2 * (1.0 + 1e-12));
            prop_assert!(k2 / (2.0 * t) <= k / t * (1.0 + 1e-12));
            prop_assert!(k <= x0.min(t * x1) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn weighted_k_is_pointwise_minimum(f in step_strategy(), t in 1e-3f64..2.0) {
        // oracle: midpoint sums of f·min(1, t/x) on each cell split at t,
        // in x from 0 and in u = ln x elsewhere (dx = x du)
        let n = 4000;
        let mut s = 0.0;
        for (a, b, v) in f.cells() {
            let mut ends = vec![a, b];
            if a < t && t < b {
                ends.insert(1, t);
            }
            for w in ends.windows(2) {
                if w[0] == 0.0 {
                    let h = w[1] / n as f64;
                    s += (0..n).map(|i| v * (1.0f64).min(t / ((i as f64 + 0.5) * h)) * h).sum::<f64>();
                    continue;
                }
                let (u0, du) = (w[0].ln(), (w[1] / w[0]).ln() / n as f64);
                for i in 0..n {
                    let x = (u0 + (i as f64 + 0.5) * du).exp();
                    s += v * x.min(t) * du;
                }
            }
        }
        let k = k_weighted_l1(t, &f, &Weight::One, &Weight::InvT);
        prop_assert!((k - s).abs() <= 1e-6 * k, "{} vs {}", k, s);
    }

    #[test]
    fn l1_linf_is_integral_of_rearrangement(f in step_strategy(), t in 0.0f64..1.0) {
        let r = rearrange(&f);
        prop_assert!(r.is_nonincreasing());
        prop_assert!((r.integral() - f.integral()).abs() <= 1e-12 * f.integral());
        let k = k_l1_linf(t, &f);
        prop_assert!((k - r.primitive_at(t)).abs() <= 1e-12 * f.integral().max(1e-12));
    }

    #[test]
    fn ces1_is_log_weighted_l1(f in step_strategy()) {
        let a = ces_norm(&f, 1.0, &q()).unwrap();
        let b = lp_weighted(&PiecewiseSmooth::from(&f), 1.0, &Weight::LogInv, &q()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!((a - weighted_l1(&f, &Weight::LogInv)).abs() <= 1e-15 * a.max(1.0));
    }
}
