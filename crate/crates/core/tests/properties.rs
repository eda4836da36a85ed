use genlambert::branching::{extinction_pgf_iteration, extinction_via_lambert, BranchingParams};
use genlambert::distribution::{cdf, moment_quadrature, quantile, sf};
use genlambert::series::{euler_sum_s_capped, zeta_real_capped};
use genlambert::*;
use proptest::prelude::*;

fn solve(x: f64, beta: f64) -> EvalResult {
    eval_y(
        x,
        &LambertParams::new(beta).unwrap(),
        &EvalOptions::default(),
    )
    .unwrap()
}

fn log_x() -> impl Strategy<Value = f64> {
    (-3.0f64..1.7).prop_map(|e| 10f64.powf(e))
}

fn beta() -> impl Strategy<Value = f64> {
    1.05f64..6.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solution_satisfies_equation(x in log_x(), b in beta()) {
        let r = solve(x, b);
        let lhs = r.value.powf(b);
        let rhs = -(-x * r.value).exp_m1();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-11);
    }

    #[test]
    fn inverse_round_trip(x in log_x(), b in beta()) {
        let p = LambertParams::new(b).unwrap();
        let r = eval_y(x, &p, &EvalOptions::default()).unwrap();
        prop_assert!((r.inverse(&p) - x).abs() / x < 1e-8);
    }

    #[test]
    fn bounds_bracket_solution(x in log_x(), b in beta()) {
        let p = LambertParams::new(b).unwrap();
        let r = eval_y(x, &p, &EvalOptions::default()).unwrap();
        prop_assert!(bracket(x, &p).unwrap().strictly_contains(&r));
        if r.value < 0.5 {
            prop_assert!(lower_bound(x, &p).unwrap() < r.value);
            prop_assert!(r.value < upper_bound(x, &p).unwrap());
        }
    }

    #[test]
    fn increasing_in_x(x in log_x(), b in beta(), f in 1.01f64..2.0) {
        prop_assert!(solve(x * f, b).value >= solve(x, b).value);
    }

    #[test]
    fn increasing_in_beta(x in log_x(), b in beta(), d in 0.01f64..1.0) {
        prop_assert!(solve(x, b + d).value >= solve(x, b).value);
    }

    // The residual stop controls the relative error only up to 1 / (1 - g) with
    // g the contraction factor at the root, which approaches 1 as beta -> 1.
    #[test]
    fn start_strategy_does_not_change_root(
        x in log_x(),
        b in beta(),
        theta in 0.01f64..1.0,
    ) {
        let p = LambertParams::new(b).unwrap();
        let reference = solve(x, b).value;
        for start in [
            StartStrategy::UpperBound,
            StartStrategy::LowerBound,
            StartStrategy::Midpoint,
            StartStrategy::constant(theta).unwrap(),
        ] {
            let r = eval_y(x, &p, &EvalOptions::default().with_start(start)).unwrap();
            prop_assert!((r.value - reference).abs() <= 1e-9 * reference, "{start}");
        }
    }

    #[test]
    fn contraction_at_root_below_alpha(x in log_x(), b in beta()) {
        let p = LambertParams::new(b).unwrap();
        let y = solve(x, b).value;
        prop_assert!(contraction_factor(y, x, &p).unwrap() <= p.alpha() * (1.0 + 1e-12));
    }

    #[test]
    fn fixed_point_map_is_idempotent_at_root(x in log_x(), b in beta()) {
        let p = LambertParams::new(b).unwrap();
        let y = solve(x, b).value;
        prop_assert!((fixed_point_map(y, x, &p).unwrap() - y).abs() < 1e-12);
    }

    #[test]
    fn cdf_quantile_round_trip(prob in 0.01f64..0.99, b in beta()) {
        let p = LambertParams::new(b).unwrap();
        let x = quantile(prob, &p).unwrap();
        prop_assert!((cdf(x, &p) - prob).abs() < 1e-10);
        prop_assert!((cdf(x, &p) + sf(x, &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extinction_agrees_and_decreases_in_lambda(
        lambda in 1.05f64..4.0,
        alpha in 0.3f64..0.95,
        d in 0.05f64..1.0,
    ) {
        let bp = BranchingParams::new(lambda, alpha).unwrap();
        let a = extinction_via_lambert(&bp, 1e-14).unwrap();
        let b = extinction_pgf_iteration(&bp, 1e-14, 1_000_000).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
        let more = BranchingParams::new(lambda + d, alpha).unwrap();
        prop_assert!(extinction_via_lambert(&more, 1e-14).unwrap() <= a);
    }
}

#[test]
fn moment_roots_non_decreasing() {
    for b in [1.25, 2.0, 4.0] {
        let p = LambertParams::new(b).unwrap();
        let mut prev = 0.0;
        for n in 1..=8 {
            let m = moment_quadrature(n, &p, 1e-10).unwrap().value;
            let root = m.powf(1.0 / n as f64);
            assert!(root >= prev * (1.0 - 1e-9), "beta {b}, n {n}");
            prev = root;
        }
    }
}

#[test]
fn series_tail_bounds_cover_error() {
    use std::f64::consts::PI;
    let zeta3 = 1.2020569031595942;
    let zetas = [(2.0, PI * PI / 6.0), (3.0, zeta3), (4.0, PI.powi(4) / 90.0)];
    let sums = [(2, 2.0 * zeta3), (3, PI.powi(4) / 72.0)];
    for tol in [1e-3, 1e-6, 1e-10] {
        for (s, exact) in zetas {
            let v = zeta_real_capped(s, tol, 1_000_000).unwrap();
            assert!(
                (v.value - exact).abs() <= v.tail_bound + 1e-15,
                "zeta({s}) at {tol}"
            );
            assert!(v.tail_bound <= tol);
        }
        for (k, exact) in sums {
            let v = euler_sum_s_capped(k, tol, 1_000_000).unwrap();
            assert!(
                (v.value - exact).abs() <= v.tail_bound + 1e-15,
                "S_{k} at {tol}"
            );
            assert!(v.tail_bound <= tol);
        }
    }
}
