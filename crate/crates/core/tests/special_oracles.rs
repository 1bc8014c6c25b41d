use proptest::prelude::*;
use statrs::function::{beta::beta_reg, gamma::ln_gamma};
use weibull_ratio::special::{beta_inc, ln_beta, log_gamma};

#[test]
fn log_gamma_matches_statrs_on_a_grid() {
    let mut x = 1e-4;
    while x < 1e5 {
        let want = ln_gamma(x);
        let got = log_gamma(x).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "x = {x}: {got} vs {want}");
        x *= 1.173;
    }
}

#[test]
fn beta_inc_matches_statrs() {
    for &(a, b) in &[(0.5, 0.5), (1.0, 3.0), (2.5, 7.0), (21.0, 21.0), (101.0, 101.0), (501.0, 501.0)] {
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let want = beta_reg(a, b, x);
            let got = beta_inc(a, b, x).unwrap();
            assert!((got - want).abs() < 1e-12, "I_{x}({a}, {b}): {got} vs {want}");
        }
    }
}

proptest! {
    #[test]
    fn ln_beta_is_symmetric_and_consistent(a in 0.05f64..200.0, b in 0.05f64..200.0) {
        let ab = ln_beta(a, b).unwrap();
        prop_assert!((ab - ln_beta(b, a).unwrap()).abs() <= 1e-12 * ab.abs().max(1.0));
        let want = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
        prop_assert!((ab - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn beta_inc_reflection(a in 0.2f64..60.0, b in 0.2f64..60.0, x in 0.0f64..=1.0) {
        let lhs = beta_inc(a, b, x).unwrap() + beta_inc(b, a, 1.0 - x).unwrap();
        prop_assert!((lhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_inc_is_monotone(a in 0.2f64..60.0, b in 0.2f64..60.0, x in 0.0f64..1.0, dx in 0.0f64..0.1) {
        let y = (x + dx).min(1.0);
        prop_assert!(beta_inc(a, b, x).unwrap() <= beta_inc(a, b, y).unwrap() + 1e-15);
    }
}
