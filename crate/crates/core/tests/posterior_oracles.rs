mod common;

use common::{beta_mean_trapezoid, flat, ks_critical_1pct, ks_statistic, ratio_pdf_oracle};
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;
use weibull_ratio::chart::{phase1_train, ChartConfig, ChartPoint};
use weibull_ratio::distributions::{inverted_beta_cdf, InvertedBetaParams, ReliabilityLevel};
use weibull_ratio::io::fixtures;
use weibull_ratio::posterior::{
    beta_posterior_mean, percentile_posterior_mean, pivot, ratio_pdf, ratio_pdf_via_pivot, BetaInterval,
    PriorSpec, ProcessHistory,
};
use weibull_ratio::simulator::{train_in_control, ArlScenario};

fn r95() -> ReliabilityLevel {
    ReliabilityLevel::new(0.95).unwrap()
}

#[test]
fn shape_posterior_mean_matches_trapezoid() {
    let t1 = fixtures::table1();
    let t2 = fixtures::table2();
    let cases: [(&[Vec<f64>], f64, f64, f64); 5] = [
        (&t1[..1], 2.9, 2.5, 7.5),
        (&t1[..10], 2.9, 2.5, 7.5),
        (&t2[..10], 3.8, 3.0, 9.0),
        (&t1[..25], 2.9, 4.0, 12.0),
        (&t2[..3], 1.0, 0.5, 1.5),
    ];
    for (samples, p, lo, hi) in cases {
        let h = ProcessHistory::from_samples(4, samples).unwrap();
        let got = beta_posterior_mean(&h, p, r95(), BetaInterval::new(lo, hi).unwrap()).unwrap();
        let want = beta_mean_trapezoid(&flat(samples), p, 0.95, lo, hi);
        assert!((got - want).abs() <= 1e-6 * want, "{} samples, p {p}: {got} vs {want}", samples.len());
    }
}

/// Posterior mean of `x_R` given the shape: `1/x_R^β ~ Gamma(kn + 1, A(β))`,
/// so `E[x_R] = E[G^(-1/β)]`, integrated on the log scale.
fn percentile_mean_quadrature(xs: &[f64], p: f64, r: f64, beta: f64) -> f64 {
    let a = xs.len() as f64 + 1.0;
    let rate = p.powf(beta) + (1.0 / r).ln() * xs.iter().map(|x| x.powf(beta)).sum::<f64>();
    // s = ln(rate * g); integrand in s is exp((a - 1/β) s - e^s) / Γ(a) · rate^(1/β).
    let f = |s: f64| ((a - 1.0 / beta) * s - s.exp() - ln_gamma(a)).exp();
    let centre = (a - 1.0 / beta).ln();
    let (lo, hi) = (centre - 40.0 / a.sqrt() - 10.0, centre + 40.0 / a.sqrt() + 3.0);
    let n = 200_000;
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + h * i as f64);
    }
    sum * h / 3.0 * rate.powf(1.0 / beta)
}

#[test]
fn percentile_mean_matches_inverse_gamma_quadrature() {
    let t1 = fixtures::table1();
    for (k, beta) in [(1usize, 5.0), (5, 4.2), (10, 6.1), (25, 3.0)] {
        let h = ProcessHistory::from_samples(4, &t1[..k]).unwrap();
        let got = percentile_posterior_mean(&h, 2.9, r95(), beta).unwrap();
        let want = percentile_mean_quadrature(&flat(&t1[..k]), 2.9, 0.95, beta);
        assert!((got - want).abs() <= 1e-9 * want, "k {k}: {got} vs {want}");
    }
}

#[test]
fn ratio_pdf_integrates_to_one() {
    for &(c, beta, kn) in &[(1.0f64, 3.0f64, 0u64), (0.4, 5.0, 40), (2.3, 4.3, 100), (1.7, 1.2, 5)] {
        // Integrate in v = c u^β over the Inverted-Beta bulk, mapped back to u.
        let (u_lo, u_hi) = ((1e-12 / c).powf(1.0 / beta), (1e6 / c).powf(1.0 / beta));
        let n = 400_000;
        let (a, b) = (u_lo.ln(), u_hi.ln());
        let h = (b - a) / n as f64;
        let f = |s: f64| ratio_pdf(s.exp(), c, beta, kn).unwrap() * s.exp();
        let mut sum = f(a) + f(b);
        for i in 1..n {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
        }
        let total = sum * h / 3.0;
        assert!((total - 1.0).abs() < 1e-6, "c {c}, β {beta}, kn {kn}: {total}");
    }
}

proptest! {
    #[test]
    fn ratio_pdf_matches_change_of_variables(
        u in 0.5f64..1.6, c in 0.3f64..3.0, beta in 0.8f64..8.0, kn in 0u64..200
    ) {
        let v = c * u.powf(beta);
        prop_assume!(v > 0.2 && v < 5.0);
        let got = ratio_pdf(u, c, beta, kn).unwrap();
        let want = ratio_pdf_oracle(u, c, beta, kn);
        prop_assume!(want > 1e-200);
        prop_assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
        let via = ratio_pdf_via_pivot(u, c, beta, kn).unwrap();
        prop_assert!((got - via).abs() <= 1e-10 * want);
    }
}

fn train(x: &[Vec<f64>], y: &[Vec<f64>], prior: PriorSpec) -> Vec<ChartPoint> {
    phase1_train(x, y, ChartConfig::new(4, x.len()), prior).unwrap().1
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Rescaling every observation and both anticipated percentiles by `s`
/// leaves the shape, the ratio estimate and the limits unchanged.
#[test]
fn chart_is_scale_equivariant() {
    let x = fixtures::table1()[..10].to_vec();
    let y = fixtures::table2()[..10].to_vec();
    let base = train(&x, &y, PriorSpec::new(2.9, 3.8, 5.0, r95()).unwrap());
    for s in [0.01, 0.37, 3.0, 250.0] {
        let scale = |d: &[Vec<f64>]| d.iter().map(|v| v.iter().map(|t| t * s).collect()).collect::<Vec<Vec<f64>>>();
        let scaled = train(&scale(&x), &scale(&y), PriorSpec::new(2.9 * s, 3.8 * s, 5.0, r95()).unwrap());
        for (a, b) in base.iter().zip(&scaled) {
            assert!(close(a.beta_bar, b.beta_bar, 1e-10), "s {s}: β̄ {} vs {}", a.beta_bar, b.beta_bar);
            assert!(close(a.u_hat, b.u_hat, 1e-10), "s {s}: u {} vs {}", a.u_hat, b.u_hat);
            assert!(close(a.lcl, b.lcl, 1e-10) && close(a.ucl, b.ucl, 1e-10), "s {s}: limits");
        }
    }
}

/// Exchanging the processes inverts the ratio and mirrors the limits.
#[test]
fn swapping_processes_inverts_the_ratio() {
    let x = fixtures::table1()[..10].to_vec();
    let y = fixtures::table2()[..10].to_vec();
    let a = train(&x, &y, PriorSpec::new(2.9, 3.8, 5.0, r95()).unwrap());
    let b = train(&y, &x, PriorSpec::new(3.8, 2.9, 5.0, r95()).unwrap());
    for (p, q) in a.iter().zip(&b) {
        assert!(close(p.u_hat * q.u_hat, 1.0, 1e-10));
        assert!(close(p.lcl * q.ucl, 1.0, 1e-8) && close(p.ucl * q.lcl, 1.0, 1e-8));
    }
}

/// At the end of Phase I on in-control draws (u = 1), the pivot
/// `v = C(m)` should follow the Inverted-Beta law with `kn = m n`.
#[test]
fn pivot_is_inverted_beta_in_control() {
    let scenario = ArlScenario::in_control(2000, 7);
    let kn = (scenario.m * scenario.n) as u64;
    let ib = InvertedBetaParams::new(kn);
    let v: Vec<f64> = (0..scenario.n_runs as u64)
        .map(|i| {
            let st = train_in_control(&scenario, i).unwrap();
            let snap = st.snapshots().last().unwrap();
            pivot(1.0, snap.beta_bar_k, snap.c_k)
        })
        .collect();
    let d = ks_statistic(v, |x| inverted_beta_cdf(x, ib).unwrap());
    let crit = ks_critical_1pct(scenario.n_runs);
    println!("pivot KS D = {d:.4} (1% critical {crit:.4})");
    assert!(d < crit);
}
