//! Independent reference implementations shared by the integration tests.
//! Everything here is computed from first principles (plus `statrs` for
//! log-gamma), never through the crate's own numerics.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

/// Composite Simpson rule with `2 * half` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, half: usize) -> f64 {
    let n = 2 * half;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// CDF of the Inverted-Beta law with both shapes `kn + 1`, by integrating on
/// the Beta scale `v / (1 + v) ~ Beta(kn + 1, kn + 1)`.
pub fn ib_cdf_oracle(v: f64, kn: u64) -> f64 {
    let a = kn as f64 + 1.0;
    let ln_b = 2.0 * ln_gamma(a) - ln_gamma(2.0 * a);
    let t = v / (1.0 + v);
    let dens = |s: f64| {
        if a == 1.0 {
            1.0
        } else if s <= 0.0 || s >= 1.0 {
            0.0
        } else {
            ((a - 1.0) * (s.ln() + (1.0 - s).ln()) - ln_b).exp()
        }
    };
    if t <= 0.5 {
        simpson(dens, 0.0, t, 20_000)
    } else {
        1.0 - simpson(dens, t, 1.0, 20_000)
    }
}

/// Log of the shape kernel straight from the raw observations:
/// `β^kn p^β Π x^(β-1) / (p^β + ln(1/R) Σ x^β)^(kn+1)`.
pub fn ln_kernel_direct(xs: &[f64], p: f64, r: f64, beta: f64) -> f64 {
    let kn = xs.len() as f64;
    let sum: f64 = xs.iter().map(|x| x.powf(beta)).sum();
    let logs: f64 = xs.iter().map(|x| x.ln()).sum();
    kn * beta.ln() + beta * p.ln() + (beta - 1.0) * logs - (kn + 1.0) * (p.powf(beta) + (1.0 / r).ln() * sum).ln()
}

/// Shape posterior mean on `[lo, hi]` by a 10^5-node trapezoid rule.
pub fn beta_mean_trapezoid(xs: &[f64], p: f64, r: f64, lo: f64, hi: f64) -> f64 {
    const NODES: usize = 100_000;
    let h = (hi - lo) / (NODES - 1) as f64;
    let grid: Vec<f64> = (0..NODES).map(|i| lo + h * i as f64).collect();
    let lk: Vec<f64> = grid.iter().map(|&b| ln_kernel_direct(xs, p, r, b)).collect();
    let peak = lk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut mass, mut moment) = (0.0, 0.0);
    for (i, (&b, &l)) in grid.iter().zip(&lk).enumerate() {
        let w = if i == 0 || i == NODES - 1 { 0.5 } else { 1.0 };
        let k = (l - peak).exp();
        mass += w * k;
        moment += w * k * b;
    }
    moment / mass
}

/// Ratio density via `w = v/(1+v) ~ Beta(kn+1, kn+1)`, `v = c u^β`.
pub fn ratio_pdf_oracle(u: f64, c: f64, beta: f64, kn: u64) -> f64 {
    let a = kn as f64 + 1.0;
    let v = c * u.powf(beta);
    let w = v / (1.0 + v);
    let ln_beta_pdf = (a - 1.0) * (w.ln() + (1.0 - w).ln()) - (2.0 * ln_gamma(a) - ln_gamma(2.0 * a));
    ln_beta_pdf.exp() / (1.0 + v).powi(2) * beta * c * u.powf(beta - 1.0)
}

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(mut xs: Vec<f64>, cdf: F) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic (large-sample form).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

pub fn flat(samples: &[Vec<f64>]) -> Vec<f64> {
    samples.iter().flatten().copied().collect()
}
