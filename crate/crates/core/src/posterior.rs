//! Practical-Bayes posterior engine for two Weibull processes sharing a shape.
//!
//! For one process with observations `x_1..x_kn`, anticipated percentile `p`
//! and candidate shape `β`, the accumulator is
//!
//! ```text
//! A(β) = p^β + ln(1/R) Σ x_i^β
//! ```
//!
//! The anticipated percentile acts as a single pseudo-observation of `x_R`:
//! with `θ = x_R^β` given an inverse-gamma prior of unit shape and scale
//! `p^β`, the posterior of `θ` is inverse-gamma with shape `kn + 1` and scale
//! `A(β)`. Integrating `θ` out gives the shape kernel
//!
//! ```text
//! K(β) = β^kn p^β Π x_i^(β-1) A(β)^-(kn+1)
//! ```
//!
//! under a uniform prior on `[β₁, β₂]`. The posterior mean of `x_R` given a
//! shape is `Γ(kn + 1 - 1/β) / Γ(kn + 1) · A(β)^(1/β)`, and for two processes
//! with the same `kn` the pivot `u^β B(β)/A(β)` of the percentile ratio
//! `u = x_R / y_R` follows the Inverted-Beta law with both shapes `kn + 1`.

use serde::{Deserialize, Serialize};

use crate::distributions::{inverted_beta_pdf, inverted_beta_quantile, InvertedBetaParams, ReliabilityLevel};
use crate::error::{Error, Result};
use crate::power_sum::{ExactPowerSum, LogPowerSum, PowerSumCache};
use crate::quadrature::integrate_with_moment;
use crate::special::ln_gamma_unchecked;

/// Relative tolerance of the shape-posterior quadrature.
pub const BETA_QUAD_TOL: f64 = 1e-8;

/// Kernel values this far (in log units) below the mode are treated as zero.
const KERNEL_LOG_CUTOFF: f64 = 60.0;

/// Multipliers turning the previous shape estimate into the prior interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalFactors {
    pub low: f64,
    pub high: f64,
}

impl Default for IntervalFactors {
    fn default() -> Self {
        Self { low: 0.5, high: 1.5 }
    }
}

/// Anticipated percentiles and shape for the two processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub x_r_bar: f64,
    pub y_r_bar: f64,
    pub beta_bar: f64,
    pub r_level: ReliabilityLevel,
    #[serde(default)]
    pub interval_factors: IntervalFactors,
}

impl PriorSpec {
    pub fn new(x_r_bar: f64, y_r_bar: f64, beta_bar: f64, r_level: ReliabilityLevel) -> Result<Self> {
        let prior = Self {
            x_r_bar,
            y_r_bar,
            beta_bar,
            r_level,
            interval_factors: IntervalFactors::default(),
        };
        prior.validate()?;
        Ok(prior)
    }

    pub fn with_interval_factors(mut self, low: f64, high: f64) -> Result<Self> {
        self.interval_factors = IntervalFactors { low, high };
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x_r_bar", self.x_r_bar),
            ("y_r_bar", self.y_r_bar),
            ("beta_bar", self.beta_bar),
            ("interval low factor", self.interval_factors.low),
            ("interval high factor", self.interval_factors.high),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.interval_factors.low >= self.interval_factors.high {
            return Err(Error::domain(format!(
                "interval factors must satisfy low < high, got ({}, {})",
                self.interval_factors.low, self.interval_factors.high
            )));
        }
        Ok(())
    }
}

/// Ordered samples of one process, all of the same size `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "HistoryDoc", into = "HistoryDoc")]
pub struct ProcessHistory {
    n: usize,
    samples: Vec<Vec<f64>>,
    cache: PowerSumCache,
}

#[derive(Serialize, Deserialize)]
struct HistoryDoc {
    n: usize,
    samples: Vec<Vec<f64>>,
}

impl TryFrom<HistoryDoc> for ProcessHistory {
    type Error = Error;
    fn try_from(doc: HistoryDoc) -> Result<Self> {
        let mut h = ProcessHistory::new(doc.n)?;
        for s in doc.samples {
            h.push(&s)?;
        }
        Ok(h)
    }
}

impl From<ProcessHistory> for HistoryDoc {
    fn from(h: ProcessHistory) -> Self {
        HistoryDoc {
            n: h.n,
            samples: h.samples,
        }
    }
}

impl ProcessHistory {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("sample size must be at least 1".into()));
        }
        Ok(Self {
            n,
            samples: Vec::new(),
            cache: PowerSumCache::new(),
        })
    }

    pub fn from_samples(n: usize, samples: &[Vec<f64>]) -> Result<Self> {
        let mut h = Self::new(n)?;
        for s in samples {
            h.push(s)?;
        }
        Ok(h)
    }

    /// Appends one sample of exactly `n` positive observations.
    pub fn push(&mut self, sample: &[f64]) -> Result<()> {
        validate_sample(sample, self.n)?;
        self.cache.extend(sample.iter().map(|x| x.ln()));
        self.samples.push(sample.to_vec());
        Ok(())
    }

    /// Keeps only the last `w` samples.
    pub fn retain_last(&mut self, w: usize) {
        if w >= self.samples.len() {
            return;
        }
        self.samples.drain(..self.samples.len() - w);
        let logs: Vec<f64> = self.samples.iter().flatten().map(|x| x.ln()).collect();
        self.cache = PowerSumCache::from_log_observations(&logs);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of samples `k`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn log_observations(&self) -> &[f64] {
        self.cache.log_observations()
    }

    /// Direct-summation view of the same observations.
    pub fn exact(&self) -> ExactPowerSum<'_> {
        ExactPowerSum::new(self.cache.log_observations())
    }
}

impl LogPowerSum for ProcessHistory {
    fn count(&self) -> usize {
        self.cache.count()
    }

    fn sum_log(&self) -> f64 {
        self.cache.sum_log()
    }

    fn log_power_sum(&self, beta: f64) -> f64 {
        self.cache.log_power_sum(beta)
    }
}

pub(crate) fn validate_sample(sample: &[f64], n: usize) -> Result<()> {
    if sample.len() != n {
        return Err(Error::Shape(format!(
            "expected a sample of {n} observations, got {}",
            sample.len()
        )));
    }
    if let Some(bad) = sample.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::domain(format!("observations must be positive, got {bad}")));
    }
    Ok(())
}

/// Prior interval `[lo, hi]` for the shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaInterval {
    lo: f64,
    hi: f64,
}

impl BetaInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain(format!("invalid shape interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Posterior quantities after the `k`-th pair of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSnapshot {
    pub k: usize,
    pub interval: BetaInterval,
    pub beta_hat_x: f64,
    pub beta_hat_y: f64,
    pub beta_bar_k: f64,
    pub x_r_hat: f64,
    pub y_r_hat: f64,
    pub u_hat: f64,
    pub c_k: f64,
}

impl PosteriorSnapshot {
    /// `(β̂_x + β̂_y) / 2`, the per-step term of the running shape average.
    pub fn pair_mean(&self) -> f64 {
        0.5 * (self.beta_hat_x + self.beta_hat_y)
    }
}

/// `ln(e^a + e^b)`.
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln A(β) = ln(p^β + ln(1/R) Σ x_i^β)`.
pub fn ln_accumulator<S: LogPowerSum + ?Sized>(history: &S, prior_percentile: f64, r: ReliabilityLevel, beta: f64) -> f64 {
    let prior_term = beta * prior_percentile.ln();
    let data_term = r.log_inv().ln() + history.log_power_sum(beta);
    log_add_exp(prior_term, data_term)
}

/// `A(β) = p^β + ln(1/R) Σ x_i^β`.
pub fn accumulator<S: LogPowerSum + ?Sized>(history: &S, prior_percentile: f64, r: ReliabilityLevel, beta: f64) -> f64 {
    ln_accumulator(history, prior_percentile, r, beta).exp()
}

/// Log of the unnormalized shape kernel `K(β)`.
pub fn ln_beta_kernel<S: LogPowerSum + ?Sized>(history: &S, prior_percentile: f64, r: ReliabilityLevel, beta: f64) -> f64 {
    let kn = history.count() as f64;
    kn * beta.ln() + beta * prior_percentile.ln() + (beta - 1.0) * history.sum_log()
        - (kn + 1.0) * ln_accumulator(history, prior_percentile, r, beta)
}

/// Posterior mean of the shape over `interval` under a uniform prior.
///
/// The kernel is log-concave, so its mode is located by golden-section
/// search; the integration range is then trimmed to where the kernel is
/// within `e^-60` of its maximum and integrated adaptively with the mode as
/// a breakpoint.
pub fn beta_posterior_mean<S: LogPowerSum + ?Sized>(
    history: &S,
    prior_percentile: f64,
    r: ReliabilityLevel,
    interval: BetaInterval,
) -> Result<f64> {
    if !(prior_percentile > 0.0) {
        return Err(Error::domain(format!("prior percentile must be > 0, got {prior_percentile}")));
    }
    let (lo, hi) = (interval.lo, interval.hi);
    if lo == hi {
        return Ok(lo);
    }
    let lnk = |b: f64| ln_beta_kernel(history, prior_percentile, r, b);

    let mode = golden_section_max(&lnk, lo, hi, 1e-8 * (hi - lo));
    let peak = lnk(mode);
    let floor = peak - KERNEL_LOG_CUTOFF;
    let left = trim_point(&lnk, mode, lo, floor);
    let right = trim_point(&lnk, mode, hi, floor);

    let mut breaks = Vec::with_capacity(7);
    for i in 0..3 {
        breaks.push(left + (mode - left) * i as f64 / 3.0);
    }
    for i in 0..=3 {
        breaks.push(mode + (right - mode) * i as f64 / 3.0);
    }
    breaks.dedup();
    let (mass, moment) = integrate_with_moment(|b| (lnk(b) - peak).exp(), &breaks, BETA_QUAD_TOL);
    if !(mass > 0.0) {
        return Err(Error::domain("shape posterior has no mass on the interval"));
    }
    Ok((moment / mass).clamp(lo, hi))
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Where `f` falls to `level` between `mode` and the interval end `edge`,
/// biased outward so no mass is cut; `edge` itself when `f(edge) >= level`.
///
/// Steps outward from the mode with doubling strides before bisecting, so
/// sharply peaked kernels are only evaluated near their mode.
fn trim_point<F: Fn(f64) -> f64>(f: &F, mode: f64, edge: f64, level: f64) -> f64 {
    let span = edge - mode;
    if span == 0.0 {
        return edge;
    }
    let mut inside = mode;
    let mut step = span / 1024.0;
    let outside = loop {
        let probe = inside + step;
        if (probe - edge) * span.signum() >= 0.0 {
            if f(edge) >= level {
                return edge;
            }
            break edge;
        }
        if f(probe) < level {
            break probe;
        }
        inside = probe;
        step *= 2.0;
    };
    bisect_level(f, outside, inside, level)
}

/// Point between `outside` (below `level`) and `inside` (above) where `f`
/// crosses `level`, biased to the outside so no mass is cut.
fn bisect_level<F: Fn(f64) -> f64>(f: &F, mut outside: f64, mut inside: f64, level: f64) -> f64 {
    for _ in 0..16 {
        let mid = 0.5 * (outside + inside);
        if f(mid) < level {
            outside = mid;
        } else {
            inside = mid;
        }
    }
    outside
}

/// `[β_prev · low, β_prev · high]`.
pub fn beta_interval_update(beta_prev: f64, factors: IntervalFactors) -> Result<BetaInterval> {
    if !(beta_prev > 0.0) {
        return Err(Error::domain(format!("previous shape estimate must be > 0, got {beta_prev}")));
    }
    BetaInterval::new(beta_prev * factors.low, beta_prev * factors.high)
}

/// Running average of the per-step means `(β̂_x + β̂_y)/2`.
pub fn beta_bar(snapshots: &[PosteriorSnapshot]) -> Result<f64> {
    if snapshots.is_empty() {
        return Err(Error::domain("beta_bar needs at least one snapshot"));
    }
    let sum = snapshots.iter().fold(0.0, |acc, s| acc + s.pair_mean());
    Ok(sum / snapshots.len() as f64)
}

/// Posterior mean of the percentile given the pooled shape `beta_bar_k`.
pub fn percentile_posterior_mean<S: LogPowerSum + ?Sized>(
    history: &S,
    prior_percentile: f64,
    r: ReliabilityLevel,
    beta_bar_k: f64,
) -> Result<f64> {
    let shape = history.count() as f64 + 1.0;
    if !(beta_bar_k > 1.0 / shape) {
        return Err(Error::domain(format!(
            "percentile posterior mean needs beta > 1/(kn+1) = {}, got {beta_bar_k}",
            1.0 / shape
        )));
    }
    let inv = 1.0 / beta_bar_k;
    let ln = ln_gamma_unchecked(shape - inv) - ln_gamma_unchecked(shape)
        + inv * ln_accumulator(history, prior_percentile, r, beta_bar_k);
    Ok(ln.exp())
}

/// Density of the percentile ratio `u` given `C(k)`, the shape and `kn`.
pub fn ratio_pdf(u: f64, c_k: f64, beta: f64, kn: u64) -> Result<f64> {
    if !(u > 0.0 && c_k > 0.0 && beta > 0.0) {
        return Err(Error::domain(format!(
            "ratio_pdf requires u, c_k, beta > 0, got ({u}, {c_k}, {beta})"
        )));
    }
    let a = kn as f64 + 1.0;
    let ln_v = beta * u.ln() + c_k.ln();
    let ln = beta.ln() + InvertedBetaParams::new(kn).ln_norm() + (beta * a - 1.0) * u.ln() + a * c_k.ln()
        - 2.0 * a * softplus(ln_v);
    Ok(ln.exp())
}

/// `ln(1 + e^t)`.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Ratio density as the change-of-variables image of the Inverted-Beta law.
pub fn ratio_pdf_via_pivot(u: f64, c_k: f64, beta: f64, kn: u64) -> Result<f64> {
    let v = pivot(u, beta, c_k);
    Ok(beta * c_k * u.powf(beta - 1.0) * inverted_beta_pdf(v, InvertedBetaParams::new(kn))?)
}

/// `v = u^β̄ · C(k)`.
pub fn pivot(u: f64, beta_bar: f64, c_k: f64) -> f64 {
    u.powf(beta_bar) * c_k
}

/// `u = (v / C(k))^(1/β̄)`.
pub fn pivot_inverse(v: f64, beta_bar: f64, c_k: f64) -> f64 {
    (v / c_k).powf(1.0 / beta_bar)
}

/// Lower and upper limits for the percentile ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlLimits {
    pub lcl: f64,
    pub ucl: f64,
}

impl ControlLimits {
    pub fn width(&self) -> f64 {
        self.ucl - self.lcl
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lcl && u <= self.ucl
    }
}

/// Limits mapped back from the `α/2` and `1 - α/2` Inverted-Beta quantiles.
pub fn control_limits(c_k: f64, beta_bar: f64, kn: u64, alpha: f64) -> Result<ControlLimits> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(c_k > 0.0 && beta_bar > 0.0) {
        return Err(Error::domain(format!(
            "control limits need c_k, beta_bar > 0, got ({c_k}, {beta_bar})"
        )));
    }
    let ib = InvertedBetaParams::new(kn);
    let v_lo = inverted_beta_quantile(alpha / 2.0, ib)?;
    let v_hi = inverted_beta_quantile(1.0 - alpha / 2.0, ib)?;
    Ok(ControlLimits {
        lcl: pivot_inverse(v_lo, beta_bar, c_k),
        ucl: pivot_inverse(v_hi, beta_bar, c_k),
    })
}

/// One full posterior update for the pair of histories at step `k`.
///
/// `pair_mean_sum` is the sum of `(β̂_x + β̂_y)/2` over the earlier steps that
/// enter the running shape average, `retained` their count.
pub(crate) fn posterior_step<S: LogPowerSum + ?Sized>(
    hx: &S,
    hy: &S,
    prior: &PriorSpec,
    k: usize,
    interval: BetaInterval,
    pair_mean_sum: f64,
    retained: usize,
) -> Result<PosteriorSnapshot> {
    let r = prior.r_level;
    let beta_hat_x = beta_posterior_mean(hx, prior.x_r_bar, r, interval)?;
    let beta_hat_y = beta_posterior_mean(hy, prior.y_r_bar, r, interval)?;
    let pair = 0.5 * (beta_hat_x + beta_hat_y);
    let beta_bar_k = (pair_mean_sum + pair) / (retained + 1) as f64;
    let x_r_hat = percentile_posterior_mean(hx, prior.x_r_bar, r, beta_bar_k)?;
    let y_r_hat = percentile_posterior_mean(hy, prior.y_r_bar, r, beta_bar_k)?;
    let ln_c = ln_accumulator(hy, prior.y_r_bar, r, beta_bar_k) - ln_accumulator(hx, prior.x_r_bar, r, beta_bar_k);
    Ok(PosteriorSnapshot {
        k,
        interval,
        beta_hat_x,
        beta_hat_y,
        beta_bar_k,
        x_r_hat,
        y_r_hat,
        u_hat: x_r_hat / y_r_hat,
        c_k: ln_c.exp(),
    })
}
