//! Weibull kernel, moment relationships and the Inverted-Beta pivot law.
//!
//! The Weibull CDF is `F(x) = 1 - exp(-(x/scale)^shape)`. The monitored
//! percentile at reliability `R` is the value exceeded with probability `R`,
//! `x_R = scale * ln(1/R)^(1/shape)`.
//!
//! The Inverted-Beta (beta-prime) law used here always has two equal shape
//! parameters `kn + 1`, where `kn` is the number of pooled observations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta_inc_unchecked, ln_gamma_unchecked};

/// Scale and shape of one Weibull process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    scale: f64,
    shape: f64,
}

impl WeibullParams {
    pub fn new(scale: f64, shape: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("Weibull scale must be > 0, got {scale}")));
        }
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::domain(format!("Weibull shape must be > 0, got {shape}")));
        }
        Ok(Self { scale, shape })
    }

    /// Parameters whose percentile at `r` equals `percentile`.
    pub fn from_percentile(percentile: f64, shape: f64, r: ReliabilityLevel) -> Result<Self> {
        let scale = percentile_to_scale(percentile, shape, r)?;
        Self::new(scale, shape)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

/// Survival probability defining the monitored percentile, in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ReliabilityLevel(f64);

impl ReliabilityLevel {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!(
                "reliability level must lie in (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `ln(1/R)`, always positive.
    pub fn log_inv(self) -> f64 {
        -self.0.ln()
    }
}

impl Default for ReliabilityLevel {
    fn default() -> Self {
        Self(0.95)
    }
}

impl TryFrom<f64> for ReliabilityLevel {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ReliabilityLevel> for f64 {
    fn from(r: ReliabilityLevel) -> f64 {
        r.0
    }
}

pub fn weibull_cdf(x: f64, p: &WeibullParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("weibull_cdf requires x >= 0, got {x}")));
    }
    Ok(-(-(x / p.scale).powf(p.shape)).exp_m1())
}

/// `scale * ln(1/R)^(1/shape)`.
pub fn weibull_percentile(p: &WeibullParams, r: ReliabilityLevel) -> f64 {
    p.scale * r.log_inv().powf(1.0 / p.shape)
}

/// Inverse of [`weibull_percentile`] in the scale: `x_R * ln(1/R)^(-1/shape)`.
pub fn percentile_to_scale(percentile: f64, shape: f64, r: ReliabilityLevel) -> Result<f64> {
    if !(percentile > 0.0 && percentile.is_finite()) {
        return Err(Error::domain(format!("percentile must be > 0, got {percentile}")));
    }
    if !(shape > 0.0) {
        return Err(Error::domain(format!("shape must be > 0, got {shape}")));
    }
    Ok(percentile * r.log_inv().powf(-1.0 / shape))
}

/// Mean and variance, `scale Γ(1+1/shape)` and `scale² [Γ(1+2/shape) − Γ²(1+1/shape)]`.
pub fn weibull_moments(p: &WeibullParams) -> (f64, f64) {
    let g1 = ln_gamma_unchecked(1.0 + 1.0 / p.shape).exp();
    let g2 = ln_gamma_unchecked(1.0 + 2.0 / p.shape).exp();
    let mean = p.scale * g1;
    let variance = p.scale * p.scale * (g2 - g1 * g1);
    (mean, variance)
}

/// Draws `count` observations by inversion, one uniform per observation.
pub fn weibull_sample<R: Rng + ?Sized>(rng: &mut R, p: &WeibullParams, count: usize) -> Vec<f64> {
    (0..count).map(|_| weibull_draw(rng, p)).collect()
}

pub(crate) fn weibull_draw<R: Rng + ?Sized>(rng: &mut R, p: &WeibullParams) -> f64 {
    // U in (0, 1]: -ln U is finite and non-negative.
    let u: f64 = 1.0 - rng.random::<f64>();
    p.scale * (-u.ln()).powf(1.0 / p.shape)
}

/// Inverted-Beta law with both shape parameters equal to `count + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedBetaParams {
    pub count: u64,
}

impl InvertedBetaParams {
    pub fn new(count: u64) -> Self {
        Self { count }
    }

    fn shape(self) -> f64 {
        self.count as f64 + 1.0
    }

    /// `ln[Γ(2(kn+1)) / Γ(kn+1)²]`.
    pub(crate) fn ln_norm(self) -> f64 {
        let a = self.shape();
        ln_gamma_unchecked(2.0 * a) - 2.0 * ln_gamma_unchecked(a)
    }
}

pub fn inverted_beta_pdf(v: f64, ib: InvertedBetaParams) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("inverted_beta_pdf requires v > 0, got {v}")));
    }
    let kn = ib.count as f64;
    let ln = ib.ln_norm() + kn * v.ln() - 2.0 * (kn + 1.0) * v.ln_1p();
    Ok(ln.exp())
}

/// CDF via `I_{v/(1+v)}(kn+1, kn+1)`.
pub fn inverted_beta_cdf(v: f64, ib: InvertedBetaParams) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("inverted_beta_cdf requires v >= 0, got {v}")));
    }
    if v.is_infinite() {
        return Ok(1.0);
    }
    let a = ib.shape();
    // For v > 1 evaluate the complementary tail at 1/v for accuracy.
    if v <= 1.0 {
        Ok(beta_inc_unchecked(a, a, v / (1.0 + v)))
    } else {
        Ok(1.0 - beta_inc_unchecked(a, a, 1.0 / (1.0 + v)))
    }
}

/// Quantile `v_p` of the Inverted-Beta law.
///
/// Bisection on `w = v/(1+v)` over the symmetric Beta(kn+1, kn+1) CDF down to
/// a bracket of width 1e-12, followed by a single Newton step.
pub fn inverted_beta_quantile(p: f64, ib: InvertedBetaParams) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "inverted_beta_quantile requires 0 < p < 1, got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(1.0);
    }
    // Symmetry of Beta(a, a): solve in the lower half and reflect.
    let lower = p < 0.5;
    let target = if lower { p } else { 1.0 - p };
    let a = ib.shape();

    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if beta_inc_unchecked(a, a, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);

    // Newton polish on the Beta CDF; accepted only if it stays in the bracket.
    let ln_b = 2.0 * ln_gamma_unchecked(a) - ln_gamma_unchecked(2.0 * a);
    let dens = ((a - 1.0) * (w.ln() + (-w).ln_1p()) - ln_b).exp();
    if dens > 0.0 && dens.is_finite() {
        let step = (beta_inc_unchecked(a, a, w) - target) / dens;
        let polished = w - step;
        if polished > lo && polished < hi {
            w = polished;
        }
    }

    let w = if lower { w } else { 1.0 - w };
    Ok(w / (1.0 - w))
}
