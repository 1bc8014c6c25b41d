//! Log power sums `ln Σ x_i^β` over a growing set of positive observations.
//!
//! The posterior kernels need `Σ x_i^β` at arbitrary `β` for the whole
//! accumulated history. Summing directly costs `O(kn)` per evaluation, which
//! dominates long Phase II runs. [`PowerSumCache`] instead keeps the log power
//! sum at Chebyshev nodes of fixed-width `β` segments, folds each new
//! observation into every materialized segment once, and evaluates the
//! Chebyshev interpolant of `ln Σ x_i^β` inside a segment.
//!
//! Node values are a sequential log-sum-exp fold over the observations in
//! insertion order, so a cache rebuilt from the same observations reproduces
//! every value bit for bit regardless of when its segments were created.

use std::cell::RefCell;
use std::collections::BTreeMap;

/// Source of `ln Σ x_i^β`, `Σ ln x_i` and the observation count.
pub trait LogPowerSum {
    fn count(&self) -> usize;

    fn sum_log(&self) -> f64;

    /// `ln Σ x_i^β`; `-inf` when there are no observations.
    fn log_power_sum(&self, beta: f64) -> f64;
}

/// Direct summation over a slice of `ln x_i`.
#[derive(Debug, Clone, Copy)]
pub struct ExactPowerSum<'a> {
    log_obs: &'a [f64],
    sum_log: f64,
}

impl<'a> ExactPowerSum<'a> {
    pub fn new(log_obs: &'a [f64]) -> Self {
        Self {
            log_obs,
            sum_log: log_obs.iter().sum(),
        }
    }
}

impl LogPowerSum for ExactPowerSum<'_> {
    fn count(&self) -> usize {
        self.log_obs.len()
    }

    fn sum_log(&self) -> f64 {
        self.sum_log
    }

    fn log_power_sum(&self, beta: f64) -> f64 {
        let mut acc = LseAcc::EMPTY;
        for &l in self.log_obs {
            acc.push(beta * l);
        }
        acc.value()
    }
}

/// Streaming log-sum-exp: `max + ln(scaled)`.
#[derive(Debug, Clone, Copy)]
struct LseAcc {
    max: f64,
    scaled: f64,
}

impl LseAcc {
    const EMPTY: LseAcc = LseAcc {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    #[inline]
    fn push(&mut self, t: f64) {
        if t <= self.max {
            self.scaled += (t - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - t).exp() + 1.0;
            self.max = t;
        }
    }

    fn value(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

pub(crate) const SEGMENT_WIDTH: f64 = 0.5;
pub(crate) const SEGMENT_DEGREE: usize = 20;

#[derive(Debug, Clone)]
struct Segment {
    lo: f64,
    nodes: Vec<f64>,
    acc: Vec<LseAcc>,
    /// Chebyshev coefficients of the interpolant on `[lo, lo + SEGMENT_WIDTH]`.
    coeffs: Vec<f64>,
    folded: usize,
}

const NODES: usize = SEGMENT_DEGREE + 1;

/// `cos(π j / SEGMENT_DEGREE)` for the interpolation nodes.
fn node_cosines() -> [f64; NODES] {
    let d = SEGMENT_DEGREE as f64;
    std::array::from_fn(|j| (std::f64::consts::PI * j as f64 / d).cos())
}

/// Matrix mapping node values to Chebyshev coefficients (a type-I discrete
/// cosine transform with the end terms halved).
fn dct_matrix() -> &'static [[f64; NODES]; NODES] {
    static MATRIX: std::sync::OnceLock<[[f64; NODES]; NODES]> = std::sync::OnceLock::new();
    MATRIX.get_or_init(|| {
        let d = SEGMENT_DEGREE;
        std::array::from_fn(|k| {
            std::array::from_fn(|j| {
                let c = (std::f64::consts::PI * ((j * k) % (2 * d)) as f64 / d as f64).cos();
                let end_j = if j == 0 || j == d { 0.5 } else { 1.0 };
                let end_k = if k == 0 || k == d { 1.0 } else { 2.0 };
                end_j * end_k * c / d as f64
            })
        })
    })
}

impl Segment {
    fn new(key: i64) -> Self {
        let lo = key as f64 * SEGMENT_WIDTH;
        let nodes = node_cosines()
            .iter()
            .map(|c| lo + 0.5 * SEGMENT_WIDTH * (1.0 + c))
            .collect();
        Self {
            lo,
            nodes,
            acc: vec![LseAcc::EMPTY; SEGMENT_DEGREE + 1],
            coeffs: vec![0.0; SEGMENT_DEGREE + 1],
            folded: 0,
        }
    }

    fn catch_up(&mut self, log_obs: &[f64]) {
        if self.folded == log_obs.len() {
            return;
        }
        let pending = &log_obs[self.folded..];
        for (acc, &beta) in self.acc.iter_mut().zip(&self.nodes) {
            for &l in pending {
                acc.push(beta * l);
            }
        }
        self.folded = log_obs.len();
        self.refit();
    }

    /// Discrete cosine transform of the node values (Chebyshev points of the
    /// second kind), with the end coefficients pre-halved.
    fn refit(&mut self) {
        let values: [f64; NODES] = std::array::from_fn(|j| self.acc[j].value());
        for (c, row) in self.coeffs.iter_mut().zip(dct_matrix()) {
            *c = row.iter().zip(&values).map(|(m, f)| m * f).sum();
        }
    }

    /// Clenshaw evaluation of the Chebyshev series.
    fn eval(&self, beta: f64) -> f64 {
        let t = 2.0 * (beta - self.lo) / SEGMENT_WIDTH - 1.0;
        let two_t = 2.0 * t;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + two_t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }
}

/// Interpolating cache of `ln Σ x_i^β` over appended observations.
#[derive(Debug, Clone, Default)]
pub struct PowerSumCache {
    log_obs: Vec<f64>,
    sum_log: f64,
    segments: RefCell<BTreeMap<i64, Segment>>,
}

impl PowerSumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_log_observations(log_obs: &[f64]) -> Self {
        let mut cache = Self::new();
        cache.extend(log_obs.iter().copied());
        cache
    }

    pub fn push(&mut self, log_x: f64) {
        self.log_obs.push(log_x);
        self.sum_log += log_x;
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, log_xs: I) {
        for l in log_xs {
            self.push(l);
        }
    }

    pub fn log_observations(&self) -> &[f64] {
        &self.log_obs
    }
}

impl LogPowerSum for PowerSumCache {
    fn count(&self) -> usize {
        self.log_obs.len()
    }

    fn sum_log(&self) -> f64 {
        self.sum_log
    }

    fn log_power_sum(&self, beta: f64) -> f64 {
        if self.log_obs.is_empty() {
            return f64::NEG_INFINITY;
        }
        let key = (beta / SEGMENT_WIDTH).floor() as i64;
        let mut segments = self.segments.borrow_mut();
        let seg = segments.entry(key).or_insert_with(|| Segment::new(key));
        seg.catch_up(&self.log_obs);
        seg.eval(beta)
    }
}
