//! Phase I / Phase II state machine for the percentile-ratio chart.
//!
//! Phase I ingests `m` in-control sample pairs, recomputing the posterior and
//! the per-step limits after every pair, and freezes the limits of the last
//! step. Phase II keeps accumulating: every plotted point is the cumulative
//! posterior ratio estimate over the retained Phase I samples plus all Phase II
//! samples so far, compared against the frozen limits.

use serde::{Deserialize, Serialize};

use crate::distributions::ReliabilityLevel;
use crate::error::{Error, Result};
use crate::posterior::{
    beta_interval_update, control_limits, posterior_step, validate_sample, ControlLimits, PosteriorSnapshot,
    PriorSpec, ProcessHistory,
};

pub const DEFAULT_ALPHA: f64 = 0.0027;
pub const DEFAULT_RL_CAP: usize = 10_000;

/// How much of the Phase I posterior is carried into Phase II.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    All,
    Last(usize),
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Window::All => write!(f, "all"),
            Window::Last(w) => write!(f, "last({w})"),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Window::All);
        }
        let inner = s
            .strip_prefix("last(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s);
        inner
            .trim()
            .parse::<usize>()
            .map(Window::Last)
            .map_err(|_| Error::Usage(format!("window must be `all`, `last(w)` or `w`, got `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartConfig {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub r_level: ReliabilityLevel,
    pub window: Window,
    pub rl_cap: usize,
}

impl ChartConfig {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            alpha: DEFAULT_ALPHA,
            r_level: ReliabilityLevel::default(),
            window: Window::All,
            rl_cap: DEFAULT_RL_CAP,
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Shape(format!("n and m must be at least 1, got n={} m={}", self.n, self.m)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Window::Last(w) = self.window {
            if w == 0 || w > self.m {
                return Err(Error::Range(format!("window length must lie in 1..={}, got {w}", self.m)));
            }
        }
        if self.rl_cap == 0 {
            return Err(Error::Range("rl_cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointPhase {
    Phase1,
    Phase2,
}

impl PointPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            PointPhase::Phase1 => "phase1",
            PointPhase::Phase2 => "phase2",
        }
    }
}

/// One plotted point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    /// 1-based step number, continuing across phases.
    pub index: usize,
    pub phase: PointPhase,
    pub u_hat: f64,
    pub lcl: f64,
    pub ucl: f64,
    pub signal: bool,
    pub beta_bar: f64,
}

pub fn is_signal(u_hat: f64, limits: &ControlLimits) -> bool {
    u_hat < limits.lcl || u_hat > limits.ucl
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Training,
    Monitoring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensorReason {
    /// `rl_cap` Phase II steps without a signal.
    Cap,
    /// The sample streams ended before a signal.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunLength {
    Signal(usize),
    Censored { steps: usize, reason: CensorReason },
}

/// `12` for a signal at step 12, `>15` for a run censored after 15 steps.
impl std::fmt::Display for RunLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunLength::Signal(v) => write!(f, "{v}"),
            RunLength::Censored { steps, .. } => write!(f, ">{steps}"),
        }
    }
}

impl RunLength {
    pub fn signal(self) -> Option<usize> {
        match self {
            RunLength::Signal(rl) => Some(rl),
            RunLength::Censored { .. } => None,
        }
    }
}

/// Accumulating state of one ratio chart.
#[derive(Debug, Clone)]
pub struct ChartState {
    pub(crate) config: ChartConfig,
    pub(crate) prior: PriorSpec,
    pub(crate) x_history: ProcessHistory,
    pub(crate) y_history: ProcessHistory,
    pub(crate) snapshots: Vec<PosteriorSnapshot>,
    pub(crate) frozen_limits: Option<ControlLimits>,
    pub(crate) phase: Phase,
    /// First snapshot entering the running shape average.
    pub(crate) average_from: usize,
    pub(crate) window_applied: Option<usize>,
    /// Sum of `pair_mean()` over `snapshots[average_from..]`, folded in order.
    pub(crate) pair_sum: f64,
}

impl ChartState {
    pub fn new(config: ChartConfig, prior: PriorSpec) -> Result<Self> {
        config.validate()?;
        prior.validate()?;
        if config.r_level != prior.r_level {
            return Err(Error::Usage(format!(
                "chart reliability level {} differs from prior reliability level {}",
                config.r_level.value(),
                prior.r_level.value()
            )));
        }
        Ok(Self {
            config,
            prior,
            x_history: ProcessHistory::new(config.n)?,
            y_history: ProcessHistory::new(config.n)?,
            snapshots: Vec::new(),
            frozen_limits: None,
            phase: Phase::Training,
            average_from: 0,
            window_applied: None,
            pair_sum: 0.0,
        })
    }

    pub fn config(&self) -> &ChartConfig {
        &self.config
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn frozen_limits(&self) -> Option<ControlLimits> {
        self.frozen_limits
    }

    pub fn snapshots(&self) -> &[PosteriorSnapshot] {
        &self.snapshots
    }

    pub fn histories(&self) -> (&ProcessHistory, &ProcessHistory) {
        (&self.x_history, &self.y_history)
    }

    /// Window length applied at the end of Phase I, if any.
    pub fn window_applied(&self) -> Option<usize> {
        self.window_applied
    }

    /// Number of Phase II steps taken so far.
    pub fn phase2_steps(&self) -> usize {
        self.snapshots.len().saturating_sub(self.config.m)
    }

    /// Pooled shape average over the retained snapshots, or the prior shape.
    pub fn current_beta_bar(&self) -> f64 {
        let retained = self.snapshots.len() - self.average_from;
        if retained == 0 {
            self.prior.beta_bar
        } else {
            self.pair_sum / retained as f64
        }
    }

    /// Total retained observations per process.
    pub fn pooled_count(&self) -> usize {
        self.x_history.log_observations().len()
    }

    fn ingest(&mut self, x: &[f64], y: &[f64]) -> Result<PosteriorSnapshot> {
        validate_sample(x, self.config.n)?;
        validate_sample(y, self.config.n)?;
        let interval = beta_interval_update(self.current_beta_bar(), self.prior.interval_factors)?;
        self.x_history.push(x)?;
        self.y_history.push(y)?;
        let retained = self.snapshots.len() - self.average_from;
        let snap = posterior_step(
            &self.x_history,
            &self.y_history,
            &self.prior,
            self.snapshots.len() + 1,
            interval,
            self.pair_sum,
            retained,
        )?;
        self.pair_sum += snap.pair_mean();
        self.snapshots.push(snap);
        Ok(snap)
    }

    pub(crate) fn recompute_pair_sum(&mut self) {
        self.pair_sum = self.snapshots[self.average_from..]
            .iter()
            .fold(0.0, |acc, s| acc + s.pair_mean());
    }
}

/// Trains the chart on `m` in-control sample pairs and freezes the limits.
///
/// The returned trace carries the per-step limits of every Phase I step. When
/// the configuration asks for `Window::Last(w)` the window is applied before
/// returning.
pub fn phase1_train(
    x_samples: &[Vec<f64>],
    y_samples: &[Vec<f64>],
    config: ChartConfig,
    prior: PriorSpec,
) -> Result<(ChartState, Vec<ChartPoint>)> {
    let mut state = ChartState::new(config, prior)?;
    if x_samples.len() != config.m || y_samples.len() != config.m {
        return Err(Error::Shape(format!(
            "Phase I needs exactly m = {} samples per process, got {} and {}",
            config.m,
            x_samples.len(),
            y_samples.len()
        )));
    }
    let mut trace = Vec::with_capacity(config.m);
    let mut limits = None;
    for (x, y) in x_samples.iter().zip(y_samples) {
        let snap = state.ingest(x, y)?;
        let kn = (state.pooled_count()) as u64;
        let lim = control_limits(snap.c_k, snap.beta_bar_k, kn, config.alpha)?;
        trace.push(ChartPoint {
            index: snap.k,
            phase: PointPhase::Phase1,
            u_hat: snap.u_hat,
            lcl: lim.lcl,
            ucl: lim.ucl,
            signal: is_signal(snap.u_hat, &lim),
            beta_bar: snap.beta_bar_k,
        });
        limits = Some(lim);
    }
    state.frozen_limits = limits;
    state.phase = Phase::Monitoring;
    if let Window::Last(w) = config.window {
        state = apply_prior_window(state, w)?;
    }
    Ok((state, trace))
}

/// Carries only the last `w` Phase I samples into Phase II.
///
/// Frozen limits are untouched. The running shape average restarts from the
/// snapshots of the retained samples.
pub fn apply_prior_window(mut state: ChartState, w: usize) -> Result<ChartState> {
    if state.phase != Phase::Monitoring {
        return Err(Error::Phase("the prior window applies after Phase I".into()));
    }
    if state.phase2_steps() > 0 {
        return Err(Error::Phase("the prior window must be applied before Phase II starts".into()));
    }
    let m = state.config.m;
    if w == 0 || w > m {
        return Err(Error::Range(format!("window length must lie in 1..={m}, got {w}")));
    }
    state.window_applied = Some(w);
    if w == state.x_history.len() {
        return Ok(state);
    }
    state.x_history.retain_last(w);
    state.y_history.retain_last(w);
    state.average_from = state.snapshots.len() - w;
    state.recompute_pair_sum();
    Ok(state)
}

/// Ingests one Phase II sample pair and compares the cumulative estimate
/// against the frozen limits.
pub fn phase2_step(state: &mut ChartState, x_sample: &[f64], y_sample: &[f64]) -> Result<ChartPoint> {
    let limits = match (state.phase, state.frozen_limits) {
        (Phase::Monitoring, Some(l)) => l,
        _ => return Err(Error::Phase("Phase II requires a trained chart".into())),
    };
    let snap = state.ingest(x_sample, y_sample)?;
    Ok(ChartPoint {
        index: snap.k,
        phase: PointPhase::Phase2,
        u_hat: snap.u_hat,
        lcl: limits.lcl,
        ucl: limits.ucl,
        signal: is_signal(snap.u_hat, &limits),
        beta_bar: snap.beta_bar_k,
    })
}

/// Steps through paired sample streams until the first signal.
///
/// The run length counts Phase II steps from the start of this call. Streams
/// that end first yield `Censored { reason: Exhausted }`; reaching
/// `config.rl_cap` yields `Censored { reason: Cap }`.
pub fn run_length<X, Y>(state: &mut ChartState, x_stream: X, y_stream: Y) -> Result<(RunLength, Vec<ChartPoint>)>
where
    X: IntoIterator,
    X::Item: AsRef<[f64]>,
    Y: IntoIterator,
    Y::Item: AsRef<[f64]>,
{
    let mut trace = Vec::new();
    let mut xs = x_stream.into_iter();
    let mut ys = y_stream.into_iter();
    let rl = run_until_signal(state, || Some((xs.next()?.as_ref().to_vec(), ys.next()?.as_ref().to_vec())), |p| {
        trace.push(*p)
    })?;
    Ok((rl, trace))
}

pub(crate) fn run_until_signal<F, G>(state: &mut ChartState, mut next: F, mut observe: G) -> Result<RunLength>
where
    F: FnMut() -> Option<(Vec<f64>, Vec<f64>)>,
    G: FnMut(&ChartPoint),
{
    let cap = state.config.rl_cap;
    for step in 1..=cap {
        let Some((x, y)) = next() else {
            return Ok(RunLength::Censored {
                steps: step - 1,
                reason: CensorReason::Exhausted,
            });
        };
        let point = phase2_step(state, &x, &y)?;
        observe(&point);
        if point.signal {
            return Ok(RunLength::Signal(step));
        }
    }
    Ok(RunLength::Censored {
        steps: cap,
        reason: CensorReason::Cap,
    })
}
