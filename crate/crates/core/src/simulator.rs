//! Monte Carlo run-length experiments.
//!
//! Every replication draws from its own pair of ChaCha streams (one per
//! process) seeded from `(master_seed, replication_index, stream)`, so results
//! do not depend on how replications are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chart::{
    phase1_train, run_until_signal, ChartConfig, ChartState, RunLength, Window, DEFAULT_ALPHA,
};
use crate::distributions::{weibull_sample, ReliabilityLevel, WeibullParams};
use crate::error::{Error, Result};
use crate::posterior::{ControlLimits, PriorSpec};

/// Censoring cap for out-of-control scenarios.
pub const OOC_RL_CAP: usize = 10_000;
/// Censoring cap for the in-control calibration.
pub const IC_RL_CAP: usize = 50_000;

/// The fourteen `(x_R^out, y_R^out)` pairs of the shifted-percentile study.
pub const TABLE3_PAIRS: [(f64, f64); 14] = [
    (0.5, 0.8),
    (0.5, 1.0),
    (0.5, 1.2),
    (0.5, 1.5),
    (0.8, 0.5),
    (0.8, 1.2),
    (0.8, 1.5),
    (1.0, 0.5),
    (1.0, 1.5),
    (1.2, 0.5),
    (1.2, 0.8),
    (1.5, 0.5),
    (1.5, 0.8),
    (1.5, 1.0),
];

/// Published ARL and SDRL for [`TABLE3_PAIRS`], same order.
pub const TABLE3_PUBLISHED: [(f64, f64); 14] = [
    (29.9, 6.4),
    (13.2, 2.6),
    (7.7, 1.7),
    (4.3, 1.1),
    (29.9, 6.4),
    (13.8, 5.4),
    (5.5, 1.7),
    (13.5, 2.6),
    (8.9, 4.8),
    (7.8, 1.6),
    (13.7, 5.3),
    (4.4, 1.1),
    (5.6, 1.8),
    (8.8, 4.7),
];

/// One out-of-control configuration of the ARL study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArlScenario {
    pub x_r_out: f64,
    pub y_r_out: f64,
    /// In-control percentiles used for Phase I.
    pub x_r_in: f64,
    pub y_r_in: f64,
    pub beta_true: f64,
    pub r_level: ReliabilityLevel,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub prior: PriorSpec,
    pub n_runs: usize,
    pub master_seed: u64,
    pub rl_cap: usize,
}

impl ArlScenario {
    /// `x_R = y_R = 1`, `β = 3`, `R = 0.95`, `n = 5`, `m = 20`, unbiased priors.
    pub fn standard(x_r_out: f64, y_r_out: f64, n_runs: usize, master_seed: u64) -> Self {
        let r_level = ReliabilityLevel::new(0.95).expect("valid level");
        Self {
            x_r_out,
            y_r_out,
            x_r_in: 1.0,
            y_r_in: 1.0,
            beta_true: 3.0,
            r_level,
            n: 5,
            m: 20,
            alpha: DEFAULT_ALPHA,
            prior: PriorSpec::new(1.0, 1.0, 3.0, r_level).expect("valid prior"),
            n_runs,
            master_seed,
            rl_cap: OOC_RL_CAP,
        }
    }

    /// The no-shift scenario used to calibrate the in-control ARL.
    pub fn in_control(n_runs: usize, master_seed: u64) -> Self {
        Self {
            rl_cap: IC_RL_CAP,
            ..Self::standard(1.0, 1.0, n_runs, master_seed)
        }
    }

    pub fn with_shift(mut self, x_r_out: f64, y_r_out: f64) -> Self {
        self.x_r_out = x_r_out;
        self.y_r_out = y_r_out;
        self
    }

    /// The same study with the roles of the two processes exchanged.
    pub fn swapped(&self) -> Self {
        let mut s = *self;
        std::mem::swap(&mut s.x_r_out, &mut s.y_r_out);
        std::mem::swap(&mut s.x_r_in, &mut s.y_r_in);
        std::mem::swap(&mut s.prior.x_r_bar, &mut s.prior.y_r_bar);
        s
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x_r_out", self.x_r_out),
            ("y_r_out", self.y_r_out),
            ("x_r_in", self.x_r_in),
            ("y_r_in", self.y_r_in),
            ("beta_true", self.beta_true),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_runs == 0 {
            return Err(Error::Range("n_runs must be at least 1".into()));
        }
        self.chart_config().validate()?;
        self.prior.validate()
    }

    pub fn chart_config(&self) -> ChartConfig {
        ChartConfig {
            n: self.n,
            m: self.m,
            alpha: self.alpha,
            r_level: self.r_level,
            window: Window::All,
            rl_cap: self.rl_cap,
        }
    }

    /// `x_R^out / y_R^out`.
    pub fn ratio(&self) -> f64 {
        self.x_r_out / self.y_r_out
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` (0 = x, 1 = y) of replication `index`.
pub fn replication_seed(master_seed: u64, index: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master_seed ^ splitmix64(index)) ^ stream)
}

fn stream_rngs(master_seed: u64, index: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    (
        ChaCha8Rng::seed_from_u64(replication_seed(master_seed, index, 0)),
        ChaCha8Rng::seed_from_u64(replication_seed(master_seed, index, 1)),
    )
}

/// Trains a chart on in-control draws; returns the chart and the Phase II
/// parameters of both processes.
fn train_replication(
    scenario: &ArlScenario,
    rx: &mut ChaCha8Rng,
    ry: &mut ChaCha8Rng,
) -> Result<(ChartState, WeibullParams, WeibullParams)> {
    let r = scenario.r_level;
    let x_in = WeibullParams::from_percentile(scenario.x_r_in, scenario.beta_true, r)?;
    let y_in = WeibullParams::from_percentile(scenario.y_r_in, scenario.beta_true, r)?;
    let x_phase1: Vec<Vec<f64>> = (0..scenario.m).map(|_| weibull_sample(rx, &x_in, scenario.n)).collect();
    let y_phase1: Vec<Vec<f64>> = (0..scenario.m).map(|_| weibull_sample(ry, &y_in, scenario.n)).collect();
    let (state, _) = phase1_train(&x_phase1, &y_phase1, scenario.chart_config(), scenario.prior)?;
    let x_out = WeibullParams::from_percentile(scenario.x_r_out, scenario.beta_true, r)?;
    let y_out = WeibullParams::from_percentile(scenario.y_r_out, scenario.beta_true, r)?;
    Ok((state, x_out, y_out))
}

/// One replication: Phase I on in-control data, then shifted Phase II samples
/// until the first signal or `rl_cap`.
pub fn simulate_run(scenario: &ArlScenario, replication_index: u64) -> Result<RunLength> {
    let (mut rx, mut ry) = stream_rngs(scenario.master_seed, replication_index);
    let (mut state, x_out, y_out) = train_replication(scenario, &mut rx, &mut ry)?;
    let n = scenario.n;
    run_until_signal(
        &mut state,
        || Some((weibull_sample(&mut rx, &x_out, n), weibull_sample(&mut ry, &y_out, n))),
        |_| {},
    )
}

/// Same replication as [`simulate_run`] with the two random streams
/// exchanged, for use with [`ArlScenario::swapped`].
pub fn simulate_run_swapped_streams(scenario: &ArlScenario, replication_index: u64) -> Result<RunLength> {
    let (mut ry, mut rx) = stream_rngs(scenario.master_seed, replication_index);
    let (mut state, x_out, y_out) = train_replication(scenario, &mut rx, &mut ry)?;
    let n = scenario.n;
    run_until_signal(
        &mut state,
        || Some((weibull_sample(&mut rx, &x_out, n), weibull_sample(&mut ry, &y_out, n))),
        |_| {},
    )
}

/// End-of-Phase-I posterior of one in-control replication.
pub fn train_in_control(scenario: &ArlScenario, replication_index: u64) -> Result<ChartState> {
    let (mut rx, mut ry) = stream_rngs(scenario.master_seed, replication_index);
    Ok(train_replication(scenario, &mut rx, &mut ry)?.0)
}

/// Summary of a set of run lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArlEstimate {
    /// Mean of the uncensored run lengths (NaN when every run was censored).
    pub arl: f64,
    /// Sample standard deviation of the uncensored run lengths (NaN with
    /// fewer than two of them).
    pub sdrl: f64,
    /// Replications performed.
    pub runs_used: usize,
    /// Replications that reached the cap without a signal.
    pub censored: usize,
    /// `sdrl / sqrt(uncensored runs)`.
    pub standard_error: f64,
    /// Mean run length counting censored runs at their cap; a lower bound
    /// on the true ARL.
    pub arl_lower_bound: f64,
}

impl ArlEstimate {
    pub fn from_run_lengths(rls: &[RunLength]) -> Self {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut censored = 0usize;
        let mut bound_sum = 0.0;
        for rl in rls {
            match *rl {
                RunLength::Signal(v) => {
                    let v = v as f64;
                    count += 1;
                    sum += v;
                    sum_sq += v * v;
                    bound_sum += v;
                }
                RunLength::Censored { steps, .. } => {
                    censored += 1;
                    bound_sum += steps as f64;
                }
            }
        }
        let (arl, sdrl) = if count == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let mean = sum / count as f64;
            let var = if count > 1 {
                ((sum_sq - count as f64 * mean * mean) / (count as f64 - 1.0)).max(0.0)
            } else {
                f64::NAN
            };
            (mean, var.sqrt())
        };
        Self {
            arl,
            sdrl,
            runs_used: rls.len(),
            censored,
            standard_error: if count > 0 { sdrl / (count as f64).sqrt() } else { f64::NAN },
            arl_lower_bound: if rls.is_empty() { f64::NAN } else { bound_sum / rls.len() as f64 },
        }
    }
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))
}

/// All run lengths of a scenario, in replication order.
pub fn run_lengths(scenario: &ArlScenario, parallelism: usize) -> Result<Vec<RunLength>> {
    scenario.validate()?;
    pool(parallelism)?.install(|| {
        (0..scenario.n_runs as u64)
            .into_par_iter()
            .map(|i| simulate_run(scenario, i))
            .collect()
    })
}

/// ARL/SDRL over `n_runs` replications; independent of `parallelism`.
pub fn estimate_arl(scenario: &ArlScenario, parallelism: usize) -> Result<ArlEstimate> {
    Ok(ArlEstimate::from_run_lengths(&run_lengths(scenario, parallelism)?))
}

/// Result of [`calibrate_in_control`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InControlCalibration {
    pub estimate: ArlEstimate,
    /// Cap of the stage that produced `estimate`.
    pub rl_cap: usize,
    /// True when a short first stage already pushed the censored lower
    /// bound above `decide_above`, so the full cap could not change the verdict.
    pub decided_early: bool,
}

/// Cap of the first calibration stage.
pub const IC_FIRST_STAGE_CAP: usize = 1_000;

/// Estimates the in-control ARL in two stages.
///
/// Counting censored runs at their cap gives a lower bound on the ARL that
/// can only grow with the cap. The first stage runs every replication to
/// [`IC_FIRST_STAGE_CAP`]; if that bound already exceeds `decide_above` the
/// estimate is returned as is. Otherwise all replications are rerun to the
/// scenario's own cap.
pub fn calibrate_in_control(scenario: &ArlScenario, decide_above: f64, parallelism: usize) -> Result<InControlCalibration> {
    let first_cap = scenario.rl_cap.min(IC_FIRST_STAGE_CAP);
    let first = ArlScenario { rl_cap: first_cap, ..*scenario };
    let estimate = estimate_arl(&first, parallelism)?;
    if first_cap == scenario.rl_cap || estimate.arl_lower_bound > decide_above {
        return Ok(InControlCalibration {
            estimate,
            rl_cap: first_cap,
            decided_early: first_cap < scenario.rl_cap,
        });
    }
    Ok(InControlCalibration {
        estimate: estimate_arl(scenario, parallelism)?,
        rl_cap: scenario.rl_cap,
        decided_early: false,
    })
}

/// One row of a scenario table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioRow {
    pub x_r_out: f64,
    pub y_r_out: f64,
    pub ratio: f64,
    pub estimate: ArlEstimate,
}

/// Estimates for each `(x_r_out, y_r_out)` pair, in order.
pub fn scenario_table(base: &ArlScenario, ratios: &[(f64, f64)], parallelism: usize) -> Result<Vec<ScenarioRow>> {
    if ratios.is_empty() {
        return Err(Error::Usage("scenario table needs at least one shift pair".into()));
    }
    ratios
        .iter()
        .map(|&(x, y)| {
            let s = base.with_shift(x, y);
            Ok(ScenarioRow {
                x_r_out: x,
                y_r_out: y,
                ratio: s.ratio(),
                estimate: estimate_arl(&s, parallelism)?,
            })
        })
        .collect()
}

/// Inputs of a prior-sensitivity grid.
#[derive(Debug, Clone)]
pub struct GridBase {
    pub x_phase1: Vec<Vec<f64>>,
    pub y_phase1: Vec<Vec<f64>>,
    /// Phase II samples, already shifted where required.
    pub x_phase2: Vec<Vec<f64>>,
    pub y_phase2: Vec<Vec<f64>>,
    /// Extra Phase II samples drawn by resampling the Phase II observations.
    pub extension: usize,
    pub config: ChartConfig,
    pub prior: PriorSpec,
}

impl GridBase {
    /// The bundled tables: ten training samples, fifteen Phase II samples with
    /// the second process scaled by 1.15, extended by 25 resampled samples.
    pub fn bundled() -> Self {
        use crate::io::fixtures as fx;
        let t1 = fx::table1();
        let t2 = fx::table2_shifted(fx::Y_SHIFT, fx::IN_CONTROL);
        let r = ReliabilityLevel::new(fx::R_LEVEL).expect("valid level");
        Self {
            x_phase1: t1[..fx::IN_CONTROL].to_vec(),
            y_phase1: t2[..fx::IN_CONTROL].to_vec(),
            x_phase2: t1[fx::IN_CONTROL..].to_vec(),
            y_phase2: t2[fx::IN_CONTROL..].to_vec(),
            extension: 25,
            config: ChartConfig::new(fx::SAMPLE_SIZE, fx::IN_CONTROL),
            prior: PriorSpec::new(fx::PRIOR_X_R, fx::PRIOR_Y_R, fx::PRIOR_BETA, r).expect("valid prior"),
        }
    }
}

/// Draws `count` samples of size `n` with replacement from the pooled
/// observations of `source`.
pub fn bootstrap_samples<R: Rng + ?Sized>(rng: &mut R, source: &[Vec<f64>], count: usize, n: usize) -> Vec<Vec<f64>> {
    let pooled: Vec<f64> = source.iter().flatten().copied().collect();
    (0..count)
        .map(|_| (0..n).map(|_| pooled[rng.random_range(0..pooled.len())]).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub percentile_factor: f64,
    pub beta_factor: f64,
    pub run_length: RunLength,
    pub limits: ControlLimits,
}

/// Replays the base experiment for every `(percentile factor, shape factor)`
/// pair. The percentile factor scales the first process's anticipated
/// percentile only; the shape factor scales the anticipated shape. All cells
/// see the same resampled Phase II extension.
pub fn prior_sensitivity_grid(
    base: &GridBase,
    percentile_factors: &[f64],
    beta_factors: &[f64],
    seed: u64,
) -> Result<Vec<GridCell>> {
    if percentile_factors.is_empty() || beta_factors.is_empty() {
        return Err(Error::Usage("grid factor lists must be non-empty".into()));
    }
    let n = base.config.n;
    let mut rx = ChaCha8Rng::seed_from_u64(replication_seed(seed, 0, 0));
    let mut ry = ChaCha8Rng::seed_from_u64(replication_seed(seed, 0, 1));
    let mut x_phase2 = base.x_phase2.clone();
    let mut y_phase2 = base.y_phase2.clone();
    x_phase2.extend(bootstrap_samples(&mut rx, &base.x_phase2, base.extension, n));
    y_phase2.extend(bootstrap_samples(&mut ry, &base.y_phase2, base.extension, n));

    let mut cells = Vec::with_capacity(percentile_factors.len() * beta_factors.len());
    for &fp in percentile_factors {
        for &fb in beta_factors {
            let mut prior = base.prior;
            prior.x_r_bar *= fp;
            prior.beta_bar *= fb;
            prior.validate()?;
            let (mut state, _) = phase1_train(&base.x_phase1, &base.y_phase1, base.config, prior)?;
            let limits = state.frozen_limits().expect("trained chart has limits");
            let (rl, _) = crate::chart::run_length(&mut state, &x_phase2, &y_phase2)?;
            cells.push(GridCell {
                percentile_factor: fp,
                beta_factor: fb,
                run_length: rl,
                limits,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::CensorReason;

    #[test]
    fn seeds_differ_by_stream_and_index() {
        let a = replication_seed(1, 0, 0);
        assert_ne!(a, replication_seed(1, 0, 1));
        assert_ne!(a, replication_seed(1, 1, 0));
        assert_ne!(a, replication_seed(2, 0, 0));
    }

    #[test]
    fn estimate_from_known_lengths() {
        let rls = [RunLength::Signal(2), RunLength::Signal(4), RunLength::Censored { steps: 10, reason: CensorReason::Cap }];
        let e = ArlEstimate::from_run_lengths(&rls);
        assert_eq!(e.arl, 3.0);
        assert!((e.sdrl - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(e.censored, 1);
        assert_eq!(e.runs_used, 3);
        assert!((e.arl_lower_bound - 16.0 / 3.0).abs() < 1e-15);
        let e = ArlEstimate::from_run_lengths(&[RunLength::Signal(5); 4]);
        assert_eq!(e.sdrl, 0.0);
        let e = ArlEstimate::from_run_lengths(&[RunLength::Signal(5)]);
        assert!(e.sdrl.is_nan() && e.standard_error.is_nan());
    }

    #[test]
    fn replication_is_deterministic() {
        let s = ArlScenario::standard(0.5, 1.5, 4, 77);
        assert_eq!(simulate_run(&s, 3).unwrap(), simulate_run(&s, 3).unwrap());
    }

    #[test]
    fn empty_table_rejected() {
        let s = ArlScenario::standard(0.5, 1.5, 4, 77);
        assert!(scenario_table(&s, &[], 1).is_err());
    }

    #[test]
    fn bootstrap_draws_from_pool() {
        let src = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = bootstrap_samples(&mut rng, &src, 5, 3);
        assert_eq!(b.len(), 5);
        assert!(b.iter().flatten().all(|v| [1.0, 2.0, 3.0, 4.0].contains(v)));
    }
}
