//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! alpha = 0.0027
//! r_level = 0.95
//! prior_xr = 2.9
//! prior_yr = 3.8
//! prior_beta = 5
//! m = 10
//! window = last(10)
//! ```
//!
//! Every key has a command-line flag of the same name (underscores become
//! dashes); values given on the command line win over the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::chart::{ChartConfig, Window, DEFAULT_ALPHA, DEFAULT_RL_CAP};
use crate::distributions::ReliabilityLevel;
use crate::error::{Error, Result};
use crate::posterior::{IntervalFactors, PriorSpec};

/// Environment variable that overrides the default master seed.
pub const SEED_ENV: &str = "WRCHART_SEED";
/// Master seed used when neither a flag, a config key nor [`SEED_ENV`] sets one.
pub const DEFAULT_SEED: u64 = 20_150_617;

pub const KEYS: [&str; 16] = [
    "alpha",
    "r_level",
    "n",
    "m",
    "prior_xr",
    "prior_yr",
    "prior_beta",
    "interval_low",
    "interval_high",
    "window",
    "rl_cap",
    "seed",
    "jobs",
    "out",
    "x",
    "y",
];

/// Partially specified run configuration; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub r_level: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub prior_xr: Option<f64>,
    pub prior_yr: Option<f64>,
    pub prior_beta: Option<f64>,
    pub interval_low: Option<f64>,
    pub interval_high: Option<f64>,
    pub window: Option<Window>,
    pub rl_cap: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(Some(line), format!("invalid value `{raw}` for `{key}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(Some(line_no), format!("expected `key = value`, got `{line}`")))?;
            let (key, raw) = (key.trim(), raw.trim());
            cfg.set(line_no, key, raw)?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, line: usize, key: &str, raw: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = Some(value(line, key, raw)?),
            "r_level" => self.r_level = Some(value(line, key, raw)?),
            "n" => self.n = Some(value(line, key, raw)?),
            "m" => self.m = Some(value(line, key, raw)?),
            "prior_xr" => self.prior_xr = Some(value(line, key, raw)?),
            "prior_yr" => self.prior_yr = Some(value(line, key, raw)?),
            "prior_beta" => self.prior_beta = Some(value(line, key, raw)?),
            "interval_low" => self.interval_low = Some(value(line, key, raw)?),
            "interval_high" => self.interval_high = Some(value(line, key, raw)?),
            "window" => self.window = Some(value(line, key, raw)?),
            "rl_cap" => self.rl_cap = Some(value(line, key, raw)?),
            "seed" => self.seed = Some(value(line, key, raw)?),
            "jobs" => self.jobs = Some(value(line, key, raw)?),
            "out" => self.out = Some(PathBuf::from(raw)),
            "x" => self.x = Some(PathBuf::from(raw)),
            "y" => self.y = Some(PathBuf::from(raw)),
            _ => {
                return Err(Error::parse(
                    Some(line),
                    format!("unknown key `{key}` (known keys: {})", KEYS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    /// Fields set in `overrides` replace those of `self`.
    pub fn overridden_by(self, overrides: RunConfig) -> Self {
        Self {
            alpha: overrides.alpha.or(self.alpha),
            r_level: overrides.r_level.or(self.r_level),
            n: overrides.n.or(self.n),
            m: overrides.m.or(self.m),
            prior_xr: overrides.prior_xr.or(self.prior_xr),
            prior_yr: overrides.prior_yr.or(self.prior_yr),
            prior_beta: overrides.prior_beta.or(self.prior_beta),
            interval_low: overrides.interval_low.or(self.interval_low),
            interval_high: overrides.interval_high.or(self.interval_high),
            window: overrides.window.or(self.window),
            rl_cap: overrides.rl_cap.or(self.rl_cap),
            seed: overrides.seed.or(self.seed),
            jobs: overrides.jobs.or(self.jobs),
            out: overrides.out.or(self.out),
            x: overrides.x.or(self.x),
            y: overrides.y.or(self.y),
        }
    }

    /// Chart configuration; `inferred_n` is used when `n` is not set.
    pub fn chart_config(&self, inferred_n: Option<usize>) -> Result<ChartConfig> {
        let n = self
            .n
            .or(inferred_n)
            .ok_or_else(|| Error::Usage("sample size `n` is not set and cannot be inferred".into()))?;
        if let (Some(given), Some(found)) = (self.n, inferred_n) {
            if given != found {
                return Err(Error::Shape(format!("n = {given} but the data has samples of {found}")));
            }
        }
        let m = self.m.ok_or_else(|| Error::Usage("training length `m` is required".into()))?;
        let config = ChartConfig {
            n,
            m,
            alpha: self.alpha.unwrap_or(DEFAULT_ALPHA),
            r_level: self.reliability()?,
            window: self.window.unwrap_or(Window::All),
            rl_cap: self.rl_cap.unwrap_or(DEFAULT_RL_CAP),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn reliability(&self) -> Result<ReliabilityLevel> {
        ReliabilityLevel::new(self.r_level.unwrap_or(0.95))
    }

    pub fn prior(&self) -> Result<PriorSpec> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::Usage(format!("`{key}` is required")));
        let defaults = IntervalFactors::default();
        PriorSpec::new(
            need(self.prior_xr, "prior_xr")?,
            need(self.prior_yr, "prior_yr")?,
            need(self.prior_beta, "prior_beta")?,
            self.reliability()?,
        )?
        .with_interval_factors(
            self.interval_low.unwrap_or(defaults.low),
            self.interval_high.unwrap_or(defaults.high),
        )
    }

    /// Seed precedence: explicit value, then [`SEED_ENV`], then [`DEFAULT_SEED`].
    pub fn master_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        seed_from_env(std::env::var(SEED_ENV).ok().as_deref())
    }
}

/// Interprets the value of [`SEED_ENV`] (`None` when unset).
pub fn seed_from_env(value: Option<&str>) -> Result<u64> {
    match value.map(str::trim) {
        None | Some("") => Ok(DEFAULT_SEED),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "# run\nalpha=0.01\nr_level = 0.9\nn=4\nm = 10\nprior_xr=2.9\nprior_yr=3.8\nprior_beta=5\n\
                    interval_low=0.4\ninterval_high=1.6\nwindow=last(10)\nrl_cap=50\nseed=7\njobs=2\n\
                    out=res\nx=a.csv\ny=b.csv\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.alpha, Some(0.01));
        assert_eq!(c.window, Some(Window::Last(10)));
        assert_eq!(c.y.as_deref(), Some(Path::new("b.csv")));
        let chart = c.chart_config(Some(4)).unwrap();
        assert_eq!((chart.n, chart.m, chart.rl_cap), (4, 10, 50));
        let prior = c.prior().unwrap();
        assert_eq!(prior.interval_factors, IntervalFactors { low: 0.4, high: 1.6 });
        assert_eq!(c.master_seed().unwrap(), 7);
    }

    #[test]
    fn unknown_key_names_line() {
        match RunConfig::parse("alpha = 0.1\n\nbogus = 3\n") {
            Err(Error::Parse { line: Some(3), message }) => assert!(message.contains("bogus")),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("alpha 0.1").is_err());
        assert!(RunConfig::parse("m = ten").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse("alpha = 0.01\nm = 10").unwrap();
        let flags = RunConfig { alpha: Some(0.05), ..Default::default() };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.alpha, Some(0.05));
        assert_eq!(merged.m, Some(10));
    }

    #[test]
    fn defaults_and_conflicts() {
        let c = RunConfig::parse("m = 3\nprior_xr = 1\nprior_yr = 1\nprior_beta = 2").unwrap();
        let chart = c.chart_config(Some(5)).unwrap();
        assert_eq!(chart.alpha, DEFAULT_ALPHA);
        assert_eq!(chart.r_level.value(), 0.95);
        assert_eq!(c.prior().unwrap().interval_factors, IntervalFactors::default());
        let bad = RunConfig { n: Some(4), ..c };
        assert!(matches!(bad.chart_config(Some(5)), Err(Error::Shape(_))));
    }

    #[test]
    fn seed_env_values() {
        assert_eq!(seed_from_env(None).unwrap(), DEFAULT_SEED);
        assert_eq!(seed_from_env(Some(" 42 ")).unwrap(), 42);
        assert!(seed_from_env(Some("x")).is_err());
    }
}
