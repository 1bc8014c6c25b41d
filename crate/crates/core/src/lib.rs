//! Bayesian control chart for the ratio `u = x_R / y_R` of two Weibull
//! percentiles.
//!
//! Both processes share one Weibull shape. Each process has an anticipated
//! percentile and the pair shares an anticipated shape; the chart trains on
//! `m` in-control sample pairs (Phase I), freezes the limits derived from the
//! Inverted-Beta pivot, and monitors cumulative posterior ratio estimates in
//! Phase II.
//!
//! Modules:
//!
//! - [`distributions`]: Weibull kernel, moments, sampling and the Inverted-Beta law.
//! - [`posterior`]: accumulators, shape posterior mean, percentile means, limits.
//! - [`chart`]: the Phase I / Phase II state machine and run lengths.
//! - [`simulator`]: Monte Carlo ARL/SDRL estimation and the prior grid.
//! - [`io`]: sample files, trace CSV, configuration, state documents, SVG plots
//!   and the reproduction harness.

pub mod chart;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod io;
pub mod posterior;
pub mod power_sum;
mod quadrature;
pub mod simulator;
pub mod special;
pub mod state;

pub use chart::{
    apply_prior_window, phase1_train, phase2_step, run_length, ChartConfig, ChartPoint, ChartState, Phase,
    PointPhase, RunLength, Window,
};
pub use distributions::{ReliabilityLevel, WeibullParams};
pub use error::{Error, Result};
pub use posterior::{ControlLimits, PriorSpec, ProcessHistory};
