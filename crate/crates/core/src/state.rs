//! Versioned JSON document for a [`ChartState`].
//!
//! ```text
//! {
//!   "format": "weibull-ratio-chart-state",
//!   "version": 1,
//!   "config":   { "n", "m", "alpha", "r_level", "window", "rl_cap" },
//!   "prior":    { "x_r_bar", "y_r_bar", "beta_bar", "r_level", "interval_factors": { "low", "high" } },
//!   "phase":    "training" | "monitoring",
//!   "frozen_limits": { "lcl", "ucl" } | null,
//!   "average_from": <index of the first snapshot in the running shape average>,
//!   "window_applied": <w> | null,
//!   "x_history": { "n", "samples": [[...], ...] },
//!   "y_history": { "n", "samples": [[...], ...] },
//!   "snapshots": [ { "k", "interval": { "lo", "hi" }, "beta_hat_x", "beta_hat_y",
//!                    "beta_bar_k", "x_r_hat", "y_r_hat", "u_hat", "c_k" }, ... ]
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so a reloaded state
//! produces bit-identical subsequent points.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartConfig, ChartState, Phase};
use crate::error::{Error, Result};
use crate::posterior::{ControlLimits, PosteriorSnapshot, PriorSpec, ProcessHistory};

pub const STATE_FORMAT: &str = "weibull-ratio-chart-state";
pub const STATE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDocument {
    format: String,
    version: u32,
    config: ChartConfig,
    prior: PriorSpec,
    phase: Phase,
    frozen_limits: Option<ControlLimits>,
    average_from: usize,
    window_applied: Option<usize>,
    x_history: ProcessHistory,
    y_history: ProcessHistory,
    snapshots: Vec<PosteriorSnapshot>,
}

pub fn serialize(state: &ChartState) -> String {
    let doc = StateDocument {
        format: STATE_FORMAT.to_string(),
        version: STATE_VERSION,
        config: state.config,
        prior: state.prior,
        phase: state.phase,
        frozen_limits: state.frozen_limits,
        average_from: state.average_from,
        window_applied: state.window_applied,
        x_history: state.x_history.clone(),
        y_history: state.y_history.clone(),
        snapshots: state.snapshots.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("state document serializes");
    text.push('\n');
    text
}

pub fn deserialize(text: &str) -> Result<ChartState> {
    // Check the header first so a version mismatch is reported as such.
    let header: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::parse(Some(e.line()), format!("state document: {e}")))?;
    match header.get("format").and_then(|v| v.as_str()) {
        Some(STATE_FORMAT) => {}
        other => {
            return Err(Error::parse(
                None,
                format!("state document format must be `{STATE_FORMAT}`, got {other:?}"),
            ))
        }
    }
    match header.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == STATE_VERSION as u64 => {}
        other => {
            return Err(Error::parse(
                None,
                format!("unsupported state document version {other:?}, expected {STATE_VERSION}"),
            ))
        }
    }
    let doc: StateDocument =
        serde_json::from_str(text).map_err(|e| Error::parse(Some(e.line()), format!("state document: {e}")))?;
    build(doc)
}

fn build(doc: StateDocument) -> Result<ChartState> {
    let invalid = |msg: String| Error::parse(None, format!("inconsistent state document: {msg}"));
    doc.config.validate()?;
    doc.prior.validate()?;
    if doc.x_history.n() != doc.config.n || doc.y_history.n() != doc.config.n {
        return Err(invalid("history sample size differs from config.n".into()));
    }
    if doc.x_history.len() != doc.y_history.len() {
        return Err(invalid("process histories have different lengths".into()));
    }
    match (doc.phase, doc.frozen_limits) {
        (Phase::Monitoring, Some(l)) if l.lcl < l.ucl => {}
        (Phase::Training, None) => {}
        _ => return Err(invalid("frozen limits must be present exactly when monitoring".into())),
    }
    if doc.average_from > doc.snapshots.len() {
        return Err(invalid("average_from exceeds the snapshot count".into()));
    }
    let retained_snapshots = doc.snapshots.len() - doc.average_from;
    if retained_snapshots != doc.x_history.len() {
        return Err(invalid(format!(
            "{} retained snapshots but {} retained samples",
            retained_snapshots,
            doc.x_history.len()
        )));
    }
    let mut state = ChartState::new(doc.config, doc.prior)?;
    state.x_history = doc.x_history;
    state.y_history = doc.y_history;
    state.snapshots = doc.snapshots;
    state.frozen_limits = doc.frozen_limits;
    state.phase = doc.phase;
    state.average_from = doc.average_from;
    state.window_applied = doc.window_applied;
    state.recompute_pair_sum();
    Ok(state)
}

pub fn save(state: &ChartState, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize(state)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<ChartState> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    deserialize(&text)
}
