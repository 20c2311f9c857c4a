//! Inference: evaluation-mode forward pass, then per-district
//! denormalization with forecasts floored at zero.

use epiwave_core::{Matrix64, Tape64};

use crate::config::ModelConfig;
use crate::error::Result;
use crate::forward::{forward_window, Mode};
use crate::params::ModelParams;
use crate::prepare::PreparedSeries;

/// n x d2 forecasts on the normalized scale.
pub fn predict_window_normalized(
    prepared: &PreparedSeries,
    params: &ModelParams,
    cfg: &ModelConfig,
    anchor: usize,
) -> Result<Matrix64> {
    let mut tape = Tape64::new();
    let trace = forward_window(&mut tape, prepared, params, cfg, anchor, &mut Mode::Eval, false)?;
    Ok(tape.value(trace.predictions).clone())
}

/// n x d2 forecasts in raw counts, never negative.
pub fn predict_window(
    prepared: &PreparedSeries,
    params: &ModelParams,
    cfg: &ModelConfig,
    anchor: usize,
) -> Result<Matrix64> {
    let normalized = predict_window_normalized(prepared, params, cfg, anchor)?;
    let mut out = Matrix64::zeros(normalized.rows(), normalized.cols());
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            let raw = prepared.stats.denormalize_case(i, normalized.get(i, j));
            out.set(i, j, raw.max(0.0));
        }
    }
    Ok(out)
}
