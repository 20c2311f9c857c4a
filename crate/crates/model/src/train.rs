//! Training loop: per epoch, shuffle the training anchors, group them into
//! batches, fold each window's loss and gradients into a running batch mean
//! ( (m-1)/m * acc + 1/m * new ), and apply one Adam update per batch.
//! Returns the parameters from the epoch with the lowest validation loss.

use epiwave_core::{AdamConfig, AdamState, ParamSet64};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ModelConfig;
use crate::error::{ModelError, Result};
use crate::forward::{self, Mode};
use crate::params::ModelParams;
use crate::prepare::PreparedSeries;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    /// NaN when no validation anchors were supplied.
    pub val_loss: f64,
}

#[derive(Clone, Debug, Default)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
    pub best_epoch: usize,
    /// Awareness exponent clamps observed while training.
    pub clamp_events: u64,
}

fn fold_running_mean(acc: &mut ParamSet64, delta: &ParamSet64, m: usize) {
    let m = m as f64;
    let keep = (m - 1.0) / m;
    for idx in 0..acc.len() {
        let (_, d) = delta.slot(idx);
        let d = d.clone();
        let (_, a) = acc.slot_mut(idx);
        let (ad, dd) = (a.data_mut(), d.data());
        for i in 0..ad.len() {
            ad[i] = keep * ad[i] + dd[i] / m;
        }
    }
}

/// Mean evaluation-mode loss over a set of anchors.
pub fn mean_loss(
    prepared: &PreparedSeries,
    params: &ModelParams,
    cfg: &ModelConfig,
    anchors: &[usize],
) -> Result<f64> {
    if anchors.is_empty() {
        return Ok(f64::NAN);
    }
    let mut total = 0.0;
    for &anchor in anchors {
        let mut tape = epiwave_core::Tape64::new();
        let trace =
            forward::forward_window(&mut tape, prepared, params, cfg, anchor, &mut Mode::Eval, true)?;
        total += tape.scalar(trace.loss.expect("loss requested"))?;
    }
    Ok(total / anchors.len() as f64)
}

pub fn train(
    prepared: &PreparedSeries,
    cfg: &ModelConfig,
    train_anchors: &[usize],
    val_anchors: &[usize],
) -> Result<(ModelParams, TrainLog)> {
    cfg.validate()?;
    if train_anchors.is_empty() {
        return Err(ModelError::BadConfig("no training anchors".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ModelParams::init(cfg, prepared.n, &mut rng)?;
    let mut adam = AdamState::new(
        &params.set,
        AdamConfig { learning_rate: cfg.learning_rate, ..AdamConfig::default() },
    );

    let mut log = TrainLog::default();
    let mut best: Option<(f64, ModelParams, usize)> = None;
    let mut anchors: Vec<usize> = train_anchors.to_vec();

    for epoch in 1..=cfg.epochs {
        anchors.shuffle(&mut rng);
        let mut epoch_loss_sum = 0.0;
        let mut batches = 0usize;

        for (batch_idx, batch) in anchors.chunks(cfg.batch_size).enumerate() {
            let mut batch_loss = 0.0;
            let mut batch_grads = params.set.zeros_like();
            for (m, &anchor) in batch.iter().enumerate() {
                let m = m + 1;
                let mut tape = epiwave_core::Tape64::new();
                let leaves = crate::forward::ParamLeaves::inject(&mut tape, &params.set);
                let trace = crate::forward::build_graph_entry(
                    &mut tape,
                    prepared,
                    &leaves,
                    cfg,
                    anchor,
                    &mut Mode::Train { rng: &mut rng },
                )?;
                let loss_id = trace.loss.expect("training graph has a loss");
                let loss = tape.scalar(loss_id)?;
                if !loss.is_finite() {
                    return Err(ModelError::NanLoss { epoch, batch: batch_idx });
                }
                let grads = tape.backward(loss_id)?;
                let grad_set = leaves.collect_grads(&tape, &grads)?;
                batch_loss = (m as f64 - 1.0) / m as f64 * batch_loss + loss / m as f64;
                fold_running_mean(&mut batch_grads, &grad_set, m);
                log.clamp_events += tape.clamp_events();
            }
            adam.step(&mut params.set, &batch_grads)?;
            epoch_loss_sum += batch_loss;
            batches += 1;
        }

        let train_loss = epoch_loss_sum / batches as f64;
        let val_loss = mean_loss(prepared, &params, cfg, val_anchors)?;
        log.epochs.push(EpochLog { epoch, train_loss, val_loss });

        let candidate = if val_loss.is_nan() { f64::INFINITY } else { val_loss };
        let improved = match &best {
            None => true,
            Some((best_val, _, _)) => candidate < *best_val,
        };
        if improved {
            best = Some((candidate, params.clone(), epoch));
        }
    }

    let (_, best_params, best_epoch) = best.expect("at least one epoch ran");
    // Without validation anchors every epoch ties at infinity, so the first
    // epoch would win; the last fully trained parameters are the useful ones.
    let (chosen, chosen_epoch) = if val_anchors.is_empty() {
        (params, cfg.epochs)
    } else {
        (best_params, best_epoch)
    };
    log.best_epoch = chosen_epoch;
    Ok((chosen, log))
}
