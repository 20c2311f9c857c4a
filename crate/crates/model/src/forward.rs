//! Tape assembly for one training window, shared by the full model, its
//! ablations, and the recurrent baselines.

use epiwave_core::{lstm_cell, LstmCellIds, Matrix64, ParamSet64, Tape64, VarId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ModelConfig, Readout, Variant};
use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::prepare::PreparedSeries;

/// Dropout is active only while training; evaluation is deterministic.
pub enum Mode<'r> {
    Eval,
    Train { rng: &'r mut ChaCha8Rng },
}

impl Mode<'_> {
    fn is_train(&self) -> bool {
        matches!(self, Mode::Train { .. })
    }
}

/// Tape handles for every parameter tensor, aligned with the set's slots.
pub(crate) struct ParamLeaves {
    names: Vec<String>,
    ids: Vec<VarId>,
}

impl ParamLeaves {
    pub(crate) fn inject(tape: &mut Tape64, set: &ParamSet64) -> Self {
        let mut names = Vec::with_capacity(set.len());
        let mut ids = Vec::with_capacity(set.len());
        for (name, value) in set.iter() {
            names.push(name.to_string());
            ids.push(tape.leaf(value.clone()));
        }
        Self { names, ids }
    }

    pub(crate) fn id(&self, name: &str) -> Result<VarId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.ids[i])
            .ok_or_else(|| epiwave_core::CoreError::UnknownParam(name.to_string()).into())
    }

    /// Gradients of the loss with respect to every parameter, zeros for
    /// tensors the graph never touched.
    pub(crate) fn collect_grads(
        &self,
        tape: &Tape64,
        grads: &epiwave_core::Gradients<f64>,
    ) -> Result<ParamSet64> {
        let mut out = ParamSet64::new();
        for (name, id) in self.names.iter().zip(&self.ids) {
            out.push(name.clone(), grads.get_or_zeros(tape, *id))?;
        }
        Ok(out)
    }

    fn lstm_layer(&self, prefix: &str) -> Result<LstmCellIds> {
        Ok(LstmCellIds {
            w_xi: self.id(&format!("{prefix}.w_xi"))?,
            w_hi: self.id(&format!("{prefix}.w_hi"))?,
            b_i: self.id(&format!("{prefix}.b_i"))?,
            w_xf: self.id(&format!("{prefix}.w_xf"))?,
            w_hf: self.id(&format!("{prefix}.w_hf"))?,
            b_f: self.id(&format!("{prefix}.b_f"))?,
            w_xg: self.id(&format!("{prefix}.w_xg"))?,
            w_hg: self.id(&format!("{prefix}.w_hg"))?,
            b_g: self.id(&format!("{prefix}.b_g"))?,
            w_xo: self.id(&format!("{prefix}.w_xo"))?,
            w_ho: self.id(&format!("{prefix}.w_ho"))?,
            b_o: self.id(&format!("{prefix}.b_o"))?,
        })
    }
}

pub struct WindowTrace {
    /// n x d2 predictions on the normalized scale.
    pub predictions: VarId,
    pub loss: Option<VarId>,
    /// Per input day: spatial output, recovered features, concatenated rows.
    pub spatial: Vec<VarId>,
    pub recovered: Vec<VarId>,
    pub features: Vec<VarId>,
}

fn dropout_mask(tape: &mut Tape64, rows: usize, cols: usize, p: f64, rng: &mut ChaCha8Rng) -> VarId {
    let keep = 1.0 - p;
    let data = (0..rows * cols)
        .map(|_| if rng.random_range(0.0..1.0) < keep { 1.0 / keep } else { 0.0 })
        .collect();
    tape.leaf(Matrix64::new(rows, cols, data).expect("mask entries are finite"))
}

fn maybe_dropout(
    tape: &mut Tape64,
    x: VarId,
    cfg: &ModelConfig,
    mode: &mut Mode,
) -> Result<VarId> {
    if cfg.dropout == 0.0 {
        return Ok(x);
    }
    match mode {
        Mode::Eval => Ok(x),
        Mode::Train { rng } => {
            let (rows, cols) = tape.value(x).shape();
            let mask = dropout_mask(tape, rows, cols, cfg.dropout, rng);
            Ok(tape.hadamard(x, mask)?)
        }
    }
}

/// A stacked recurrence with per-step inter-layer dropout.
pub(crate) struct LstmStack {
    layers: Vec<LstmCellIds>,
    hidden: usize,
}

impl LstmStack {
    pub(crate) fn from_leaves(leaves: &ParamLeaves, prefix: &str, l2: usize, hidden: usize) -> Result<Self> {
        let layers = (0..l2)
            .map(|l| leaves.lstm_layer(&format!("{prefix}{l}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layers, hidden })
    }

    pub(crate) fn zero_state(&self, tape: &mut Tape64, batch: usize) -> Vec<(VarId, VarId)> {
        self.layers
            .iter()
            .map(|_| {
                let h = tape.leaf(Matrix64::zeros(batch, self.hidden));
                let c = tape.leaf(Matrix64::zeros(batch, self.hidden));
                (h, c)
            })
            .collect()
    }

    /// One time step through all layers; returns the top hidden state.
    pub(crate) fn step(
        &self,
        tape: &mut Tape64,
        x: VarId,
        state: &mut [(VarId, VarId)],
        cfg: &ModelConfig,
        mode: &mut Mode,
    ) -> Result<VarId> {
        let mut input = x;
        for (l, cell) in self.layers.iter().enumerate() {
            let (h_prev, c_prev) = state[l];
            let (h, c) = lstm_cell(tape, input, h_prev, c_prev, cell)?;
            state[l] = (h, c);
            input = if l + 1 < self.layers.len() {
                maybe_dropout(tape, h, cfg, mode)?
            } else {
                h
            };
        }
        Ok(input)
    }
}

/// Shared readout: consume `inputs` through the stack, then either roll
/// `d2` zero-input steps (one perceptron scalar each) or map the final
/// hidden state to a d2-vector.
#[allow(clippy::too_many_arguments)]
pub(crate) fn temporal_readout(
    tape: &mut Tape64,
    stack: &LstmStack,
    inputs: &[VarId],
    init_state: Option<Vec<(VarId, VarId)>>,
    rollout_stack: Option<&LstmStack>,
    leaves: &ParamLeaves,
    cfg: &ModelConfig,
    mode: &mut Mode,
    batch: usize,
    input_width: usize,
) -> Result<VarId> {
    let mut state = init_state.unwrap_or_else(|| stack.zero_state(tape, batch));
    let mut last_top = None;
    for &x in inputs {
        last_top = Some(stack.step(tape, x, &mut state, cfg, mode)?);
    }

    let w = leaves.id("readout.w")?;
    let b = leaves.id("readout.b")?;
    match cfg.readout {
        Readout::Direct => {
            let top = last_top.expect("at least one input day");
            let dropped = maybe_dropout(tape, top, cfg, mode)?;
            let proj = tape.matmul(dropped, w)?;
            Ok(tape.add_row_vec(proj, b)?)
        }
        Readout::Rollout => {
            // With a separate decoder (sequence-to-sequence) the decoder
            // starts from the encoder's final state; otherwise the same
            // recurrence simply keeps rolling.
            let decoder = rollout_stack.unwrap_or(stack);
            let mut dec_state = state;
            let zero_x = tape.leaf(Matrix64::zeros(batch, input_width));
            let mut prediction = None;
            for _ in 0..cfg.d2 {
                let top = decoder.step(tape, zero_x, &mut dec_state, cfg, mode)?;
                let dropped = maybe_dropout(tape, top, cfg, mode)?;
                let proj = tape.matmul(dropped, w)?;
                let step_out = tape.add_row_vec(proj, b)?;
                prediction = Some(match prediction {
                    None => step_out,
                    Some(prev) => tape.concat_cols(prev, step_out)?,
                });
            }
            Ok(prediction.expect("d2 >= 1"))
        }
    }
}

/// Assemble one window's graph. `anchor` is the last input day.
pub fn forward_window(
    tape: &mut Tape64,
    prepared: &PreparedSeries,
    params: &ModelParams,
    cfg: &ModelConfig,
    anchor: usize,
    mode: &mut Mode,
    with_loss: bool,
) -> Result<WindowTrace> {
    if anchor + 1 < cfg.d1 {
        return Err(ModelError::InsufficientHistory { anchor, d1: cfg.d1 });
    }
    if with_loss && anchor + cfg.d2 > prepared.len() - 1 {
        return Err(ModelError::BadAnchor { anchor, len: prepared.len() });
    }
    let leaves = ParamLeaves::inject(tape, &params.set);
    build_graph(tape, prepared, &leaves, cfg, anchor, mode, with_loss)
}

/// Training-loop entry: graph with loss over pre-injected leaves.
pub(crate) fn build_graph_entry(
    tape: &mut Tape64,
    prepared: &PreparedSeries,
    leaves: &ParamLeaves,
    cfg: &ModelConfig,
    anchor: usize,
    mode: &mut Mode,
) -> Result<WindowTrace> {
    build_graph(tape, prepared, leaves, cfg, anchor, mode, true)
}

/// One window's loss and its gradients with respect to every parameter.
pub fn loss_and_grads(
    prepared: &PreparedSeries,
    params: &ModelParams,
    cfg: &ModelConfig,
    anchor: usize,
    mode: &mut Mode,
) -> Result<(f64, ParamSet64)> {
    let mut tape = Tape64::new();
    let leaves = ParamLeaves::inject(&mut tape, &params.set);
    let trace = build_graph(&mut tape, prepared, &leaves, cfg, anchor, mode, true)?;
    let loss_id = trace.loss.expect("built with loss");
    let loss = tape.scalar(loss_id)?;
    let grads = tape.backward(loss_id)?;
    let grad_set = leaves.collect_grads(&tape, &grads)?;
    Ok((loss, grad_set))
}

fn build_graph(
    tape: &mut Tape64,
    prepared: &PreparedSeries,
    leaves: &ParamLeaves,
    cfg: &ModelConfig,
    anchor: usize,
    mode: &mut Mode,
    with_loss: bool,
) -> Result<WindowTrace> {
    let n = prepared.n;
    let first_day = anchor + 1 - cfg.d1;
    let lambda = leaves.id("awareness.lambda")?;

    let mut spatial = Vec::with_capacity(cfg.d1);
    let mut recovered = Vec::with_capacity(cfg.d1);
    let mut features = Vec::with_capacity(cfg.d1);

    for day in first_day..=anchor {
        let pd = &prepared.days[day];
        let h0 = tape.leaf(pd.search_norm.clone());

        let hs = if matches!(cfg.variant, Variant::Ws) {
            h0
        } else {
            let adj = tape.leaf(pd.adjacency.clone());
            let mut x = h0;
            for layer in 0..cfg.l1 {
                let w = leaves.id(&format!("gcn.w{layer}"))?;
                let propagated = tape.matmul(adj, x)?;
                let projected = tape.matmul(propagated, w)?;
                x = tape.relu(projected)?;
            }
            x
        };
        spatial.push(hs);

        let hr = if matches!(cfg.variant, Variant::Wsa) {
            hs
        } else {
            tape.exp_row_scale(hs, lambda, day as f64)?
        };
        recovered.push(hr);

        let cases = tape.leaf(pd.cases_norm.clone());
        let ha = tape.concat_cols(hr, cases)?;
        features.push(ha);
    }

    let predictions = match cfg.variant {
        Variant::Wt => {
            let mut joined = features[0];
            for &f in &features[1..] {
                joined = tape.concat_cols(joined, f)?;
            }
            let w = leaves.id("direct.w")?;
            let b = leaves.id("direct.b")?;
            let proj = tape.matmul(joined, w)?;
            tape.add_row_vec(proj, b)?
        }
        _ => {
            let stack = LstmStack::from_leaves(leaves, "lstm", cfg.l2, cfg.hidden)?;
            temporal_readout(
                tape,
                &stack,
                &features,
                None,
                None,
                leaves,
                cfg,
                mode,
                n,
                cfg.k + 1,
            )?
        }
    };

    let loss = if with_loss {
        let target = tape.leaf(prepared.targets_normalized(anchor, cfg.d2)?);
        Some(tape.mse(predictions, target)?)
    } else {
        None
    };

    Ok(WindowTrace { predictions, loss, spatial, recovered, features })
}
