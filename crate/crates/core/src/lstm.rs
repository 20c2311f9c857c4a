//! One LSTM cell step composed from tape primitives.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::tape::{Tape, VarId};

/// Tape handles for one cell's weights. Input projections are `in x hidden`,
/// recurrent projections `hidden x hidden`, biases `1 x hidden`.
#[derive(Clone, Copy, Debug)]
pub struct LstmCellIds {
    pub w_xi: VarId,
    pub w_hi: VarId,
    pub b_i: VarId,
    pub w_xf: VarId,
    pub w_hf: VarId,
    pub b_f: VarId,
    pub w_xg: VarId,
    pub w_hg: VarId,
    pub b_g: VarId,
    pub w_xo: VarId,
    pub w_ho: VarId,
    pub b_o: VarId,
}

/// Standard LSTM cell: input/forget/output gates with sigmoid, tanh
/// candidate, returns (h', c'). Rows of `x`/`h`/`c` are independent batch
/// entries.
pub fn lstm_cell<T: Scalar>(
    tape: &mut Tape<T>,
    x: VarId,
    h_prev: VarId,
    c_prev: VarId,
    w: &LstmCellIds,
) -> Result<(VarId, VarId)> {
    let gate = |tape: &mut Tape<T>, wx, wh, b| -> Result<VarId> {
        let xi = tape.matmul(x, wx)?;
        let hi = tape.matmul(h_prev, wh)?;
        let pre = tape.add(xi, hi)?;
        tape.add_row_vec(pre, b)
    };

    let i_pre = gate(tape, w.w_xi, w.w_hi, w.b_i)?;
    let f_pre = gate(tape, w.w_xf, w.w_hf, w.b_f)?;
    let g_pre = gate(tape, w.w_xg, w.w_hg, w.b_g)?;
    let o_pre = gate(tape, w.w_xo, w.w_ho, w.b_o)?;

    let i = tape.sigmoid(i_pre)?;
    let f = tape.sigmoid(f_pre)?;
    let g = tape.tanh(g_pre)?;
    let o = tape.sigmoid(o_pre)?;

    let keep = tape.hadamard(f, c_prev)?;
    let write = tape.hadamard(i, g)?;
    let c = tape.add(keep, write)?;
    let c_act = tape.tanh(c)?;
    let h = tape.hadamard(o, c_act)?;
    Ok((h, c))
}
