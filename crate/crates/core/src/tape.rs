//! Reverse-mode differentiation over a fixed primitive set.
//!
//! A `Tape` is an append-only record of primitive applications. Each op
//! computes its value eagerly, so the tape doubles as the forward pass;
//! `backward` walks it once in reverse to produce exact gradients of a
//! scalar node with respect to every earlier node. `replay_check` verifies
//! that recomputing the forward pass from the leaves reproduces every
//! recorded value bit for bit.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Handle to a node on the tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Exponent cap for `exp_row_scale`; beyond it the factor is clamped and the
/// rate stops receiving gradient, which the tape reports via `clamp_events`.
pub const EXP_CLAMP: f64 = 50.0;

#[derive(Clone, Debug)]
enum Op<T> {
    Leaf,
    MatMul(VarId, VarId),
    Add(VarId, VarId),
    /// Broadcast a 1 x k row vector over every row of an m x k matrix.
    AddRowVec(VarId, VarId),
    Hadamard(VarId, VarId),
    Relu(VarId),
    Sigmoid(VarId),
    Tanh(VarId),
    ConcatCols(VarId, VarId),
    RowSelect(VarId, usize),
    /// Scale row i of the input by exp(rates[i]^2 * dt).
    ExpRowScale { input: VarId, rates: VarId, dt: T },
    Mse(VarId, VarId),
}

#[derive(Clone, Debug)]
struct Node<T> {
    op: Op<T>,
    value: Matrix<T>,
}

#[derive(Clone, Debug, Default)]
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
    clamp_events: u64,
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new(), clamp_events: 0 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of exponent clamps hit while recording; nonzero values are a
    /// training diagnostic, not an error.
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    pub fn value(&self, id: VarId) -> &Matrix<T> {
        &self.nodes[id.0].value
    }

    pub fn scalar(&self, id: VarId) -> Result<T> {
        let v = self.value(id);
        if v.shape() != (1, 1) {
            return Err(CoreError::NonScalarLoss(id.0));
        }
        Ok(v.get(0, 0))
    }

    fn push(&mut self, op: Op<T>, value: Matrix<T>, name: &'static str) -> Result<VarId> {
        value.check_finite(name)?;
        self.nodes.push(Node { op, value });
        Ok(VarId(self.nodes.len() - 1))
    }

    pub fn leaf(&mut self, value: Matrix<T>) -> VarId {
        self.nodes.push(Node { op: Op::Leaf, value });
        VarId(self.nodes.len() - 1)
    }

    pub fn matmul(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let value = self.value(a).matmul(self.value(b))?;
        self.push(Op::MatMul(a, b), value, "matmul")
    }

    pub fn add(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let value = self.value(a).add(self.value(b))?;
        self.push(Op::Add(a, b), value, "add")
    }

    pub fn add_row_vec(&mut self, a: VarId, v: VarId) -> Result<VarId> {
        let value = add_row_vec_value(self.value(a), self.value(v))?;
        self.push(Op::AddRowVec(a, v), value, "add_row_vec")
    }

    pub fn hadamard(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let value = self.value(a).hadamard(self.value(b))?;
        self.push(Op::Hadamard(a, b), value, "hadamard")
    }

    /// Elementwise max(0, x); the subgradient at 0 is taken to be 0.
    pub fn relu(&mut self, a: VarId) -> Result<VarId> {
        let value = self.value(a).map(|x| if x > T::zero() { x } else { T::zero() });
        self.push(Op::Relu(a), value, "relu")
    }

    pub fn sigmoid(&mut self, a: VarId) -> Result<VarId> {
        let value = self.value(a).map(sigmoid_stable);
        self.push(Op::Sigmoid(a), value, "sigmoid")
    }

    pub fn tanh(&mut self, a: VarId) -> Result<VarId> {
        let value = self.value(a).map(|x| x.tanh());
        self.push(Op::Tanh(a), value, "tanh")
    }

    pub fn concat_cols(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (va, vb) = (self.value(a), self.value(b));
        if va.rows() != vb.rows() {
            return Err(CoreError::ShapeMismatch {
                op: "concat_cols",
                left_rows: va.rows(),
                left_cols: va.cols(),
                right_rows: vb.rows(),
                right_cols: vb.cols(),
            });
        }
        let (rows, ca, cb) = (va.rows(), va.cols(), vb.cols());
        let mut value = Matrix::zeros(rows, ca + cb);
        for i in 0..rows {
            for j in 0..ca {
                value.set(i, j, va.get(i, j));
            }
            for j in 0..cb {
                value.set(i, ca + j, vb.get(i, j));
            }
        }
        self.push(Op::ConcatCols(a, b), value, "concat_cols")
    }

    pub fn row_select(&mut self, a: VarId, row: usize) -> Result<VarId> {
        let va = self.value(a);
        if row >= va.rows() {
            return Err(CoreError::IndexOutOfBounds { op: "row_select", index: row, bound: va.rows() });
        }
        let value = Matrix::new(1, va.cols(), va.row(row).to_vec())?;
        self.push(Op::RowSelect(a, row), value, "row_select")
    }

    /// Multiply row i of `input` by exp(rates[i]^2 * dt). `rates` is n x 1 and
    /// participates in gradient flow; exponents above `EXP_CLAMP` are clamped.
    pub fn exp_row_scale(&mut self, input: VarId, rates: VarId, dt: T) -> Result<VarId> {
        let (vi, vr) = (self.value(input), self.value(rates));
        if vr.cols() != 1 || vr.rows() != vi.rows() {
            return Err(CoreError::ShapeMismatch {
                op: "exp_row_scale",
                left_rows: vi.rows(),
                left_cols: vi.cols(),
                right_rows: vr.rows(),
                right_cols: vr.cols(),
            });
        }
        let (value, clamps) = exp_row_scale_value(vi, vr, dt);
        self.clamp_events += clamps;
        self.push(Op::ExpRowScale { input, rates, dt }, value, "exp_row_scale")
    }

    /// Mean squared error over all entries; the result is a 1 x 1 node.
    pub fn mse(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (va, vb) = (self.value(a), self.value(b));
        if va.shape() != vb.shape() {
            return Err(CoreError::ShapeMismatch {
                op: "mse",
                left_rows: va.rows(),
                left_cols: va.cols(),
                right_rows: vb.rows(),
                right_cols: vb.cols(),
            });
        }
        let n = T::from_usize(va.len()).expect("matrix size fits scalar");
        let sum = va
            .data()
            .iter()
            .zip(vb.data())
            .map(|(&x, &y)| (x - y) * (x - y))
            .fold(T::zero(), |acc, v| acc + v);
        let value = Matrix::new(1, 1, vec![sum / n])?;
        self.push(Op::Mse(a, b), value, "mse")
    }

    /// Gradients of the scalar node `loss` with respect to every node.
    pub fn backward(&self, loss: VarId) -> Result<Gradients<T>> {
        if self.value(loss).shape() != (1, 1) {
            return Err(CoreError::NonScalarLoss(loss.0));
        }
        let mut grads: Vec<Option<Matrix<T>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Matrix::filled(1, 1, T::one()));

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].clone() else { continue };
            match &self.nodes[idx].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let da = g.matmul_nt(self.value(*b))?;
                    let db = self.value(*a).matmul_tn(&g)?;
                    accumulate(&mut grads[a.0], da)?;
                    accumulate(&mut grads[b.0], db)?;
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads[a.0], g.clone())?;
                    accumulate(&mut grads[b.0], g.clone())?;
                }
                Op::AddRowVec(a, v) => {
                    let dv = Matrix::new(1, g.cols(), g.col_sums())?;
                    accumulate(&mut grads[a.0], g.clone())?;
                    accumulate(&mut grads[v.0], dv)?;
                }
                Op::Hadamard(a, b) => {
                    let da = g.hadamard(self.value(*b))?;
                    let db = g.hadamard(self.value(*a))?;
                    accumulate(&mut grads[a.0], da)?;
                    accumulate(&mut grads[b.0], db)?;
                }
                Op::Relu(a) => {
                    let mask = self.value(*a).map(|x| if x > T::zero() { T::one() } else { T::zero() });
                    accumulate(&mut grads[a.0], g.hadamard(&mask)?)?;
                }
                Op::Sigmoid(a) => {
                    let y = &self.nodes[idx].value;
                    let dy = y.map(|s| s * (T::one() - s));
                    accumulate(&mut grads[a.0], g.hadamard(&dy)?)?;
                }
                Op::Tanh(a) => {
                    let y = &self.nodes[idx].value;
                    let dy = y.map(|t| T::one() - t * t);
                    accumulate(&mut grads[a.0], g.hadamard(&dy)?)?;
                }
                Op::ConcatCols(a, b) => {
                    let (ca, cb) = (self.value(*a).cols(), self.value(*b).cols());
                    let rows = g.rows();
                    let mut da = Matrix::zeros(rows, ca);
                    let mut db = Matrix::zeros(rows, cb);
                    for i in 0..rows {
                        for j in 0..ca {
                            da.set(i, j, g.get(i, j));
                        }
                        for j in 0..cb {
                            db.set(i, j, g.get(i, ca + j));
                        }
                    }
                    accumulate(&mut grads[a.0], da)?;
                    accumulate(&mut grads[b.0], db)?;
                }
                Op::RowSelect(a, row) => {
                    let va = self.value(*a);
                    let mut da = Matrix::zeros(va.rows(), va.cols());
                    for j in 0..va.cols() {
                        da.set(*row, j, g.get(0, j));
                    }
                    accumulate(&mut grads[a.0], da)?;
                }
                Op::ExpRowScale { input, rates, dt } => {
                    let vi = self.value(*input);
                    let vr = self.value(*rates);
                    let clamp = T::c(EXP_CLAMP);
                    let mut di = Matrix::zeros(vi.rows(), vi.cols());
                    let mut dr = Matrix::zeros(vr.rows(), 1);
                    for i in 0..vi.rows() {
                        let rate = vr.get(i, 0);
                        let exponent = rate * rate * *dt;
                        let clamped = exponent > clamp;
                        let factor = if clamped { clamp.exp() } else { exponent.exp() };
                        let mut acc = T::zero();
                        for j in 0..vi.cols() {
                            let gij = g.get(i, j);
                            di.set(i, j, gij * factor);
                            acc += gij * vi.get(i, j);
                        }
                        // d factor / d rate = 2 * rate * dt * factor; zero when clamped.
                        if !clamped {
                            dr.set(i, 0, acc * factor * (T::one() + T::one()) * rate * *dt);
                        }
                    }
                    accumulate(&mut grads[input.0], di)?;
                    accumulate(&mut grads[rates.0], dr)?;
                }
                Op::Mse(a, b) => {
                    let (va, vb) = (self.value(*a), self.value(*b));
                    let n = T::from_usize(va.len()).expect("matrix size fits scalar");
                    let scale = g.get(0, 0) * (T::one() + T::one()) / n;
                    let diff = va.sub(vb)?;
                    accumulate(&mut grads[a.0], diff.scaled(scale))?;
                    accumulate(&mut grads[b.0], diff.scaled(-scale))?;
                }
            }
        }
        Ok(Gradients { grads })
    }

    /// Recompute every non-leaf value from the leaves and verify that each
    /// matches the recorded value exactly.
    pub fn replay_check(&self) -> Result<()> {
        let mut values: Vec<Matrix<T>> = Vec::with_capacity(self.nodes.len());
        for (idx, node) in self.nodes.iter().enumerate() {
            let recomputed = match &node.op {
                Op::Leaf => node.value.clone(),
                Op::MatMul(a, b) => values[a.0].matmul(&values[b.0])?,
                Op::Add(a, b) => values[a.0].add(&values[b.0])?,
                Op::AddRowVec(a, v) => add_row_vec_value(&values[a.0], &values[v.0])?,
                Op::Hadamard(a, b) => values[a.0].hadamard(&values[b.0])?,
                Op::Relu(a) => values[a.0].map(|x| if x > T::zero() { x } else { T::zero() }),
                Op::Sigmoid(a) => values[a.0].map(sigmoid_stable),
                Op::Tanh(a) => values[a.0].map(|x| x.tanh()),
                Op::ConcatCols(a, b) => {
                    let (va, vb) = (&values[a.0], &values[b.0]);
                    let mut out = Matrix::zeros(va.rows(), va.cols() + vb.cols());
                    for i in 0..va.rows() {
                        for j in 0..va.cols() {
                            out.set(i, j, va.get(i, j));
                        }
                        for j in 0..vb.cols() {
                            out.set(i, va.cols() + j, vb.get(i, j));
                        }
                    }
                    out
                }
                Op::RowSelect(a, row) => {
                    Matrix::new(1, values[a.0].cols(), values[a.0].row(*row).to_vec())?
                }
                Op::ExpRowScale { input, rates, dt } => {
                    exp_row_scale_value(&values[input.0], &values[rates.0], *dt).0
                }
                Op::Mse(a, b) => {
                    let (va, vb) = (&values[a.0], &values[b.0]);
                    let n = T::from_usize(va.len()).expect("matrix size fits scalar");
                    let sum = va
                        .data()
                        .iter()
                        .zip(vb.data())
                        .map(|(&x, &y)| (x - y) * (x - y))
                        .fold(T::zero(), |acc, v| acc + v);
                    Matrix::new(1, 1, vec![sum / n])?
                }
            };
            if recomputed != node.value {
                return Err(CoreError::ReplayDiverged(idx));
            }
            values.push(recomputed);
        }
        Ok(())
    }
}

/// Per-node gradients produced by `Tape::backward`.
pub struct Gradients<T> {
    grads: Vec<Option<Matrix<T>>>,
}

impl<T: Scalar> Gradients<T> {
    /// Gradient of the loss with respect to node `id`, if the node
    /// participated in the loss.
    pub fn get(&self, id: VarId) -> Option<&Matrix<T>> {
        self.grads.get(id.0).and_then(Option::as_ref)
    }

    /// Like `get`, but returns zeros of the node's shape for detached nodes.
    pub fn get_or_zeros(&self, tape: &Tape<T>, id: VarId) -> Matrix<T> {
        match self.get(id) {
            Some(g) => g.clone(),
            None => {
                let (r, c) = tape.value(id).shape();
                Matrix::zeros(r, c)
            }
        }
    }
}

fn accumulate<T: Scalar>(slot: &mut Option<Matrix<T>>, delta: Matrix<T>) -> Result<()> {
    match slot {
        Some(existing) => {
            *existing = existing.add(&delta)?;
        }
        None => *slot = Some(delta),
    }
    Ok(())
}

fn add_row_vec_value<T: Scalar>(a: &Matrix<T>, v: &Matrix<T>) -> Result<Matrix<T>> {
    if v.rows() != 1 || v.cols() != a.cols() {
        return Err(CoreError::ShapeMismatch {
            op: "add_row_vec",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: v.rows(),
            right_cols: v.cols(),
        });
    }
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, a.get(i, j) + v.get(0, j));
        }
    }
    Ok(out)
}

fn exp_row_scale_value<T: Scalar>(input: &Matrix<T>, rates: &Matrix<T>, dt: T) -> (Matrix<T>, u64) {
    let clamp = T::c(EXP_CLAMP);
    let mut out = Matrix::zeros(input.rows(), input.cols());
    let mut clamps = 0;
    for i in 0..input.rows() {
        let rate = rates.get(i, 0);
        let mut exponent = rate * rate * dt;
        if exponent > clamp {
            exponent = clamp;
            clamps += 1;
        }
        let factor = exponent.exp();
        for j in 0..input.cols() {
            out.set(i, j, input.get(i, j) * factor);
        }
    }
    (out, clamps)
}

/// Numerically stable logistic function.
fn sigmoid_stable<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}
