//! Dense matrix arithmetic and reverse-mode differentiation for the
//! forecasting models in this workspace, plus the Adam optimizer and a
//! finite-difference gradient oracle.
//!
//! The tape records a fixed set of primitives (matmul, elementwise ops,
//! activations, column concatenation, row selection, exponential row
//! scaling, mean squared error). That set is exactly what the models need;
//! there is no general computation-graph machinery.

pub mod adam;
pub mod checkpoint;
pub mod error;
pub mod gradcheck;
pub mod lstm;
pub mod matrix;
pub mod params;
pub mod scalar;
pub mod tape;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use error::CoreError;
pub use gradcheck::{finite_diff_check, GradCheckReport, TensorCheck};
pub use lstm::{lstm_cell, LstmCellIds};
pub use matrix::Matrix;
pub use params::ParamSet;
pub use scalar::Scalar;
pub use tape::{Gradients, Tape, VarId};

/// Concrete aliases; all model code in this workspace runs in f64.
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Tape64 = Tape<f64>;
pub type ParamSet64 = ParamSet<f64>;
