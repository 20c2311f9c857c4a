//! The awareness-based graph forecaster and its comparison models.
//!
//! Architecture per training window: a graph convolution propagates each
//! day's normalized symptom-search features over the column-stochastic trip
//! matrix; a learnable per-district rate re-amplifies the decayed search
//! signal by exp(rate^2 * day); the recovered features concatenated with
//! normalized cases feed a shared stacked LSTM whose rolled-out hidden
//! states map through a one-layer perceptron to the next D2 days of
//! district-level cases. Ablations swap out each module; baselines cover
//! historical averages, plain LSTM, and sequence-to-sequence forecasters.

pub mod baselines;
pub mod config;
pub mod error;
pub mod forward;
pub mod params;
pub mod predict;
pub mod prepare;
pub mod store;
pub mod train;

pub use baselines::{ha_all, ha_window, predict_baseline, train_baseline, BaselineKind};
pub use config::{ModelConfig, Readout, Variant};
pub use error::ModelError;
pub use forward::{forward_window, loss_and_grads, Mode, WindowTrace};
pub use params::ModelParams;
pub use predict::{predict_window, predict_window_normalized};
pub use prepare::{prepare, PreparedDay, PreparedSeries};
pub use store::{load_model, save_model, ModelMeta};
pub use train::{train, EpochLog, TrainLog};
