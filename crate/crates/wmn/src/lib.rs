//! The daily web-search / mobility network data model: per-day graph
//! snapshots (districts, trip matrix, symptom-search matrix, case vector),
//! the normalizations the forecasting models consume, rolling training
//! windows, and the on-disk CSV families.

pub mod error;
pub mod io;
pub mod normalize;
pub mod snapshot;
pub mod window;

pub use error::WmnError;
pub use normalize::{normalize_adjacency, normalize_search, AdjacencyNorm, NormalizationStats};
pub use snapshot::{SnapshotSeries, WmnSnapshot};
pub use window::{build_windows, TrainingWindow};
