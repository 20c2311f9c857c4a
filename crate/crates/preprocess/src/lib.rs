//! Conversion of raw mobility pings and web-search logs into daily snapshot
//! series: permanent-user filtering, mean-shift home estimation, stay and
//! trip extraction, symptom-query counting, and assembly.

pub mod districts;
pub mod error;
pub mod home;
pub mod pipeline;
pub mod records;
pub mod stays;
pub mod symptoms;
pub mod trips;

pub use districts::{DistrictAssigner, DistrictMap, Rect};
pub use error::PreprocessError;
pub use home::{estimate_home, filter_permanent_users, is_night_hour, mean_shift_mode};
pub use pipeline::{run_preprocess, PreprocessConfig, PreprocessSummary};
pub use records::{MobilityPing, SearchRecord};
pub use stays::{extract_stays, Stay};
pub use symptoms::SymptomLexicon;
pub use trips::count_trips;
