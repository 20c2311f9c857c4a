//! Synthetic city generator. Produces raw mobility pings, web-search logs,
//! and case counts in the preprocess input schemas, with planted ground
//! truth (trip matrices, matcher-aware search counts, compartment states)
//! so the whole ingestion path can be tested end to end.
//!
//! The epidemic is a seeded stochastic metapopulation SEIR driven by a
//! multi-hump transmission schedule; search volume follows the exposed and
//! infectious pools damped by a per-district awareness decay.

pub mod config;
pub mod epidemic;
pub mod error;
pub mod mobility;
pub mod search;
pub mod simulate;

pub use config::{BetaHump, CityConfig, GridSpec};
pub use epidemic::DayCompartments;
pub use error::CitySimError;
pub use simulate::{emit_raw, simulate, GroundTruth, RawDay};
