use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WmnError {
    #[error("day {day}: {what} has negative entry {value} at ({row},{col})")]
    NegativeEntry { what: &'static str, day: usize, row: usize, col: usize, value: f64 },

    #[error("day {day}: {what} is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    Dimension { what: &'static str, day: usize, rows: usize, cols: usize, got_rows: usize, got_cols: usize },

    #[error("snapshot days not consecutive: {prev} followed by {next}")]
    NonContiguous { prev: usize, next: usize },

    #[error("empty snapshot series")]
    EmptySeries,

    #[error("adjacency has negative entry {value} at ({row},{col})")]
    AdjacencyNegative { row: usize, col: usize, value: f64 },

    #[error("adjacency must be square over the district set, got {rows}x{cols}")]
    AdjacencyShape { rows: usize, cols: usize },

    #[error("series of {len} days cannot host any (D1={d1}, D2={d2}) window; needs at least {required} days")]
    WindowRangeEmpty { len: usize, d1: usize, d2: usize, required: usize },

    #[error("window anchored at day {anchor} does not fit a {len}-day series with D1={d1}, D2={d2}")]
    WindowOutOfRange { anchor: usize, len: usize, d1: usize, d2: usize },

    #[error("{family} file missing for {date}")]
    MissingDay { family: &'static str, date: NaiveDate },

    #[error("no case files found in {0}")]
    NoData(String),

    #[error("{date}: unknown district '{name}'")]
    UnknownDistrict { date: NaiveDate, name: String },

    #[error("{date}: unknown symptom '{name}'")]
    UnknownSymptom { date: NaiveDate, name: String },

    #[error("{date}: district set differs from the first day")]
    InconsistentDistricts { date: NaiveDate },

    #[error("{date}: symptom set differs from the first day")]
    InconsistentSymptoms { date: NaiveDate },

    #[error("{path}: bad row: {msg}")]
    BadRow { path: String, msg: String },

    #[error(transparent)]
    Core(#[from] epiwave_core::CoreError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = WmnError> = std::result::Result<T, E>;
