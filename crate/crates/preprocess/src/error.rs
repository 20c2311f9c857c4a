use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("{path}: bad row {line}: {msg}")]
    BadRow { path: String, line: u64, msg: String },

    #[error("no {family} files found in {dir}")]
    NoInput { family: &'static str, dir: String },

    #[error("{family} data missing for {date}")]
    MissingDate { family: &'static str, date: NaiveDate },

    #[error("input calendars misaligned: {family} has no {date} but other sources do")]
    MisalignedCalendar { family: &'static str, date: NaiveDate },

    #[error("dates not consecutive: {prev} followed by {next}")]
    CalendarGap { prev: NaiveDate, next: NaiveDate },

    #[error("cases file missing entry for district '{district}' on {date}")]
    MissingCases { date: NaiveDate, district: String },

    #[error("unknown district '{0}'")]
    UnknownDistrict(String),

    #[error("district map: {0}")]
    BadDistrictMap(String),

    #[error("latitude {0} out of range [-90, 90]")]
    BadLatitude(f64),

    #[error("longitude {0} out of range [-180, 180]")]
    BadLongitude(f64),

    #[error(transparent)]
    Wmn(#[from] epiwave_wmn::WmnError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PreprocessError> = std::result::Result<T, E>;
