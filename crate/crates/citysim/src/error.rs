use thiserror::Error;

#[derive(Debug, Error)]
pub enum CitySimError {
    #[error("invalid city config: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Preprocess(#[from] epiwave_preprocess::PreprocessError),

    #[error(transparent)]
    Wmn(#[from] epiwave_wmn::WmnError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CitySimError> = std::result::Result<T, E>;
