use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("probability {value} for {what} is outside [0, 1]")]
    Probability { what: &'static str, value: f64 },

    #[error("price {value} for {what} must be positive")]
    Price { what: &'static str, value: f64 },

    #[error("cpc bid {bid} exceeds the category maximum {max}")]
    BidAboveCategoryMax { bid: f64, max: f64 },

    #[error("{kind} {id} has been expelled")]
    Expelled { kind: &'static str, id: usize },

    #[error("unknown {kind} id {id}")]
    UnknownEntity { kind: &'static str, id: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Probability { .. }
                | Error::Price { .. }
                | Error::Toml(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
