use thiserror::Error;

/// Errors produced anywhere in the game model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must lie in {range}, got {value}")]
    Domain {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("indeterminate score difference: both reports score negative infinity")]
    IndeterminateDifference,

    #[error("posterior q0 undefined: Pr(s_A = {signal}) is zero")]
    UndefinedPosterior { signal: u8 },

    #[error("invalid signal model: {field}[{index}]: {reason}")]
    InvalidModel {
        field: &'static str,
        index: usize,
        reason: String,
    },

    #[error("root finder: no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("Alice's vote is indeterminate at p_A = 1/2")]
    IndeterminateAliceVote,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `value ∈ [0, 1]`.
pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            range: "[0,1]",
            value,
        })
    }
}
