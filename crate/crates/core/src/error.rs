use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A wavevector with vanishing vertical component entered a strict three-wave relation.
    #[error("catalytic input: vertical components {0:?} must all be nonzero")]
    Catalytic([i64; 3]),

    #[error("degeneracy condition violated: G = {0} is nonzero")]
    NotDegenerate(i64),

    #[error("reducible: {0}")]
    Reducible(String),

    /// Integer data that cannot come from a valid degenerate resonant pair.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        reason: String,
        partial: Box<Trajectory>,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Catalytic(_) => "catalytic",
            Error::NotDegenerate(_) => "not_degenerate",
            Error::Reducible(_) => "reducible",
            Error::Inconsistent(_) => "inconsistent",
            Error::Integration { .. } => "integration",
        }
    }
}
