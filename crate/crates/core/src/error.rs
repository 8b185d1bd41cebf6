use thiserror::Error;

use crate::dynamics::{Sample, Trajectory};

/// A particle pair `(i, j)` with 1-based labels and `i < j`.
pub type PairLabel = (usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A potential term diverges: two particles (or a point and a force-center
    /// hyperplane) coincide.
    #[error("singular configuration at pair {pair:?}: {detail}")]
    Singular {
        pair: Option<PairLabel>,
        detail: String,
    },

    #[error("chart singularity: {0}")]
    ChartSingularity(String),

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// The collision guard fired on the step after `time`. `last_good` is the
    /// state at `time`; `partial` holds every sample recorded before the abort.
    #[error("integration aborted after t = {time}: pair {pair:?} closer than guard")]
    IntegrationAborted {
        time: f64,
        pair: PairLabel,
        last_good: Box<Sample>,
        partial: Box<Trajectory>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn singular_pair(pair: PairLabel, detail: impl Into<String>) -> Self {
        Error::Singular {
            pair: Some(pair),
            detail: detail.into(),
        }
    }

    pub(crate) fn singular(detail: impl Into<String>) -> Self {
        Error::Singular {
            pair: None,
            detail: detail.into(),
        }
    }
}
