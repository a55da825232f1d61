use thiserror::Error;

use crate::index::{OutcomePair, SettingPair};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A transition or setting probability under the interference root is zero,
    /// so the entanglement coefficient is undefined.
    #[error("singular context: {factor} = 0 makes the entanglement coefficient undefined")]
    SingularContext { factor: String },

    /// The phase assignment produces something that is not a probability table.
    #[error("inadmissible phases: {detail} (residual {residual:e})")]
    InadmissiblePhases {
        entry: Option<OutcomePair>,
        detail: String,
        residual: f64,
    },

    #[error("context {0} has no elements in the source ensemble")]
    EmptyContext(SettingPair),

    #[error("infeasible hidden allocation: {0}")]
    InfeasibleHiddenAllocation(String),

    /// Q_A and Q_B would make an observable frequency fluctuate.
    #[error("marginal mismatch between Q_A and Q_B: {0}")]
    MarginalMismatch(String),

    #[error("invalid model document: {0}")]
    Parse(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
