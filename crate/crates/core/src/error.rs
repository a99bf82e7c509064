use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::InstanceError;
use crate::lp::LpError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("no threshold can be certified; the instance is infeasible")]
    GloballyInfeasible,
    #[error("no threshold can be certified within the opening budget")]
    BudgetInfeasible,
    #[error("instance does not satisfy the {variant} variant: {reason}")]
    VariantPrecondition { variant: &'static str, reason: String },
    #[error("invalid tree instance: {0}")]
    InvalidTreeInstance(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has an edge that does not join a client to a facility")]
    NotBipartite,
    #[error("capacities are not contained in {{0, L}} for a single L > 0")]
    NotZeroL,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no capacity-respecting assignment exists; Hall's condition fails on {witness:?}")]
    NoAssignment { witness: Vec<usize> },
    #[error("verification failed in {stage}: {detail}")]
    VerificationFailed { stage: &'static str, detail: String },
    #[error("linear program: {0}")]
    Lp(#[from] LpError),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("no feasible solution exists")]
    Infeasible,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    pub(crate) fn verification(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::VerificationFailed {
            stage,
            detail: detail.into(),
        }
    }

    /// True for failures of an internal check, which indicate a bug rather
    /// than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::VerificationFailed { .. }
                | Error::NoAssignment { .. }
                | Error::Lp(LpError::Unbounded | LpError::ConstraintViolated(_))
        )
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::GloballyInfeasible | Error::BudgetInfeasible | Error::Infeasible
        )
    }
}
