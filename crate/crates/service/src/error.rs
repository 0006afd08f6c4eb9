use thiserror::Error;

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] shelfplan_core::Error),

    #[error("no session `{0}`")]
    SessionNotFound(String),

    #[error("session has no plan")]
    NoPlan,

    #[error("plan is already complete")]
    PlanExhausted,

    #[error("event log: {0}")]
    EventLog(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Core(e) => e.code(),
            ServiceError::SessionNotFound(_) => "SessionNotFound",
            ServiceError::NoPlan => "NoPlan",
            ServiceError::PlanExhausted => "PlanExhausted",
            ServiceError::EventLog(_) => "EventLogError",
        }
    }

    /// HTTP status for the error body.
    pub fn status(&self) -> u16 {
        use shelfplan_core::Error as E;
        match self {
            ServiceError::Core(
                E::Schema(_) | E::InvalidK(_) | E::InvalidArgument(_) | E::EmptyCluster,
            ) => 400,
            ServiceError::Core(E::MissingBox(_)) | ServiceError::SessionNotFound(_) => 404,
            ServiceError::Core(
                E::Validation(_) | E::GenerationExhausted { .. } | E::EmptyScene,
            ) => 422,
            ServiceError::Core(E::PlanDictionaryMismatch(_)) => 409,
            ServiceError::NoPlan | ServiceError::PlanExhausted => 409,
            ServiceError::Core(E::CyclicDependencies(_) | E::NoSafeOrder(_))
            | ServiceError::EventLog(_) => 500,
        }
    }

    pub fn is_input_error(&self) -> bool {
        matches!(self, ServiceError::Core(e) if e.is_input_error())
    }
}

pub(crate) fn schema(e: serde_json::Error) -> ServiceError {
    ServiceError::Core(shelfplan_core::Error::Schema(e.to_string()))
}
