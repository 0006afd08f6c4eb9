use thiserror::Error;

use crate::scene::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input document is not well-formed or does not match the schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// The document parsed but describes an invalid scene.
    #[error("validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error(
        "scene generation exhausted its attempt budget after placing {placed} of {requested} boxes"
    )]
    GenerationExhausted { placed: usize, requested: usize },

    #[error("box `{0}` is not in the scene")]
    MissingBox(String),

    /// The dependency relation contains a cycle. The physics engine never
    /// produces one, so seeing this means a hand-built or corrupted dictionary.
    #[error("dependency cycle through {0:?}")]
    CyclicDependencies(Vec<String>),

    /// Every remaining candidate would make another box fall. Only happens
    /// when the graph and the scene disagree.
    #[error("no collapse-free removal among {0:?}")]
    NoSafeOrder(Vec<String>),

    #[error("plan does not match the dependency dictionary: {0}")]
    PlanDictionaryMismatch(String),

    #[error("k must be at least 1, got {0}")]
    InvalidK(usize),

    #[error("cannot estimate a target from an empty cluster")]
    EmptyCluster,

    #[error("scene has no boxes")]
    EmptyScene,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code used on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Schema(_) => "SchemaError",
            Error::Validation(_) => "ValidationError",
            Error::GenerationExhausted { .. } => "GenerationExhausted",
            Error::MissingBox(_) => "MissingBox",
            Error::CyclicDependencies(_) => "CyclicDependencies",
            Error::NoSafeOrder(_) => "NoSafeOrder",
            Error::PlanDictionaryMismatch(_) => "PlanDictionaryMismatch",
            Error::InvalidK(_) => "InvalidK",
            Error::EmptyCluster => "EmptyCluster",
            Error::EmptyScene => "EmptyScene",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Schema and validation failures are the caller's input problem.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Schema(_) | Error::Validation(_))
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
