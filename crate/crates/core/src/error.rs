use thiserror::Error;

use crate::model::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: String, message: String },
    #[error("validation failed: {0}")]
    Validation(Diagnostic),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown value `{value}` for variable `{variable}`")]
    UnknownValue { variable: String, value: String },
    #[error("node sets overlap")]
    OverlappingSets,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("empty credal set for node `{node}` at parent configuration `{config}`")]
    EmptyCredalSet { node: String, config: String },
    #[error("polytope dimension {dimension} exceeds the enumeration cap {cap}")]
    DimensionTooLarge { dimension: usize, cap: usize },
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("no joint distribution satisfies the constraints")]
    InfeasibleModel,
    #[error("evidence has zero probability")]
    ZeroEvidence,
    #[error("denominator vanishes at every vertex")]
    AllDenominatorsZero,
    #[error("{count} vertex combinations exceed the cap of {cap}")]
    CombinationCap { count: u128, cap: u128 },
    #[error("reduction not applicable: {0}")]
    ReductionNotApplicable(String),
    #[error("problem too large for brute force: {0}")]
    TooLarge(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::Validation(_) => "ValidationError",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::CycleDetected(_) => "CycleDetected",
            Error::UnknownNode(_) => "UnknownNode",
            Error::UnknownValue { .. } => "UnknownValue",
            Error::OverlappingSets => "OverlappingSets",
            Error::InvalidQuery(_) => "InvalidQuery",
            Error::EmptyCredalSet { .. } => "EmptyCredalSet",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::EmptyPolytope => "EmptyPolytope",
            Error::InfeasibleModel => "InfeasibleModel",
            Error::ZeroEvidence => "ZeroEvidence",
            Error::AllDenominatorsZero => "AllDenominatorsZero",
            Error::CombinationCap { .. } => "CombinationCap",
            Error::ReductionNotApplicable(_) => "ReductionNotApplicable",
            Error::TooLarge(_) => "TooLarge",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
