use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("state space mismatch: {left} states vs {right} states")]
    SpaceMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("word of length {len} exceeds the {available} distributions of a product sequence without a tail")]
    SequenceExhausted { len: usize, available: usize },

    #[error("enumeration budget exceeded: more than {cap} leaf words")]
    Budget { cap: u64 },

    #[error("initial vector is not invariant under the transition matrix (residual {residual:.3e})")]
    NotStationary { residual: f64 },

    #[error("transformation does not preserve the measure (residual {residual:.3e})")]
    NotMeasurePreserving { residual: f64 },

    #[error("transition matrix is reducible; strongly connected components: {components:?}")]
    Reducible { components: Vec<Vec<usize>> },

    #[error("subshift is empty after trimming stranded states")]
    EmptySubshift,

    #[error("count overflow computing word complexity at length {n}")]
    Overflow { n: usize },

    #[error("unknown check `{name}`; registered checks: {}", registry.join(", "))]
    UnknownCheck { name: String, registry: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
