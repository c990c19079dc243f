use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty coefficient sequence")]
    EmptyCoefficients,
    #[error("non-finite scalar at index {0}")]
    NonFinite(usize),
    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,
    #[error("{op} requires constant term {expected}")]
    ConstantTerm { op: &'static str, expected: u8 },
    #[error("series is not normalized (needs c0 = 0, c1 = 1)")]
    NotNormalized,
    #[error("order {got} is too small; at least {needed} is required")]
    InsufficientOrder { needed: usize, got: usize },
    #[error("bivariate grid entry ({0}, {1}) is missing")]
    MissingEntry(usize, usize),
    #[error("index {index} outside the available range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("weight vector must have at least one nonzero entry")]
    ZeroWeights,
    #[error("odd-parity table cannot take weight at even index {0}")]
    EvenWeightIndex(usize),
    #[error("parameter {name} = {value} outside {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("Schwarz polynomial is not admissible (boundary max {0})")]
    InadmissibleSchwarz(f64),
    #[error("unknown functional `{0}`")]
    UnknownFunctional(String),
    #[error("invalid search spec: {0}")]
    InvalidSearch(String),
    #[error("evaluation failed at parameter {param}: {source}")]
    Evaluation {
        param: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
