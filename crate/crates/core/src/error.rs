use thiserror::Error;

/// Failures raised by the numerical kernel and the model builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adaptive quadrature did not converge within {intervals} subintervals")]
    NonIntegrableOscillation { intervals: usize },
    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),
    #[error("fundamental function diverges at t = {t}")]
    DivergentRepresentation { t: f64 },
    #[error("invalid space: {0}")]
    SpecInvalid(String),
    #[error("density has zero mass")]
    ZeroMass,
    #[error("no almost-geometric witness for the sequence")]
    NoWitness,
    #[error("candidate family is empty")]
    EmptyFamily,
    #[error("no characterization covers (p, q, r) = ({p}, {q}, {r})")]
    UnsupportedRegime { p: String, q: String, r: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
