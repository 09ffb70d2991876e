use thiserror::Error;

/// Largest qubit count supported by the dense and spectral representations.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {n} outside supported range 1..={max}")]
    Capacity { n: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not a quantum Boolean function (||A^2 - I|| = {deviation:.3e})")]
    NotBoolean { deviation: f64 },

    #[error("operator norm {norm} exceeds 1")]
    NormPrecondition { norm: f64 },

    #[error("qubit index {index} out of range for n = {n}")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("law `{0}` has no default constant; pass an explicit constant")]
    MissingConstant(String),

    #[error("invalid truth table: {0}")]
    TruthTable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Capacity { n, max: MAX_QUBITS });
    }
    Ok(())
}
