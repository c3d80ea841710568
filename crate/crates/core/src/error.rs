use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not supported (expected 2 or 4)")]
    UnsupportedDim(usize),

    #[error("expected {expected} matrix entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from the conjugate of ({col}, {row}) by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("trace is {0} (expected 1)")]
    Trace(f64),

    #[error("not positive semidefinite: eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("temperature {t} K is below the minimum {t_min} K")]
    TemperatureTooLow { t: f64, t_min: f64 },

    #[error("T2 = {t2} s exceeds 2*T1 = {} s; the relaxation channel would not be CPTP", 2.0 * .t1)]
    InvalidRelaxation { t1: f64, t2: f64 },

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("unknown gate kind `{0}`")]
    UnknownGate(String),

    #[error("gate `{kind}` cannot act on qubits {qubits:?}")]
    InvalidQubits { kind: String, qubits: Vec<usize> },

    #[error("gate `{0}` is not a basis gate; transpile before noisy execution")]
    NotTranspiled(String),

    #[error("gate `{0}` has no unitary representation")]
    NonUnitary(String),

    #[error("gate {index}: {source}")]
    AtGate { index: usize, source: Box<Error> },

    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },

    #[error("populations do not form a probability distribution (sum {0})")]
    NotDistribution(f64),

    #[error("evaluation budget {budget} is below the minimum {min} for a {dim}-dimensional problem")]
    BudgetTooSmall { budget: usize, min: usize, dim: usize },

    #[error("at T = {t} K: {source}")]
    AtTemperature { t: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_gate(index: usize, source: Error) -> Self {
        Error::AtGate { index, source: Box::new(source) }
    }

    pub(crate) fn at_temperature(t: f64, source: Error) -> Self {
        Error::AtTemperature { t, source: Box::new(source) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
