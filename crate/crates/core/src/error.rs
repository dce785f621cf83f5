use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("register must hold at least one qubit")]
    EmptyRegister,

    #[error("gate deviates from unitarity by {deviation:.3e} (tolerance {tolerance:.1e})")]
    NonUnitary { deviation: f64, tolerance: f64 },

    #[error("control and target are both qubit {0}")]
    ControlIsTarget(usize),

    #[error("signals do not share a time base")]
    LayoutMismatch,

    #[error("{samples} samples per period alias frequency index {frequency}")]
    Aliasing { frequency: i64, samples: usize },

    #[error("{samples} samples per period below the floor of {floor} for {num_qubits} qubits")]
    Undersampled { samples: usize, floor: usize, num_qubits: usize },

    #[error("signal has zero power; Born probabilities are undefined")]
    DegenerateState,

    #[error("zero vector has no defined fidelity")]
    ZeroVector,

    #[error("state norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("tomography dataset incomplete: {0}")]
    IncompleteDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv output failed: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
