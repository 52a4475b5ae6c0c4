use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit position {position} out of range for a {qubits}-qubit operator")]
    QubitOutOfRange { position: usize, qubits: usize },

    #[error("invalid qubit selection: {0}")]
    InvalidSelection(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("columns are not orthonormal (residual {residual:e})")]
    NotIsometry { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("tensor operator index violates the triangle rule: {0}")]
    TriangleRule(String),

    #[error("alpha = {0} is outside the canonical range [0, 1/sqrt(2)]")]
    AlphaOutOfRange(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("feature not bracketed: {0}")]
    NotBracketed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
