use nalgebra::Complex;
use thiserror::Error;

/// Errors raised by the core routines. Numeric payloads are widened to `f64`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Hamiltonian is not traceless (trace {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("superoperator does not preserve Hermiticity at element ({row}, {col}), deviation {deviation:.3e}")]
    NotHermiticityPreserving { row: usize, col: usize, deviation: f64 },

    #[error("superoperator is not trace preserving (residue {residue:.3e})")]
    NotTracePreserving { residue: f64 },

    #[error("unsupported Hilbert-space dimension {0}")]
    UnsupportedDimension(usize),

    #[error("non-finite generator value during integration at t = {t}")]
    Integration { t: f64 },

    #[error("{samples} samples cannot resolve {n_max} harmonics (need at least {required})")]
    Aliasing { samples: usize, n_max: usize, required: usize },

    #[error("eigenvalues {a} and {b} collide; the map is not safely diagonalizable")]
    DegenerateSpectrum { a: Complex<f64>, b: Complex<f64> },

    #[error("real eigenvalue {0} <= 0 of odd multiplicity: no Hermiticity-preserving logarithm")]
    NoHermitianLog(f64),

    #[error("map is singular (eigenvalue {0:.3e})")]
    SingularMap(f64),

    #[error("eigenvalue {0} has no complex-conjugate partner")]
    UnpairedEigenvalue(Complex<f64>),

    #[error("order {order} outside supported range {min}..={max}")]
    OrderOutOfRange { order: usize, min: usize, max: usize },

    #[error("unsupported drive: {0}")]
    UnsupportedDrive(String),

    #[error("inverse check failed at t = {t} (deviation {deviation:.3e})")]
    InverseCheck { t: f64, deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, FloquetError>;
