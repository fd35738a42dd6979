use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the geometry, kernel, harmonic and Green solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid curve {curve}: {reason}")]
    InvalidCurve { curve: usize, reason: String },

    #[error("node count {0} must be even and at least 32")]
    InvalidNodeCount(usize),

    #[error("point ({}, {}) is within {tolerance:e} of the boundary", point.re, point.im)]
    BoundaryProximity { point: Complex64, tolerance: f64 },

    #[error("point not in domain: ({}, {})", .0.re, .0.im)]
    NotInDomain(Complex64),

    #[error("source ({}, {}) is {distance:e} from the boundary, below the grid resolution {spacing:e}; refine the grid", point.re, point.im)]
    SourceTooClose {
        point: Complex64,
        distance: f64,
        spacing: f64,
    },

    #[error("singular linear system ({context}); condition estimate {condition:e}")]
    SingularSystem { context: String, condition: f64 },

    #[error("points coincide: ({}, {})", .0.re, .0.im)]
    Singularity(Complex64),

    #[error("Ahlfors map normalization failed: f'(a) = ({}, {})", .0.re, .0.im)]
    RotationCorrection(Complex64),

    #[error("zero count mismatch: expected {expected}, found {found:.6}")]
    CountMismatch { expected: usize, found: f64 },

    #[error("zeros are not distinct and simple at base point ({}, {}); choose another base point", .0.re, .0.im)]
    NotDistinct(Complex64),

    #[error("rank-deficient coefficient fit: singular value ratio {ratio:e}; choose another base point")]
    RankDeficient { ratio: f64 },

    #[error("path routing failed: {0}")]
    Routing(String),

    #[error("quadrature did not converge: estimate ({}, {}) with error {error:e}", estimate.re, estimate.im)]
    NonConvergence { estimate: Complex64, error: f64 },

    #[error("inconsistent sign calibration: {0}")]
    Calibration(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
