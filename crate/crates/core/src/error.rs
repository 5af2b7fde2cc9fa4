use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size {n}: need at least {min} nodes")]
    InvalidSize { n: usize, min: usize },

    #[error("degenerate geometry: points {i} and {j} coincide")]
    DegenerateGeometry { i: usize, j: usize },

    #[error("couplings not symmetric at ({i}, {j}): {upper} vs {lower}")]
    Asymmetric {
        i: usize,
        j: usize,
        upper: f64,
        lower: f64,
    },

    #[error("invalid coupling at ({i}, {j}): {value}")]
    InvalidCoupling { i: usize, j: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge: residual {residual:e} exceeds {tolerance:e}")]
    Convergence { residual: f64, tolerance: f64 },

    #[error("search space of {required} candidates exceeds budget {budget}; lower max_coeff")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("metric is not Euclidean: Gram eigenvalue {min_eigenvalue:e} below tolerance")]
    NonEuclidean { min_eigenvalue: f64 },

    #[error("switch times must be strictly increasing and positive (index {index})")]
    NonIncreasingTimes { index: usize },

    #[error("matrix is not unitary: max |U*U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NonEuclidean { .. } | Error::NotUnitary { .. }
        )
    }
}
