use thiserror::Error;

/// Errors raised by the operator, information-geometry and measurement routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian: entry ({row}, {col}) deviates from its conjugate partner by {residual:.3e}")]
    NotHermitian { row: usize, col: usize, residual: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("not unitary: ||U^dag U - 1||_F = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("negative argument to matrix mean: m_f({x}, {y})")]
    NegativeArgument { x: f64, y: f64 },

    #[error("function `{name}` is not a standard operator monotone function: {reason}")]
    NotStandard { name: String, reason: String },

    #[error("unknown monotone function `{0}` (expected sld, wy or wyd:<alpha>)")]
    UnknownFunction(String),

    #[error("function `{name}` does not satisfy the condition (x+1)/2 + f~(x) >= 2 f(x)")]
    ConditionNotMet { name: String },

    #[error("singular metric: A[{row},{col}] couples eigenvalues {p_row:.3e} and {p_col:.3e} with m_f = 0")]
    SingularMetric { row: usize, col: usize, p_row: f64, p_col: f64 },

    #[error("invariant violated: {invariant} (residual {residual:.3e})")]
    InvariantViolation { invariant: String, residual: f64 },

    #[error("eps = {eps} is outside the validity window (0, {max}]")]
    OutOfRegime { eps: f64, max: f64 },

    #[error("numerical health check failed: {0}")]
    Numerical(String),

    #[error("invalid construction spec: {0}")]
    InvalidSpec(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
