use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relation matrix is ragged: row {row} has {got} entries, expected {expected}")]
    RaggedMatrix { row: usize, got: usize, expected: usize },

    #[error("relation row {row} has nonzero sum {sum}")]
    NonZeroRowSum { row: usize, sum: i64 },

    #[error("relation rows are linearly dependent over Q (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },

    #[error("ambient dimension must be at least 1 (got {0} coordinates)")]
    TooFewCoordinates(usize),

    #[error("exhaustive routine limited to {limit} coordinates, got {got}")]
    TooManyCoordinates { got: usize, limit: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("hypersurface exponents must be positive integers and at least two")]
    BadHypersurface,

    #[error("polynomial is not elliptic: X{variable} has no pure power in the top-degree part")]
    NotElliptic { variable: usize },

    #[error("polynomial does not involve X{variable}")]
    MissingVariable { variable: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("enumeration cap {cap} produced no generators")]
    CapTooSmall { cap: u32 },

    #[error("lattice enumeration exceeded its budget of {budget} points")]
    EnumerationTooLarge { budget: u64 },

    #[error("dimension {dim} exceeds the supported limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("generator set is empty or lies in the coordinate hyperplane x{coordinate} = 0")]
    DegenerateGenerators { coordinate: usize },

    #[error("face lies in a coordinate hyperplane")]
    FaceInCoordinateHyperplane,

    #[error("the Newton integral diverges")]
    DivergentIntegral,

    #[error("integration dimension {dim} exceeds the supported limit {limit}")]
    DimensionTooHigh { dim: usize, limit: usize },

    #[error("polar vector must have strictly positive entries")]
    NonPositivePolar,

    #[error("regularization exponent {k} does not cancel the leading local term (coefficient of p^-1 is {residual})")]
    RegularizationMismatch { k: u32, residual: f64 },

    #[error("counting box has about {estimate:.3e} points, over the budget {budget:.3e}")]
    BoxTooLarge { estimate: f64, budget: f64 },

    #[error("height bound must be finite and at least 1 (got {0})")]
    InvalidHeightBound(f64),

    #[error("diagonal face F0 is not compact")]
    NonCompactFace,

    #[error("linear program is unbounded")]
    UnboundedLp,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
