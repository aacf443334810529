use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate eliminator: input vector is zero")]
    DegenerateEliminator,
    #[error("invalid turnover pattern: positions ({0}, {1}, {2})")]
    InvalidTurnoverPattern(usize, usize, usize),
    #[error("core position {position} out of range for dimension {dim}")]
    PositionOutOfRange { position: usize, dim: usize },
    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not upper Hessenberg: |a[{row},{col}]| = {magnitude:e}")]
    NotHessenberg { row: usize, col: usize, magnitude: f64 },
    #[error("slot ({row}, {col}) is not a bulge slot")]
    NotBulgeSlot { row: usize, col: usize },
    #[error("move requires an active window of size >= 2")]
    WindowTooSmall,
    #[error("swap index {0} outside the active window")]
    SwapOutOfWindow(usize),
    #[error("swap on deflatable position {0}")]
    SwapOnDeflatable(usize),
    #[error("window boundary core at position {0} is not deflated")]
    BoundaryNotDeflated(usize),
    #[error("projective value (0, 0) is undefined")]
    UndefinedProjective,
    #[error("2x2 pencil is identically singular")]
    SingularPencil,
    #[error("position {0} is not deflated on both sides")]
    NotDeflated(usize),
    #[error("transform recorder was not enabled for this solve")]
    RecorderAbsent,
}

pub type Result<T> = std::result::Result<T, Error>;
