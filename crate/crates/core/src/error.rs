use thiserror::Error;

/// Errors produced anywhere in the degeneracy test pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not a rotation (orthogonality defect {defect:.3e}, det {det:.6})")]
    NotARotation { defect: f64, det: f64 },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("asymmetric entries H[{row}][{col}] and H[{col}][{row}] differ")]
    Asymmetry { row: usize, col: usize },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("eigenvalue gap {gap:.3e} at t = {t} is below the gap floor; the loop touches a degeneracy")]
    GapCollapse { t: f64, gap: f64 },

    #[error("overlap floor unreachable at max refinement depth between t = {t_start} and t = {t_end}")]
    RefinementExhausted { t_start: f64, t_end: f64 },

    #[error("step {index} is too large for a reliable classification; refine the loop")]
    StepTooLarge { index: usize },

    #[error("ambiguous piercing near sample {index}; refine the loop")]
    AmbiguousPiercing { index: usize },

    #[error("SO(4) reduction leaked out of the lower block at sample {index} (deviation {deviation:.3e})")]
    BlockLeakage { index: usize, deviation: f64 },

    #[error("frame loop is not contractible; no nondegenerate extension exists")]
    NotTrivial,

    #[error("curve shortening stalled after {iterations} sweeps (diameter {diameter:.4})")]
    ShorteningStalled { iterations: usize, diameter: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
