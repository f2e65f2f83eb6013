use thiserror::Error;

/// Errors raised by the simulator and the verification predicates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate target subsystem {0}")]
    DuplicateTarget(usize),

    #[error("subsystem {index} out of range for a layout with {len} factors")]
    SubsystemOutOfRange { index: usize, len: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("{what}: size {n} exceeds the supported maximum {max}")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("index ({row}, {col}) out of range for a {n}x{n} matrix")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("query letter `{0}` is not in the task alphabet")]
    AlphabetMismatch(String),

    #[error("unsupported construction parameters: {0}")]
    Unsupported(String),

    /// The success probability vanished on some input, which breaks the
    /// postselection condition of the model.
    #[error("model violation: success probability {prob:.3e} on {context}")]
    ModelViolation { prob: f64, context: String },

    /// Loop refinement hit its sample cap with the trace still invalid.
    #[error("winding refinement did not converge at K = {k} (first break near t = {at:.6})")]
    NonConvergence { k: usize, at: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed matrix JSON: {0}")]
    MatrixFormat(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
