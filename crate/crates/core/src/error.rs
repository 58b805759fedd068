use thiserror::Error;

#[derive(Debug, Error)]
pub enum DgError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("quadrature order {0} outside the supported range 1..=32")]
    QuadratureOrder(usize),

    #[error("fields live on different meshes or degrees")]
    MeshMismatch,

    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("flux kind {0:?} does not apply here")]
    FluxKind(crate::flux::FluxKind),

    #[error("singular global matrix (N = {n_cells}, k = {degree}, scheme {scheme}): pivot {pivot:.3e} at row {row}")]
    SingularMatrix {
        n_cells: usize,
        degree: usize,
        scheme: String,
        row: usize,
        pivot: f64,
    },

    #[error("residual check failed: {what} = {value:.3e}")]
    ResidualCheck { what: &'static str, value: f64 },

    #[error("non-finite state in RK stage {stage} at t = {time}")]
    NonFinite { stage: usize, time: f64 },

    #[error("convergence rung N = {n_cells} failed: {reason}")]
    RungFailed { n_cells: usize, reason: String },

    #[error("unknown problem '{0}' (known: {known})", known = crate::problems::PROBLEM_IDS.join(", "))]
    UnknownProblem(String),

    #[error("unknown scheme '{0}' (known: d1, c1, d2, c2)")]
    UnknownScheme(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DgError {
    /// Process exit code by category: 2 configuration, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            DgError::Io(_) => 4,
            DgError::SingularMatrix { .. }
            | DgError::ResidualCheck { .. }
            | DgError::NonFinite { .. }
            | DgError::RungFailed { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, DgError>;
