use crate::kmesh::Mesh;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("k-vector ({0}, {1}, {2}) out of range for mesh {3}")]
    InvalidKVector(i64, i64, i64, Mesh),

    #[error("mesh dimensions must all be at least 1, got [{0}, {1}, {2}]")]
    InvalidMesh(i64, i64, i64),

    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("two-electron block Q={q_index} is not positive semidefinite (pivot {pivot:.3e} below -{tol:.3e})")]
    NotPositiveSemidefinite {
        q_index: usize,
        pivot: f64,
        tol: f64,
    },

    #[error("central-tensor symmetry violated before averaging: max deviation {max_dev:.3e} exceeds {tol:.3e}")]
    ThcSymmetryViolation { max_dev: f64, tol: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("operator dimension 2^{qubits} exceeds the dense-assembly cap of 2^{cap}")]
    DimensionCap { qubits: usize, cap: usize },

    #[error("LCU term {index} is not unitary (deviation {dev:.3e})")]
    NonUnitaryTerm { index: usize, dev: f64 },

    #[error("no surface-code distance up to {max_distance} meets the failure budget")]
    NoFeasibleDistance { max_distance: u32 },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
