use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cone descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("descriptor mismatch: expected {expected}, found {found}")]
    DescriptorMismatch { expected: String, found: String },

    #[error("{function} is undefined at eigenvalue {eigenvalue}")]
    Domain {
        function: &'static str,
        eigenvalue: f64,
    },

    #[error("trace-p norm needs p >= 1, got {0}")]
    InvalidNormExponent(f64),

    #[error("not a Jordan frame: {0}")]
    InvalidFrame(String),

    #[error("point is not in the generalized simplex: {0}")]
    NotInSimplex(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("adjoint check failed: <A x, y> = {forward}, <x, A* y> = {adjoint}")]
    AdjointMismatch { forward: f64, adjoint: f64 },

    #[error("empty regret ledger")]
    EmptyLedger,

    #[error("duality gap {gap} exceeds regret bound {bound} at round {round}")]
    GapBoundViolated { round: usize, gap: f64, bound: f64 },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::DescriptorMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
