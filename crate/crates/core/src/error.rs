use thiserror::Error;

/// Errors produced by the lattice-sampling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),

    #[error("generator matrix is singular")]
    SingularGenerator,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "nearest point lies on the boundary of the search box (bound {bound}); enlarge the box"
    )]
    BoxTooSmall { bound: i64 },

    #[error(
        "bracket violation along direction {direction:?}: {reason} \
         (packing radius {packing_radius}, covering radius {covering_radius})"
    )]
    BracketViolation {
        direction: Vec<f64>,
        reason: &'static str,
        packing_radius: f64,
        covering_radius: f64,
    },

    #[error("invalid rate grid: {0}")]
    InvalidGrid(String),

    #[error("curves are not on the same rate grid")]
    GridMismatch,

    #[error("no sign change between the two curves")]
    NoSignChange,

    #[error("multiple sign changes between the two curves near rates {0:?}")]
    MultipleSignChanges(Vec<f64>),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed profile file {path}: {message}")]
    MalformedProfile { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
