use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("states or gates belong to different registries")]
    RegistryMismatch,
    #[error("cannot normalize the zero state")]
    ZeroState,
    #[error("amplitude is not finite")]
    NonFinite,
    #[error("state has no definite photon number")]
    MixedPhotonNumber,
    #[error("tensor is not permutation symmetric (deviation {0:e})")]
    NotSymmetric(f64),
    #[error("single-photon ket {0} is zero")]
    ZeroKet(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("reflectivity {0} outside [0, 1]")]
    ROutOfRange(f64),
    #[error("registry has no two-level DOF named \"path\"")]
    NoPathDof,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown DOF \"{0}\"")]
    UnknownDof(String),
    #[error("kernel is zero")]
    ZeroKernel,
    #[error("expected {expected}, got {got}")]
    BadPhotonNumber { expected: String, got: String },
    #[error("invalid Schmidt spec: {0}")]
    InvalidSpec(String),
    #[error("{name} = {value} outside its domain {domain}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("single-photon rate must be positive, got {0}")]
    NonpositiveP1(f64),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("state is not in the 2+2 path sector")]
    BadSector,
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("degenerate rate curve: {0}")]
    DegenerateCurve(String),
}

pub type Result<T> = std::result::Result<T, Error>;
