use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate index id {0} in tensor")]
    DuplicateIndex(u64),

    #[error("data length {got} does not match index dimensions (expected {expected})")]
    DataLength { expected: usize, got: usize },

    #[error("index dimension mismatch for id {id}: {left} vs {right}")]
    DimMismatch { id: u64, left: usize, right: usize },

    #[error("index id {0} not found in tensor")]
    IndexNotFound(u64),

    #[error("SVD row indices must be a nonempty proper subset of the tensor's indices")]
    BadSvdSplit,

    #[error("truncation cutoff must satisfy 0 <= chi < 1, got {0}")]
    InvalidCutoff(f64),

    #[error("matrix product chain must contain at least one tensor")]
    EmptyChain,

    #[error("chain length mismatch: {left} vs {right}")]
    ChainLength { left: usize, right: usize },

    #[error("site {site} out of range 1..={len}")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("matrix is not Hermitian (max deviation {dev:.3e})")]
    NonHermitian { dev: f64 },

    #[error("{name} out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("quadrature did not converge: requested relative tolerance {requested:.3e}, achieved {achieved:.3e}")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("eta pair ({k}, {kp}) outside the tabulated memory window")]
    MemoryWindow { k: usize, kp: usize },

    #[error("{what} size {size} exceeds guard limit {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
}
