use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("scale {h} outside 1..={n}")]
    ScaleOutOfRange { h: usize, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("too few data points to fit: {0}")]
    DegenerateFit(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("disconnected graph")]
    Disconnected,
    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
