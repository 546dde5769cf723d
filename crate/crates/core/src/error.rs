use crate::config::ConfigError;
use crate::elliptic::EllipticError;
use crate::lattice::LatticeError;

/// Umbrella error for callers that drive several subsystems at once.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error("invalid parameters: {0}")]
    InvalidParams(alloc::string::String),
}
