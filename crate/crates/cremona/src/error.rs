use cremona_core::config::ConfigError;
use cremona_core::elliptic::EllipticError;
use cremona_core::lattice::LatticeError;
use serde_json::{json, Value};

/// Exit code 2 for malformed input, 1 for anything the mathematics rejects.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Parse(_) => "parse",
            CliError::Domain(_) => "domain",
        };
        json!({ "error": { "kind": kind, "message": self.to_string() } })
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<EllipticError> for CliError {
    fn from(e: EllipticError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<cremona_core::Error> for CliError {
    fn from(e: cremona_core::Error) -> Self {
        match e {
            cremona_core::Error::Lattice(l) => l.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
