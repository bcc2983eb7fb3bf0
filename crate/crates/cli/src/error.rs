use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Core(#[from] fracext::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{failed} of {total} acceptance criteria failed")]
    Acceptance { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn csv(path: &Path, e: csv::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// 2 for unusable input, 3 for infeasible constructions, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => 2,
            CliError::Core(fracext::Error::InvalidArgument(_) | fracext::Error::Parse(_)) => 2,
            CliError::Core(fracext::Error::Infeasible { .. }) => 3,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let schema = CliError::Schema {
            path: "a.b".into(),
            message: "bad".into(),
        };
        assert_eq!(schema.exit_code(), 2);
        assert_eq!(CliError::from(fracext::Error::Parse("x".into())).exit_code(), 2);
        let infeasible = fracext::Error::Infeasible {
            constraint: "beta <= alpha".into(),
        };
        assert_eq!(CliError::from(infeasible).exit_code(), 3);
        assert_eq!(CliError::from(fracext::Error::Precondition("x".into())).exit_code(), 1);
        assert_eq!(CliError::Acceptance { failed: 1, total: 10 }.exit_code(), 1);
    }
}
