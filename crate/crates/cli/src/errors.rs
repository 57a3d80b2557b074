//! CLI error taxonomy mapped onto process exit codes.

use crate::parser::ParseError;

/// Failure categories with fixed exit codes: usage/config problems exit 1,
/// numerical or data preconditions exit 2, verification failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("verification failed: {failed} of {total} checks did not pass")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}

impl From<regionops::Error> for CliError {
    fn from(e: regionops::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(format!("region expression: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Numeric("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Verification {
                failed: 1,
                total: 16
            }
            .exit_code(),
            3
        );
    }

    #[test]
    fn library_errors_map_to_numeric_failures() {
        let e: CliError = regionops::Error::TruncationDim(0).into();
        assert_eq!(e.exit_code(), 2);
    }
}
