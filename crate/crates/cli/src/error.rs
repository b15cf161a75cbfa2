//! Error taxonomy for the executable. Every failure is folded into one
//! of three buckets so the process exit code is predictable: 1 for bad
//! invocations, 2 for bad or missing data, 3 for stream-protocol
//! failures.

use wdvdb_core::corpus::CorpusError;
use wdvdb_core::eval::EvalError;
use wdvdb_core::features::FeatureError;
use wdvdb_core::learning::LearnError;
use wdvdb_core::stream::StreamError;

#[derive(Debug)]
pub enum CliError {
    /// caller mistake: unknown flag value, inconsistent flags, k = 0
    Usage(String),
    /// unreadable, malformed, or semantically impossible input data
    Data(String),
    /// the replay stream broke: disconnects, timeouts, bad frames
    Protocol(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Protocol(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Protocol(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            CliError::Usage(_) => "usage error",
            CliError::Data(_) => "data error",
            CliError::Protocol(_) => "protocol error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        match e {
            // a bad window or listen address is the caller's mistake,
            // not a wire failure
            StreamError::BadConfig(m) => CliError::Usage(m),
            other => CliError::Protocol(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_bucket() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Data("x".into()).exit_code(), 2);
        assert_eq!(CliError::Protocol("x".into()).exit_code(), 3);
    }

    #[test]
    fn stream_config_errors_count_as_usage() {
        let e: CliError = StreamError::BadConfig("k must be at least 1".into()).into();
        assert_eq!(e.exit_code(), 1);
        let e: CliError = StreamError::Handshake("no hello".into()).into();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn io_errors_count_as_data() {
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "missing.tsv");
        let e: CliError = io.into();
        assert_eq!(e.exit_code(), 2);
    }
}
