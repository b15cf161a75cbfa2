//! Chronological replay of a corpus to a detector client over TCP with
//! a backpressure window, plus trace recording and leak auditing.

pub mod audit;
pub mod client;
pub mod frame;
pub mod server;
pub mod trace;

pub use audit::{audit_leak, LeakReport};
pub use client::{run_client, ClientMode, Detector};
pub use frame::{ClientFrame, ServerFrame};
pub use server::{serve, serve_listener, ProtocolConfig, DEFAULT_TIMEOUT, DEFAULT_WINDOW};
pub use trace::{
    parse_trace, read_trace, render_trace, write_trace, StreamTrace, TraceEvent,
};

use crate::corpus::RevisionId;

#[derive(Debug, thiserror::Error)]
pub enum StreamError {
    #[error("invalid protocol configuration: {0}")]
    BadConfig(String),
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("client disconnected after sequence {after_seq}")]
    ClientDisconnect { after_seq: u64 },
    #[error("malformed score line {0:?}")]
    MalformedScore(String),
    #[error("score for revision {0} is outside [0, 1]")]
    ScoreOutOfRange(RevisionId),
    #[error("score for unknown or already-scored revision {0}")]
    UnknownRevisionScored(RevisionId),
    #[error("timed out waiting for the score of revision {0}")]
    Timeout(RevisionId),
    #[error("connection refused at {0}")]
    ConnectionRefused(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("detector failure: {0}")]
    DetectorFailure(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}
