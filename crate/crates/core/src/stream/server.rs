//! Replay server: streams a corpus chronologically under the
//! backpressure-window contract and records the trace.
//!
//! The first `k` revisions go out eagerly; afterwards the revision at
//! send position `s` goes out only once the revision at position
//! `s − k` has been scored, so at any instant at most `k` scores are
//! outstanding. Once everything is scored the server sends the `E`
//! terminator.

use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use crate::corpus::{serialize_row, RevisionRecord, SplitName};

use super::frame::{ClientFrame, ServerFrame};
use super::trace::{StreamTrace, TraceEvent};
use super::StreamError;

/// Default backpressure window.
pub const DEFAULT_WINDOW: usize = 16;

/// Default per-score wait before the server gives up on a client.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub listen_address: String,
    /// backpressure window; at most this many unscored revisions in flight
    pub k: usize,
    /// how long to wait for a score while any are outstanding
    pub timeout: Duration,
    /// which manifest split the caller intends to replay (informational
    /// here; the caller selects the rows)
    pub split: Option<SplitName>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            listen_address: "127.0.0.1:0".to_string(),
            k: DEFAULT_WINDOW,
            timeout: DEFAULT_TIMEOUT,
            split: None,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), StreamError> {
        if self.k == 0 {
            return Err(StreamError::BadConfig(
                "backpressure window must be at least 1".into(),
            ));
        }
        if self.timeout.is_zero() {
            return Err(StreamError::BadConfig("timeout must be positive".into()));
        }
        Ok(())
    }
}

fn check_sorted(records: &[RevisionRecord]) -> Result<(), StreamError> {
    for pair in records.windows(2) {
        if pair[1].revision_id <= pair[0].revision_id {
            return Err(StreamError::BadConfig(format!(
                "revisions not in increasing id order near {}",
                pair[1].revision_id
            )));
        }
    }
    Ok(())
}

/// Bind the configured address, accept a single client, and replay.
pub fn serve(
    records: &[RevisionRecord],
    config: &ProtocolConfig,
) -> Result<StreamTrace, StreamError> {
    config.validate()?;
    let listener = TcpListener::bind(&config.listen_address)?;
    serve_listener(&listener, records, config.k, config.timeout)
}

/// Replay to the first client that connects to an already-bound
/// listener. Useful when the caller needs the ephemeral port before the
/// client starts.
pub fn serve_listener(
    listener: &TcpListener,
    records: &[RevisionRecord],
    k: usize,
    timeout: Duration,
) -> Result<StreamTrace, StreamError> {
    if k == 0 {
        return Err(StreamError::BadConfig(
            "backpressure window must be at least 1".into(),
        ));
    }
    check_sorted(records)?;
    let (stream, _) = listener.accept()?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    replay(stream, records, k)
}

enum Line {
    Text(String),
    Eof,
    TimedOut,
}

fn is_hangup(kind: ErrorKind) -> bool {
    matches!(
        kind,
        ErrorKind::ConnectionReset | ErrorKind::ConnectionAborted | ErrorKind::BrokenPipe
    )
}

fn read_line(reader: &mut BufReader<TcpStream>) -> Result<Line, StreamError> {
    let mut line = String::new();
    match reader.read_line(&mut line) {
        Ok(0) => Ok(Line::Eof),
        Ok(_) => {
            while line.ends_with('\n') || line.ends_with('\r') {
                line.pop();
            }
            Ok(Line::Text(line))
        }
        Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
            Ok(Line::TimedOut)
        }
        Err(e) if is_hangup(e.kind()) => Ok(Line::Eof),
        Err(e) => Err(StreamError::Io(e)),
    }
}

fn send(stream: &mut TcpStream, bytes: &[u8], after_seq: u64) -> Result<(), StreamError> {
    stream.write_all(bytes).map_err(|e| {
        if is_hangup(e.kind()) {
            StreamError::ClientDisconnect { after_seq }
        } else {
            StreamError::Io(e)
        }
    })
}

fn replay(
    mut stream: TcpStream,
    records: &[RevisionRecord],
    k: usize,
) -> Result<StreamTrace, StreamError> {
    let mut reader = BufReader::new(stream.try_clone()?);

    // handshake: exactly one HELLO, answered with the window size
    match read_line(&mut reader)? {
        Line::Text(line) => match ClientFrame::parse(&line) {
            Some(ClientFrame::Hello { .. }) => {}
            _ => return Err(StreamError::Handshake(line)),
        },
        Line::Eof => return Err(StreamError::Handshake("client closed early".into())),
        Line::TimedOut => return Err(StreamError::Handshake("no greeting in time".into())),
    }
    send(&mut stream, ServerFrame::Welcome { k }.serialize().as_bytes(), 0)?;

    let n = records.len();
    let mut position_of = std::collections::HashMap::with_capacity(n);
    let mut scored = vec![false; n];
    let mut next_send = 0usize;
    let mut scored_count = 0usize;
    let mut seq = 0u64;
    let mut events = Vec::with_capacity(2 * n + 1);

    loop {
        // send everything the window currently allows
        while next_send < n && (next_send < k || scored[next_send - k]) {
            let record = &records[next_send];
            let row = serialize_row(record).map_err(|e| StreamError::BadConfig(e.to_string()))?;
            let frame = ServerFrame::Revision {
                revision_id: record.revision_id,
                row,
            };
            send(&mut stream, frame.serialize().as_bytes(), seq)?;
            seq += 1;
            events.push(TraceEvent::Sent {
                seq,
                revision_id: record.revision_id,
            });
            position_of.insert(record.revision_id, next_send);
            next_send += 1;
        }

        if next_send == n && scored_count == n {
            send(&mut stream, ServerFrame::End.serialize().as_bytes(), seq)?;
            seq += 1;
            events.push(TraceEvent::End { seq });
            return Ok(StreamTrace { events });
        }

        match read_line(&mut reader)? {
            Line::Eof => return Err(StreamError::ClientDisconnect { after_seq: seq }),
            Line::TimedOut => {
                let oldest = (0..next_send)
                    .find(|&i| !scored[i])
                    .map(|i| records[i].revision_id)
                    .unwrap_or(0);
                return Err(StreamError::Timeout(oldest));
            }
            Line::Text(line) => {
                let (revision_id, score) = match ClientFrame::parse(&line) {
                    Some(ClientFrame::Score {
                        revision_id,
                        score,
                    }) => (revision_id, score),
                    _ => return Err(StreamError::MalformedScore(line)),
                };
                if !(0.0..=1.0).contains(&score) {
                    return Err(StreamError::ScoreOutOfRange(revision_id));
                }
                let position = match position_of.get(&revision_id) {
                    Some(&p) if !scored[p] => p,
                    // never sent, or a duplicate score
                    _ => return Err(StreamError::UnknownRevisionScored(revision_id)),
                };
                scored[position] = true;
                scored_count += 1;
                seq += 1;
                events.push(TraceEvent::Scored {
                    seq,
                    revision_id,
                    score,
                });
            }
        }
    }
}
