//! Replay client: connects to a server, runs a detector over every
//! received revision, and reports scores back.
//!
//! Detector state is always updated in receive order. The pipelined
//! mode moves socket reads to a separate thread so the detector can
//! compute while the next frame is in flight; the resulting score
//! table is identical to a serial run for any deterministic detector.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::TcpStream;
use std::sync::mpsc;
use std::thread;

use crate::corpus::{parse_row, RevisionId, RevisionRecord};

use super::frame::{ClientFrame, ServerFrame};
use super::StreamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientMode {
    /// score each revision before reading the next frame
    Serial,
    /// read frames on a separate thread; compute overlaps receive
    Pipelined,
}

/// A stateful scoring function. A plain `FnMut` closure works.
pub trait Detector {
    fn score(&mut self, record: &RevisionRecord) -> Result<f64, String>;
}

impl<F> Detector for F
where
    F: FnMut(&RevisionRecord) -> Result<f64, String>,
{
    fn score(&mut self, record: &RevisionRecord) -> Result<f64, String> {
        self(record)
    }
}

fn connect(address: &str) -> Result<TcpStream, StreamError> {
    match TcpStream::connect(address) {
        Ok(stream) => Ok(stream),
        Err(e) if e.kind() == ErrorKind::ConnectionRefused => {
            Err(StreamError::ConnectionRefused(address.to_string()))
        }
        Err(e) => Err(StreamError::Io(e)),
    }
}

fn next_frame(reader: &mut BufReader<TcpStream>) -> Result<ServerFrame, StreamError> {
    let mut line = String::new();
    let n = reader.read_line(&mut line)?;
    if n == 0 {
        return Err(StreamError::ProtocolViolation(
            "server closed the connection".into(),
        ));
    }
    while line.ends_with('\n') || line.ends_with('\r') {
        line.pop();
    }
    ServerFrame::parse(&line).ok_or(StreamError::ProtocolViolation(line))
}

fn decode_revision(revision_id: RevisionId, row: &str) -> Result<RevisionRecord, StreamError> {
    let record =
        parse_row(row, 0).map_err(|e| StreamError::ProtocolViolation(format!("bad row: {e}")))?;
    if record.revision_id != revision_id {
        return Err(StreamError::ProtocolViolation(format!(
            "frame id {revision_id} does not match row id {}",
            record.revision_id
        )));
    }
    Ok(record)
}

fn apply_detector(
    detector: &mut dyn Detector,
    record: &RevisionRecord,
    table: &mut BTreeMap<RevisionId, f64>,
) -> Result<f64, StreamError> {
    let score = detector
        .score(record)
        .map_err(StreamError::DetectorFailure)?;
    if !(0.0..=1.0).contains(&score) || score.is_nan() {
        return Err(StreamError::DetectorFailure(format!(
            "score {score} for revision {} is outside [0, 1]",
            record.revision_id
        )));
    }
    if table.insert(record.revision_id, score).is_some() {
        return Err(StreamError::ProtocolViolation(format!(
            "revision {} received twice",
            record.revision_id
        )));
    }
    Ok(score)
}

/// Run a detector against a replay server and return the full score
/// table (revision id → score).
pub fn run_client(
    address: &str,
    name: &str,
    mode: ClientMode,
    detector: &mut dyn Detector,
) -> Result<BTreeMap<RevisionId, f64>, StreamError> {
    let mut stream = connect(address)?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);

    let hello = ClientFrame::Hello {
        name: name.to_string(),
    };
    stream.write_all(hello.serialize().as_bytes())?;
    match next_frame(&mut reader)? {
        ServerFrame::Welcome { .. } => {}
        other => {
            return Err(StreamError::ProtocolViolation(format!(
                "expected WELCOME, got {other:?}"
            )))
        }
    }

    let mut table = BTreeMap::new();
    match mode {
        ClientMode::Serial => loop {
            match next_frame(&mut reader)? {
                ServerFrame::Revision { revision_id, row } => {
                    let record = decode_revision(revision_id, &row)?;
                    let score = apply_detector(detector, &record, &mut table)?;
                    let frame = ClientFrame::Score {
                        revision_id,
                        score,
                    };
                    stream.write_all(frame.serialize().as_bytes())?;
                }
                ServerFrame::End => break,
                ServerFrame::Welcome { .. } => {
                    return Err(StreamError::ProtocolViolation("second WELCOME".into()))
                }
            }
        },
        ClientMode::Pipelined => {
            let (tx, rx) = mpsc::channel::<Result<ServerFrame, StreamError>>();
            let handle = thread::spawn(move || {
                loop {
                    let frame = next_frame(&mut reader);
                    let stop = !matches!(frame, Ok(ServerFrame::Revision { .. }));
                    if tx.send(frame).is_err() || stop {
                        break;
                    }
                }
            });
            let result = (|| loop {
                match rx.recv().map_err(|_| {
                    StreamError::ProtocolViolation("reader stopped unexpectedly".into())
                })?? {
                    ServerFrame::Revision { revision_id, row } => {
                        let record = decode_revision(revision_id, &row)?;
                        let score = apply_detector(detector, &record, &mut table)?;
                        let frame = ClientFrame::Score {
                            revision_id,
                            score,
                        };
                        stream.write_all(frame.serialize().as_bytes())?;
                    }
                    ServerFrame::End => return Ok(()),
                    ServerFrame::Welcome { .. } => {
                        return Err(StreamError::ProtocolViolation("second WELCOME".into()))
                    }
                }
            })();
            // tear the socket down before joining so the reader cannot
            // block forever on a half-dead connection
            if result.is_err() {
                let _ = stream.shutdown(std::net::Shutdown::Both);
            }
            let _ = handle.join();
            result?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refused_connections_are_reported_as_such() {
        // a port from the ephemeral range with nothing listening
        let result = run_client(
            "127.0.0.1:1",
            "probe",
            ClientMode::Serial,
            &mut |_: &RevisionRecord| Ok(0.5),
        );
        assert!(matches!(
            result,
            Err(StreamError::ConnectionRefused(_)) | Err(StreamError::Io(_))
        ));
    }
}
