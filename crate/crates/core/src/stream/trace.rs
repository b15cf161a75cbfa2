//! Replay traces: the ordered event log a serve run leaves behind.

use std::fs;
use std::path::Path;

use crate::corpus::RevisionId;

use super::StreamError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceEvent {
    Sent {
        seq: u64,
        revision_id: RevisionId,
    },
    Scored {
        seq: u64,
        revision_id: RevisionId,
        score: f64,
    },
    End {
        seq: u64,
    },
}

impl TraceEvent {
    pub fn seq(&self) -> u64 {
        match *self {
            TraceEvent::Sent { seq, .. }
            | TraceEvent::Scored { seq, .. }
            | TraceEvent::End { seq } => seq,
        }
    }
}

/// Ordered event list recorded by the server. Invariants: seq numbers
/// strictly increase, every SCORED follows its SENT, and exactly one
/// END closes the list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamTrace {
    pub events: Vec<TraceEvent>,
}

impl StreamTrace {
    pub fn validate(&self) -> Result<(), StreamError> {
        let bad = |msg: String| Err(StreamError::MalformedTrace(msg));
        let mut last_seq = 0u64;
        let mut sent = std::collections::HashSet::new();
        let mut scored = std::collections::HashSet::new();
        let mut end_seen = false;
        for event in &self.events {
            if end_seen {
                return bad("events after END".into());
            }
            let seq = event.seq();
            if seq <= last_seq {
                return bad(format!("seq {seq} not increasing"));
            }
            last_seq = seq;
            match *event {
                TraceEvent::Sent { revision_id, .. } => {
                    if !sent.insert(revision_id) {
                        return bad(format!("revision {revision_id} sent twice"));
                    }
                }
                TraceEvent::Scored { revision_id, .. } => {
                    if !sent.contains(&revision_id) {
                        return bad(format!("revision {revision_id} scored before send"));
                    }
                    if !scored.insert(revision_id) {
                        return bad(format!("revision {revision_id} scored twice"));
                    }
                }
                TraceEvent::End { .. } => end_seen = true,
            }
        }
        if !end_seen {
            return bad("missing END".into());
        }
        Ok(())
    }

    /// Largest `#SENT − #SCORED` over every prefix — the observed
    /// backpressure window.
    pub fn peak_window(&self) -> u64 {
        let mut open = 0i64;
        let mut peak = 0i64;
        for event in &self.events {
            match event {
                TraceEvent::Sent { .. } => open += 1,
                TraceEvent::Scored { .. } => open -= 1,
                TraceEvent::End { .. } => {}
            }
            peak = peak.max(open);
        }
        peak.max(0) as u64
    }

    pub fn sent_ids(&self) -> Vec<RevisionId> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Sent { revision_id, .. } => Some(*revision_id),
                _ => None,
            })
            .collect()
    }
}

pub fn render_trace(trace: &StreamTrace) -> String {
    let mut out = String::new();
    for event in &trace.events {
        match event {
            TraceEvent::Sent { seq, revision_id } => {
                out.push_str(&format!("SENT\t{seq}\t{revision_id}\n"));
            }
            TraceEvent::Scored {
                seq,
                revision_id,
                score,
            } => {
                out.push_str(&format!("SCORED\t{seq}\t{revision_id}\t{score}\n"));
            }
            TraceEvent::End { seq } => out.push_str(&format!("END\t{seq}\n")),
        }
    }
    out
}

pub fn parse_trace(text: &str) -> Result<StreamTrace, StreamError> {
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let err = || StreamError::MalformedTrace(format!("line {}: {line:?}", lineno + 1));
        let mut parts = line.split('\t');
        let kind = parts.next().ok_or_else(err)?;
        let mut field = || -> Result<&str, StreamError> { parts.next().ok_or_else(err) };
        let event = match kind {
            "SENT" => TraceEvent::Sent {
                seq: field()?.parse().map_err(|_| err())?,
                revision_id: field()?.parse().map_err(|_| err())?,
            },
            "SCORED" => TraceEvent::Scored {
                seq: field()?.parse().map_err(|_| err())?,
                revision_id: field()?.parse().map_err(|_| err())?,
                score: field()?.parse().map_err(|_| err())?,
            },
            "END" => TraceEvent::End {
                seq: field()?.parse().map_err(|_| err())?,
            },
            _ => return Err(err()),
        };
        if parts.next().is_some() {
            return Err(err());
        }
        events.push(event);
    }
    let trace = StreamTrace { events };
    trace.validate()?;
    Ok(trace)
}

pub fn write_trace(trace: &StreamTrace, path: &Path) -> Result<(), StreamError> {
    fs::write(path, render_trace(trace))?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<StreamTrace, StreamError> {
    parse_trace(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StreamTrace {
        StreamTrace {
            events: vec![
                TraceEvent::Sent {
                    seq: 1,
                    revision_id: 10,
                },
                TraceEvent::Sent {
                    seq: 2,
                    revision_id: 11,
                },
                TraceEvent::Scored {
                    seq: 3,
                    revision_id: 10,
                    score: 0.75,
                },
                TraceEvent::Scored {
                    seq: 4,
                    revision_id: 11,
                    score: 0.1234567890123456,
                },
                TraceEvent::End { seq: 5 },
            ],
        }
    }

    #[test]
    fn well_formed_trace_validates() {
        sample().validate().unwrap();
        assert_eq!(sample().peak_window(), 2);
        assert_eq!(sample().sent_ids(), vec![10, 11]);
    }

    #[test]
    fn score_before_send_is_rejected() {
        let trace = StreamTrace {
            events: vec![
                TraceEvent::Scored {
                    seq: 1,
                    revision_id: 10,
                    score: 0.5,
                },
                TraceEvent::End { seq: 2 },
            ],
        };
        assert!(matches!(
            trace.validate(),
            Err(StreamError::MalformedTrace(_))
        ));
    }

    #[test]
    fn sequence_numbers_must_increase() {
        let trace = StreamTrace {
            events: vec![
                TraceEvent::Sent {
                    seq: 2,
                    revision_id: 10,
                },
                TraceEvent::Sent {
                    seq: 2,
                    revision_id: 11,
                },
                TraceEvent::End { seq: 3 },
            ],
        };
        assert!(trace.validate().is_err());
    }

    #[test]
    fn exactly_one_final_end_is_required() {
        let mut missing = sample();
        missing.events.pop();
        assert!(missing.validate().is_err());

        let mut extra = sample();
        extra.events.push(TraceEvent::End { seq: 6 });
        assert!(extra.validate().is_err());

        let mut middle = sample();
        middle.events.swap(3, 4);
        assert!(middle.validate().is_err());
    }

    #[test]
    fn duplicate_events_are_rejected() {
        let mut trace = sample();
        trace.events.insert(
            4,
            TraceEvent::Scored {
                seq: 100,
                revision_id: 10,
                score: 0.5,
            },
        );
        // reassign increasing seqs so only the duplication trips
        for (i, e) in trace.events.iter_mut().enumerate() {
            match e {
                TraceEvent::Sent { seq, .. }
                | TraceEvent::Scored { seq, .. }
                | TraceEvent::End { seq } => *seq = i as u64 + 1,
            }
        }
        assert!(trace.validate().is_err());
    }

    #[test]
    fn file_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.tsv");
        write_trace(&sample(), &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back, sample());
        // scores survive bitwise thanks to shortest-round-trip printing
        match back.events[3] {
            TraceEvent::Scored { score, .. } => {
                assert_eq!(score.to_bits(), 0.1234567890123456f64.to_bits());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn garbled_lines_are_rejected() {
        assert!(parse_trace("SENT\t1\n").is_err());
        assert!(parse_trace("BOOM\t1\t2\n").is_err());
        assert!(parse_trace("SENT\t1\t5\textra\n").is_err());
    }
}
