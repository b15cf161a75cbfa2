//! Ground-truth leak accounting.
//!
//! A rollback names the revisions it reverts. If the rollback reaches
//! the client while earlier same-item revisions are still unscored,
//! their labels are revealed before scoring: in the target set means
//! vandalism, absent from it means the revision survived. The audit
//! replays a trace and counts every revision whose label leaked that
//! way, deduplicated.

use std::collections::{HashMap, HashSet};

use crate::corpus::{GroundTruth, RevisionId, RevisionRecord, RollbackEvent};

use super::trace::{StreamTrace, TraceEvent};
use super::StreamError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LeakReport {
    /// revisions revealed as regular (same item, absent from the
    /// rollback's target set)
    pub leaked_regular: u64,
    /// revisions revealed as vandalism (member of a target set)
    pub leaked_vandalism: u64,
    /// leaked revisions over the ground-truth size
    pub leaked_fraction: f64,
}

/// Count labels revealed by rollbacks inside the backpressure window.
/// `records` supplies the revision→item mapping for the trace ids.
pub fn audit_leak(
    trace: &StreamTrace,
    truth: &GroundTruth,
    rollbacks: &[RollbackEvent],
    records: &[RevisionRecord],
) -> Result<LeakReport, StreamError> {
    trace.validate()?;

    let mut sent_seq: HashMap<RevisionId, u64> = HashMap::new();
    let mut scored_seq: HashMap<RevisionId, u64> = HashMap::new();
    for event in &trace.events {
        match *event {
            TraceEvent::Sent { seq, revision_id } => {
                sent_seq.insert(revision_id, seq);
            }
            TraceEvent::Scored {
                seq, revision_id, ..
            } => {
                scored_seq.insert(revision_id, seq);
            }
            TraceEvent::End { .. } => {}
        }
    }

    let item_of: HashMap<RevisionId, &str> = records
        .iter()
        .map(|r| (r.revision_id, r.item_id.as_str()))
        .collect();
    let mut item_revisions: HashMap<&str, Vec<RevisionId>> = HashMap::new();
    for record in records {
        item_revisions
            .entry(record.item_id.as_str())
            .or_default()
            .push(record.revision_id);
    }

    let mut leaked: HashSet<RevisionId> = HashSet::new();
    for rollback in rollbacks {
        let Some(&q) = sent_seq.get(&rollback.reverting_id) else {
            continue; // rollback outside the replayed slice
        };
        let Some(item) = item_of.get(&rollback.reverting_id) else {
            continue;
        };
        for &candidate in &item_revisions[item] {
            if candidate == rollback.reverting_id {
                continue;
            }
            let Some(&sent) = sent_seq.get(&candidate) else {
                continue;
            };
            // sent before the rollback, still unscored when it arrived
            let scored_after = scored_seq.get(&candidate).is_none_or(|&s| s > q);
            if sent < q && scored_after {
                leaked.insert(candidate);
            }
        }
    }

    let mut report = LeakReport::default();
    for id in &leaked {
        if truth.is_vandalism(*id) == Some(true) {
            report.leaked_vandalism += 1;
        } else {
            report.leaked_regular += 1;
        }
    }
    if !truth.is_empty() {
        report.leaked_fraction = leaked.len() as f64 / truth.len() as f64;
    }
    Ok(report)
}
