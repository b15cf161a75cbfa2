//! Rollback-derived labels: a revision is vandalism exactly when a
//! privileged rollback later reverted it.

use std::collections::BTreeMap;

use super::record::{RevisionId, RevisionRecord};
use super::tsv::{GroundTruth, RollbackEvent, TruthEntry};
use super::CorpusError;

/// Labels every corpus revision. Revisions named in some event's reverted
/// set become vandalism with that event's reverting id attached; all
/// others are regular. The result is independent of event order, and
/// applying the same events twice changes nothing.
pub fn label_from_rollbacks(
    records: &[RevisionRecord],
    events: &[RollbackEvent],
) -> Result<GroundTruth, CorpusError> {
    let known: std::collections::HashSet<RevisionId> =
        records.iter().map(|r| r.revision_id).collect();
    // earliest reverting revision wins if several claim the same target
    let mut reverted_by: BTreeMap<RevisionId, RevisionId> = BTreeMap::new();
    for e in events {
        if !known.contains(&e.reverting_id) {
            return Err(CorpusError::UnknownRevision(e.reverting_id));
        }
        for &target in &e.reverted {
            if !known.contains(&target) {
                return Err(CorpusError::UnknownRevision(target));
            }
            if target >= e.reverting_id {
                return Err(CorpusError::BadRollback(format!(
                    "revision {} cannot revert {} which does not precede it",
                    e.reverting_id, target
                )));
            }
            reverted_by
                .entry(target)
                .and_modify(|r| *r = (*r).min(e.reverting_id))
                .or_insert(e.reverting_id);
        }
    }
    let mut truth = GroundTruth::new();
    for r in records {
        let entry = match reverted_by.get(&r.revision_id) {
            Some(&reverting) => TruthEntry { is_vandalism: true, reverting_id: Some(reverting) },
            None => TruthEntry { is_vandalism: false, reverting_id: None },
        };
        truth.insert(r.revision_id, entry)?;
    }
    Ok(truth)
}
