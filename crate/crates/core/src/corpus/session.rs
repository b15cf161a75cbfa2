//! Editing sessions: maximal runs of consecutive revisions by one user
//! within one item's history.
//!
//! Consecutive is judged per item, not globally: a user editing item A,
//! then item B, then A again produces one session on B and one session on
//! A spanning both A-edits, because within A's own history those edits are
//! adjacent. A session ends when a different user touches the item.

use std::collections::HashMap;

use super::record::{RevisionId, RevisionRecord};
use super::CorpusError;

pub type SessionId = u64;

#[derive(Debug, Clone, Default)]
pub struct SessionAssignment {
    by_revision: HashMap<RevisionId, (SessionId, u32)>,
    /// Member revision ids per session, in stream order; the vector index
    /// is the session id.
    members: Vec<Vec<RevisionId>>,
}

impl SessionAssignment {
    /// (session id, 1-based position within the session).
    pub fn get(&self, id: RevisionId) -> Option<(SessionId, u32)> {
        self.by_revision.get(&id).copied()
    }

    pub fn session_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, session: SessionId) -> Option<&[RevisionId]> {
        self.members.get(session as usize).map(|v| v.as_slice())
    }

    pub fn sessions(&self) -> impl Iterator<Item = (SessionId, &[RevisionId])> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, v)| (i as SessionId, v.as_slice()))
    }
}

/// Groups a chronologically ordered corpus into sessions. Session ids are
/// dense from 0 in order of session start.
pub fn assign_sessions(records: &[RevisionRecord]) -> Result<SessionAssignment, CorpusError> {
    let mut assignment = SessionAssignment::default();
    // per item: (user of the item's latest revision, its session id)
    let mut item_state: HashMap<&str, (&str, SessionId)> = HashMap::new();
    let mut last_id: Option<RevisionId> = None;
    for r in records {
        if let Some(prev) = last_id {
            if r.revision_id <= prev {
                return Err(CorpusError::NonMonotoneId(r.revision_id));
            }
        }
        last_id = Some(r.revision_id);
        let session = match item_state.get(r.item_id.as_str()) {
            Some((user, session)) if *user == r.user_id => *session,
            _ => {
                let id = assignment.members.len() as SessionId;
                assignment.members.push(Vec::new());
                id
            }
        };
        item_state.insert(&r.item_id, (&r.user_id, session));
        assignment.members[session as usize].push(r.revision_id);
        let position = assignment.members[session as usize].len() as u32;
        assignment.by_revision.insert(r.revision_id, (session, position));
    }
    Ok(assignment)
}
