//! Session-prefix score aggregation.
//!
//! Consecutive edits by one user on one item form an editing session,
//! and such edits tend to share a verdict. A revision's served score is
//! therefore replaced by the mean of the raw scores its session has
//! produced so far — only the prefix up to the current revision, so the
//! transform can run online while the stream is still arriving.

use std::collections::HashMap;

use super::LearnError;
use crate::corpus::record::RevisionId;
use crate::corpus::session::{SessionAssignment, SessionId};

/// Online prefix-mean state, keyed by session.
#[derive(Debug, Clone, Default)]
pub struct MilAccumulator {
    totals: HashMap<SessionId, (f64, u64)>,
}

impl MilAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Absorbs one raw score and returns the session's prefix mean
    /// including it.
    pub fn push(&mut self, session: SessionId, raw: f64) -> f64 {
        let entry = self.totals.entry(session).or_insert((0.0, 0));
        entry.0 += raw;
        entry.1 += 1;
        entry.0 / entry.1 as f64
    }
}

/// Applies the prefix-mean transform to a whole score table (in stream
/// order). Every revision must belong to a known session.
pub fn mil_prefix(
    scores: &[(RevisionId, f64)],
    sessions: &SessionAssignment,
) -> Result<Vec<(RevisionId, f64)>, LearnError> {
    let mut acc = MilAccumulator::new();
    scores
        .iter()
        .map(|&(id, raw)| {
            let (session, _) = sessions.get(id).ok_or(LearnError::UnknownSession(id))?;
            Ok((id, acc.push(session, raw)))
        })
        .collect()
}
