//! Scored datasets and row-exclusion filters.

use std::collections::HashSet;

use chrono::DateTime;

use super::EvalError;
use crate::corpus::{ContentType, RevisionId};

/// One evaluated revision: the detector's score joined with the ground
/// truth and the row attributes the breakdowns slice on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRow {
    pub revision_id: RevisionId,
    pub score: f64,
    pub vandalism: bool,
    pub timestamp: i64,
    pub content_type: ContentType,
    pub is_registered: bool,
    /// editor of the revision; lets exclusion filters match by user
    /// without a corpus join
    pub user_id: String,
}

/// A validated collection of scored rows: unique ids, scores in [0,1],
/// timestamps convertible to calendar dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDataset {
    rows: Vec<ScoredRow>,
}

impl ScoredDataset {
    pub fn new(rows: Vec<ScoredRow>) -> Result<Self, EvalError> {
        let mut seen = HashSet::with_capacity(rows.len());
        for row in &rows {
            if !seen.insert(row.revision_id) {
                return Err(EvalError::DuplicateId(row.revision_id));
            }
            if !(0.0..=1.0).contains(&row.score) || row.score.is_nan() {
                return Err(EvalError::ScoreOutOfRange {
                    id: row.revision_id,
                    score: row.score,
                });
            }
            if DateTime::from_timestamp(row.timestamp, 0).is_none() {
                return Err(EvalError::BadTimestamp {
                    id: row.revision_id,
                    timestamp: row.timestamp,
                });
            }
        }
        Ok(ScoredDataset { rows })
    }

    pub fn rows(&self) -> &[ScoredRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.score).collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.vandalism).collect()
    }
}

/// Criteria for removing rows before re-evaluation. A row is removed
/// when it matches EVERY criterion that is set; at least one criterion
/// must be set (an empty filter would silently act as identity).
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionFilter {
    user_id: Option<String>,
    /// half-open seconds interval [start, end)
    time_range: Option<(i64, i64)>,
    revision_ids: Option<HashSet<RevisionId>>,
}

impl ExclusionFilter {
    pub fn new(
        user_id: Option<String>,
        time_range: Option<(i64, i64)>,
        revision_ids: Option<HashSet<RevisionId>>,
    ) -> Result<Self, EvalError> {
        if user_id.is_none() && time_range.is_none() && revision_ids.is_none() {
            return Err(EvalError::EmptyFilter);
        }
        Ok(ExclusionFilter {
            user_id,
            time_range,
            revision_ids,
        })
    }

    fn matches(&self, row: &ScoredRow) -> bool {
        if let Some(user) = &self.user_id {
            if row.user_id != *user {
                return false;
            }
        }
        if let Some((start, end)) = self.time_range {
            if row.timestamp < start || row.timestamp >= end {
                return false;
            }
        }
        if let Some(ids) = &self.revision_ids {
            if !ids.contains(&row.revision_id) {
                return false;
            }
        }
        true
    }
}

/// Remove every row matching the filter. Returns the surviving dataset
/// and how many rows were dropped; refuses to return an empty dataset.
pub fn apply_exclusion(
    dataset: &ScoredDataset,
    filter: &ExclusionFilter,
) -> Result<(ScoredDataset, usize), EvalError> {
    let kept: Vec<ScoredRow> = dataset
        .rows
        .iter()
        .filter(|row| !filter.matches(row))
        .cloned()
        .collect();
    let removed = dataset.rows.len() - kept.len();
    if kept.is_empty() {
        return Err(EvalError::EmptyResult);
    }
    Ok((ScoredDataset { rows: kept }, removed))
}
