//! Cumulative stream state for causal feature extraction.
//!
//! The state aggregates everything seen strictly before the current
//! revision: per-user and per-item activity, statement-edit counts, each
//! item's latest action/tail/session run, and vandalism attributions.
//! Vandalism knowledge comes exclusively from rollback revisions already
//! ingested from the stream — a rollback's comment block names the
//! revision ids it reverted (action "rollback", param = comma-joined ids),
//! and those are attributed back to the users and items that produced
//! them. Nothing in here ever looks ahead, so any prefix of a corpus
//! yields exactly the state that prefix deserves.

use std::collections::{HashMap, HashSet};

use super::comment::ParsedComment;
use crate::corpus::record::{RevisionId, RevisionRecord};

/// Action name that marks a reverting revision.
pub const ROLLBACK_ACTION: &str = "rollback";

#[derive(Debug, Clone, Default)]
struct UserState {
    revisions: u64,
    items: HashSet<String>,
    vandalism: u64,
}

#[derive(Debug, Clone, Default)]
struct ItemState {
    revisions: u64,
    users: HashSet<String>,
    vandalism: u64,
    last_user: Option<String>,
    session_run: u32,
    prev_action: Option<String>,
    prev_tail: Option<String>,
}

/// Snapshot of prior user activity.
#[derive(Debug, Clone, Copy, Default)]
pub struct UserView {
    pub revisions: u64,
    pub unique_items: u64,
    pub vandalism: u64,
}

/// Snapshot of prior item activity.
#[derive(Debug, Clone, Default)]
pub struct ItemView {
    pub revisions: u64,
    pub unique_users: u64,
    pub vandalism: u64,
    pub prev_action: Option<String>,
    pub prev_tail: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CumulativeState {
    last_id: Option<RevisionId>,
    users: HashMap<String, UserState>,
    items: HashMap<String, ItemState>,
    property_counts: HashMap<String, u64>,
    property_total: u64,
    item_value_counts: HashMap<String, u64>,
    item_value_total: u64,
    literal_value_counts: HashMap<String, u64>,
    literal_value_total: u64,
    /// revision id -> (user, item), for attributing later rollbacks
    origin: HashMap<RevisionId, (String, String)>,
}

impl CumulativeState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_id(&self) -> Option<RevisionId> {
        self.last_id
    }

    pub fn user(&self, user_id: &str) -> UserView {
        match self.users.get(user_id) {
            Some(u) => UserView {
                revisions: u.revisions,
                unique_items: u.items.len() as u64,
                vandalism: u.vandalism,
            },
            None => UserView::default(),
        }
    }

    pub fn item(&self, item_id: &str) -> ItemView {
        match self.items.get(item_id) {
            Some(i) => ItemView {
                revisions: i.revisions,
                unique_users: i.users.len() as u64,
                vandalism: i.vandalism,
                prev_action: i.prev_action.clone(),
                prev_tail: i.prev_tail.clone(),
            },
            None => ItemView::default(),
        }
    }

    /// 1-based position this revision would take in its editing session:
    /// one past the item's current same-user run, or 1 on a user change.
    pub fn session_position(&self, item_id: &str, user_id: &str) -> u32 {
        match self.items.get(item_id) {
            Some(i) if i.last_user.as_deref() == Some(user_id) => i.session_run + 1,
            _ => 1,
        }
    }

    /// Prior relative frequency of this property among statement edits;
    /// `None` while no statement edit has been seen.
    pub fn property_frequency(&self, property_id: &str) -> Option<f64> {
        (self.property_total > 0).then(|| {
            *self.property_counts.get(property_id).unwrap_or(&0) as f64
                / self.property_total as f64
        })
    }

    pub fn item_value_frequency(&self, value_item: &str) -> Option<f64> {
        (self.item_value_total > 0).then(|| {
            *self.item_value_counts.get(value_item).unwrap_or(&0) as f64
                / self.item_value_total as f64
        })
    }

    pub fn literal_value_frequency(&self, value_literal: &str) -> Option<f64> {
        (self.literal_value_total > 0).then(|| {
            *self.literal_value_counts.get(value_literal).unwrap_or(&0) as f64
                / self.literal_value_total as f64
        })
    }

    /// Folds one revision into the state. The caller guarantees stream
    /// order; features must be computed before calling this.
    pub fn ingest(&mut self, record: &RevisionRecord, parsed: &ParsedComment) {
        self.last_id = Some(record.revision_id);
        self.origin.insert(
            record.revision_id,
            (record.user_id.clone(), record.item_id.clone()),
        );

        let user = self.users.entry(record.user_id.clone()).or_default();
        user.revisions += 1;
        user.items.insert(record.item_id.clone());

        let item = self.items.entry(record.item_id.clone()).or_default();
        item.revisions += 1;
        item.users.insert(record.user_id.clone());
        if item.last_user.as_deref() == Some(record.user_id.as_str()) {
            item.session_run += 1;
        } else {
            item.last_user = Some(record.user_id.clone());
            item.session_run = 1;
        }
        item.prev_action = parsed.action.clone();
        item.prev_tail = parsed.tail.clone();

        if let Some(p) = &record.property_id {
            *self.property_counts.entry(p.clone()).or_default() += 1;
            self.property_total += 1;
        }
        if let Some(v) = &record.value_item {
            *self.item_value_counts.entry(v.clone()).or_default() += 1;
            self.item_value_total += 1;
        }
        if let Some(v) = &record.value_literal {
            *self.literal_value_counts.entry(v.clone()).or_default() += 1;
            self.literal_value_total += 1;
        }

        if parsed.action.as_deref() == Some(ROLLBACK_ACTION) {
            if let Some(param) = &parsed.param {
                for part in param.split(',') {
                    let Ok(id) = part.trim().parse::<RevisionId>() else {
                        continue;
                    };
                    let Some((u, i)) = self.origin.get(&id).cloned() else {
                        continue;
                    };
                    if let Some(user) = self.users.get_mut(&u) {
                        user.vandalism += 1;
                    }
                    if let Some(item) = self.items.get_mut(&i) {
                        item.vandalism += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::record::ContentType;
    use crate::features::comment::parse_comment;

    fn rev(id: RevisionId, item: &str, user: &str, comment: &str) -> RevisionRecord {
        RevisionRecord {
            revision_id: id,
            timestamp: id as i64,
            item_id: item.to_string(),
            user_id: user.to_string(),
            is_privileged: false,
            content_type: ContentType::Head,
            comment: comment.to_string(),
            tags: Vec::new(),
            geo: None,
            item_label: None,
            sitelink_title: None,
            property_id: None,
            value_literal: None,
            value_item: None,
            bytes_changed: 0,
        }
    }

    fn ingest(state: &mut CumulativeState, r: &RevisionRecord) {
        let parsed = parse_comment(&r.comment);
        state.ingest(r, &parsed);
    }

    #[test]
    fn session_position_counts_consecutive_runs() {
        let mut s = CumulativeState::new();
        assert_eq!(s.session_position("Q1", "A"), 1);
        ingest(&mut s, &rev(1, "Q1", "A", ""));
        assert_eq!(s.session_position("Q1", "A"), 2);
        ingest(&mut s, &rev(2, "Q1", "A", ""));
        assert_eq!(s.session_position("Q1", "A"), 3);
        // another user breaks the run
        ingest(&mut s, &rev(3, "Q1", "B", ""));
        assert_eq!(s.session_position("Q1", "A"), 1);
        assert_eq!(s.session_position("Q1", "B"), 2);
    }

    #[test]
    fn rollback_attributes_vandalism_to_origin() {
        let mut s = CumulativeState::new();
        ingest(&mut s, &rev(7, "Q1", "Vandal", "/* wbsetlabel-set:1|en */ junk"));
        ingest(&mut s, &rev(8, "Q1", "Vandal", "/* wbsetlabel-set:1|en */ junk2"));
        assert_eq!(s.user("Vandal").vandalism, 0);
        ingest(
            &mut s,
            &rev(9, "Q1", "Mod", "/* rollback-revert:2||7,8 */ Reverted edits by Vandal"),
        );
        assert_eq!(s.user("Vandal").vandalism, 2);
        assert_eq!(s.item("Q1").vandalism, 2);
        assert_eq!(s.user("Mod").vandalism, 0);
    }

    #[test]
    fn rollback_with_unknown_targets_is_ignored() {
        let mut s = CumulativeState::new();
        ingest(&mut s, &rev(9, "Q1", "Mod", "/* rollback-revert:1||999 */ x"));
        assert_eq!(s.item("Q1").vandalism, 0);
    }

    #[test]
    fn statement_frequencies_need_prior_edits() {
        let mut s = CumulativeState::new();
        assert_eq!(s.property_frequency("P31"), None);
        let mut r = rev(1, "Q1", "A", "");
        r.content_type = ContentType::Body;
        r.property_id = Some("P31".to_string());
        ingest(&mut s, &r);
        assert_eq!(s.property_frequency("P31"), Some(1.0));
        assert_eq!(s.property_frequency("P999"), Some(0.0));
    }

    #[test]
    fn prev_action_and_tail_follow_the_item() {
        let mut s = CumulativeState::new();
        ingest(&mut s, &rev(1, "Q1", "A", "/* wbsetlabel-set:1|en */ hello"));
        let v = s.item("Q1");
        assert_eq!(v.prev_action.as_deref(), Some("wbsetlabel"));
        assert_eq!(v.prev_tail.as_deref(), Some("hello"));
        assert_eq!(s.item("Q2").prev_action, None);
    }
}
