//! Corpus summary statistics.
//!
//! Counts are reported for four entity kinds (revisions, sessions, items,
//! users) under a status axis (total / vandalism / regular) and a content
//! axis (all / head / body). A revision sits in exactly one cell per axis;
//! sessions, items, and users are counted in every cell for which they
//! contain at least one matching revision, so a session mixing vandalism
//! and regular edits is counted under both statuses and the status columns
//! can sum to more than the total. For revisions, vandalism + regular
//! equals the total in every content column.

use std::collections::HashSet;
use std::io::Write;

use super::record::{ContentType, RevisionRecord};
use super::session::assign_sessions;
use super::tsv::GroundTruth;
use super::CorpusError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsCell {
    pub all: u64,
    pub head: u64,
    pub body: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EntityStats {
    pub total: StatsCell,
    pub vandalism: StatsCell,
    pub regular: StatsCell,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub revisions: EntityStats,
    pub sessions: EntityStats,
    pub items: EntityStats,
    pub users: EntityStats,
}

// the nine (status, content) cells of one entity table
const CELLS: [(usize, usize); 9] = [
    (0, 0), (0, 1), (0, 2),
    (1, 0), (1, 1), (1, 2),
    (2, 0), (2, 1), (2, 2),
];

fn cell_mut(stats: &mut EntityStats, status: usize, content: usize) -> &mut u64 {
    let row = match status {
        0 => &mut stats.total,
        1 => &mut stats.vandalism,
        _ => &mut stats.regular,
    };
    match content {
        0 => &mut row.all,
        1 => &mut row.head,
        _ => &mut row.body,
    }
}

pub fn cell(stats: &EntityStats, status: usize, content: usize) -> u64 {
    let row = match status {
        0 => &stats.total,
        1 => &stats.vandalism,
        _ => &stats.regular,
    };
    match content {
        0 => row.all,
        1 => row.head,
        _ => row.body,
    }
}

/// Computes the full table. Every revision must be covered by the ground
/// truth; the first uncovered id raises `MissingLabel`.
pub fn compute_stats(
    records: &[RevisionRecord],
    truth: &GroundTruth,
) -> Result<CorpusStats, CorpusError> {
    let sessions = assign_sessions(records)?;
    let mut stats = CorpusStats::default();
    // deduplication sets per (entity, status, content) cell; revisions
    // need none because each revision matches one content and one status
    let mut session_seen: Vec<HashSet<u64>> = (0..9).map(|_| HashSet::new()).collect();
    let mut item_seen: Vec<HashSet<&str>> = (0..9).map(|_| HashSet::new()).collect();
    let mut user_seen: Vec<HashSet<&str>> = (0..9).map(|_| HashSet::new()).collect();
    for r in records {
        let vandalism = truth
            .is_vandalism(r.revision_id)
            .ok_or(CorpusError::MissingLabel(r.revision_id))?;
        let status = if vandalism { 1 } else { 2 };
        let content = match r.content_type {
            ContentType::Head => 1,
            ContentType::Body => 2,
        };
        let (session, _) = sessions.get(r.revision_id).expect("assigned above");
        for &(s, c) in &CELLS {
            let matches_status = s == 0 || s == status;
            let matches_content = c == 0 || c == content;
            if !(matches_status && matches_content) {
                continue;
            }
            let idx = s * 3 + c;
            *cell_mut(&mut stats.revisions, s, c) += 1;
            if session_seen[idx].insert(session) {
                *cell_mut(&mut stats.sessions, s, c) += 1;
            }
            if item_seen[idx].insert(&r.item_id) {
                *cell_mut(&mut stats.items, s, c) += 1;
            }
            if user_seen[idx].insert(&r.user_id) {
                *cell_mut(&mut stats.users, s, c) += 1;
            }
        }
    }
    Ok(stats)
}

/// TSV rendering: entity, status, content, count — fixed row order.
pub fn write_stats<W: Write>(stats: &CorpusStats, out: &mut W) -> std::io::Result<()> {
    let entities = [
        ("revisions", &stats.revisions),
        ("sessions", &stats.sessions),
        ("items", &stats.items),
        ("users", &stats.users),
    ];
    let statuses = ["total", "vandalism", "regular"];
    let contents = ["all", "head", "body"];
    writeln!(out, "entity\tstatus\tcontent\tcount")?;
    for (name, table) in entities {
        for (s, status) in statuses.iter().enumerate() {
            for (c, content) in contents.iter().enumerate() {
                writeln!(out, "{name}\t{status}\t{content}\t{}", cell(table, s, c))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::label::label_from_rollbacks;
    use crate::corpus::tsv::RollbackEvent;

    fn rev(id: u64, item: &str, user: &str, ct: ContentType) -> RevisionRecord {
        RevisionRecord {
            revision_id: id,
            timestamp: id as i64,
            item_id: item.to_string(),
            user_id: user.to_string(),
            is_privileged: false,
            content_type: ct,
            comment: String::new(),
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

    #[test]
    fn mixed_session_counts_under_both_statuses() {
        use ContentType::{Body, Head};
        // one session by A on Q1: revision 1 regular HEAD, revision 2
        // vandalism BODY (reverted by 4); B's revision 3 regular; the
        // rollback (4) is by user Mod
        let mut records = vec![
            rev(1, "Q1", "A", Head),
            rev(2, "Q1", "A", Body),
            rev(3, "Q2", "B", Head),
            rev(4, "Q1", "Mod", Body),
        ];
        records[3].is_privileged = true;
        let events = vec![RollbackEvent { reverting_id: 4, reverted: vec![2] }];
        let truth = label_from_rollbacks(&records, &events).unwrap();
        let stats = compute_stats(&records, &truth).unwrap();

        assert_eq!(stats.revisions.total.all, 4);
        assert_eq!(stats.revisions.vandalism.all, 1);
        assert_eq!(stats.revisions.regular.all, 3);
        assert_eq!(stats.revisions.vandalism.body, 1);
        assert_eq!(stats.revisions.vandalism.head, 0);

        // sessions: {1,2}, {3}, {4}
        assert_eq!(stats.sessions.total.all, 3);
        // A's session has a vandalism revision and a regular one
        assert_eq!(stats.sessions.vandalism.all, 1);
        assert_eq!(stats.sessions.regular.all, 3);
        // status columns may exceed the total for sessions
        assert!(stats.sessions.vandalism.all + stats.sessions.regular.all
            >= stats.sessions.total.all);

        // items: Q1 (vandalized), Q2
        assert_eq!(stats.items.total.all, 2);
        assert_eq!(stats.items.vandalism.all, 1);
        assert_eq!(stats.items.vandalism.body, 1);
        assert_eq!(stats.items.vandalism.head, 0);

        // users: A vandalized, B and Mod did not
        assert_eq!(stats.users.total.all, 3);
        assert_eq!(stats.users.vandalism.all, 1);
        assert_eq!(stats.users.regular.all, 3);
    }

    #[test]
    fn revision_rows_always_balance() {
        use ContentType::{Body, Head};
        let records = vec![
            rev(1, "Q1", "A", Head),
            rev(2, "Q1", "B", Body),
            rev(3, "Q1", "Mod", Body),
        ];
        let events = vec![RollbackEvent { reverting_id: 3, reverted: vec![2] }];
        let truth = label_from_rollbacks(&records, &events).unwrap();
        let stats = compute_stats(&records, &truth).unwrap();
        for c in 0..3 {
            assert_eq!(
                cell(&stats.revisions, 1, c) + cell(&stats.revisions, 2, c),
                cell(&stats.revisions, 0, c)
            );
        }
        assert_eq!(stats.revisions.total.head + stats.revisions.total.body,
                   stats.revisions.total.all);
    }

    #[test]
    fn missing_label_detected() {
        let records = vec![rev(1, "Q1", "A", ContentType::Head)];
        let truth = GroundTruth::new();
        assert!(matches!(
            compute_stats(&records, &truth),
            Err(CorpusError::MissingLabel(1))
        ));
    }

    #[test]
    fn tsv_rendering_is_stable() {
        let records = vec![rev(1, "Q1", "A", ContentType::Head)];
        let truth = label_from_rollbacks(&records, &[]).unwrap();
        let stats = compute_stats(&records, &truth).unwrap();
        let mut buf = Vec::new();
        write_stats(&stats, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("entity\tstatus\tcontent\tcount\n"));
        assert_eq!(text.lines().count(), 1 + 4 * 9);
        assert!(text.contains("revisions\ttotal\tall\t1"));
    }
}
