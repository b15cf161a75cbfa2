//! Mean ensemble over detector score tables.

use std::collections::BTreeMap;

use super::LearnError;
use crate::corpus::record::RevisionId;

/// Per-revision arithmetic mean across detectors. All tables must cover
/// exactly the same revision ids; the result is sorted by id.
pub fn meta_mean(
    tables: &[Vec<(RevisionId, f64)>],
) -> Result<Vec<(RevisionId, f64)>, LearnError> {
    let Some(first) = tables.first() else {
        return Err(LearnError::EmptyData("no score tables given".to_string()));
    };
    let mut sums: BTreeMap<RevisionId, f64> = BTreeMap::new();
    for &(id, score) in first {
        if sums.insert(id, score).is_some() {
            return Err(LearnError::IdSetMismatch(format!(
                "table 0 lists revision {id} twice"
            )));
        }
    }
    for (t, table) in tables.iter().enumerate().skip(1) {
        if table.len() != first.len() {
            return Err(LearnError::IdSetMismatch(format!(
                "table {t} has {} rows, table 0 has {}",
                table.len(),
                first.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(id, score) in table {
            if !seen.insert(id) {
                return Err(LearnError::IdSetMismatch(format!(
                    "table {t} lists revision {id} twice"
                )));
            }
            match sums.get_mut(&id) {
                Some(s) => *s += score,
                None => {
                    return Err(LearnError::IdSetMismatch(format!(
                        "table {t} scores revision {id}, table 0 does not"
                    )));
                }
            }
        }
    }
    let m = tables.len() as f64;
    Ok(sums.into_iter().map(|(id, s)| (id, s / m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages_three_detectors() {
        let tables = vec![
            vec![(1, 0.2), (2, 0.9)],
            vec![(2, 0.3), (1, 0.4)], // order may differ
            vec![(1, 0.6), (2, 0.0)],
        ];
        let out = meta_mean(&tables).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, 1);
        assert!((out[0].1 - 0.4).abs() < 1e-12);
        assert!((out[1].1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn single_table_is_identity_sorted_by_id() {
        let tables = vec![vec![(5, 0.7), (2, 0.1)]];
        let out = meta_mean(&tables).unwrap();
        assert_eq!(out, vec![(2, 0.1), (5, 0.7)]);
    }

    #[test]
    fn missing_id_is_rejected() {
        let tables = vec![vec![(1, 0.5), (2, 0.5)], vec![(1, 0.5), (3, 0.5)]];
        assert!(matches!(
            meta_mean(&tables),
            Err(LearnError::IdSetMismatch(_))
        ));
    }

    #[test]
    fn shorter_table_is_rejected() {
        let tables = vec![vec![(1, 0.5), (2, 0.5)], vec![(1, 0.5)]];
        assert!(matches!(
            meta_mean(&tables),
            Err(LearnError::IdSetMismatch(_))
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        assert!(matches!(
            meta_mean(&[vec![(1, 0.5), (1, 0.6)]]),
            Err(LearnError::IdSetMismatch(_))
        ));
        // duplicate in a later table masking an omission
        let tables = vec![vec![(1, 0.5), (2, 0.5)], vec![(1, 0.2), (1, 0.3)]];
        assert!(matches!(
            meta_mean(&tables),
            Err(LearnError::IdSetMismatch(_))
        ));
    }

    #[test]
    fn no_tables_is_an_error() {
        assert!(matches!(meta_mean(&[]), Err(LearnError::EmptyData(_))));
    }
}
