//! Ranking and threshold metrics for binary detectors.
//!
//! ROC AUC uses the Mann–Whitney rank statistic with average ranks for
//! ties, so it is exact (no curve discretization). PR AUC is average
//! precision with right-step interpolation; equal scores are processed
//! as one atomic group so intra-tie ordering cannot move the value.

use super::EvalError;

/// Metrics at a fixed decision threshold. A `None` marks an undefined
/// value (e.g. precision with no predicted positives) — never zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdMetrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn check_lengths(scores: &[f64], labels: &[bool]) -> Result<(), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    Ok(())
}

/// Area under the ROC curve via average ranks:
/// AUC = (R⁺ − n⁺(n⁺+1)/2) / (n⁺·n⁻) where R⁺ sums the ranks of the
/// positive examples in the score ordering.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        // walk the tie group [i, j) and hand every member the average rank
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        for &idx in &order[i..j] {
            if labels[idx] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let np = n_pos as f64;
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * n_neg as f64))
}

/// Area under the precision-recall curve as average precision:
/// AP = Σ_groups ΔRecall · Precision-after-group, scanning score groups
/// in descending order.
pub fn pr_auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group_tp = order[i..j].iter().filter(|&&idx| labels[idx]).count() as u64;
        let group_fp = (j - i) as u64 - group_tp;
        tp += group_tp;
        fp += group_fp;
        if group_tp > 0 {
            let precision = tp as f64 / (tp + fp) as f64;
            let delta_recall = group_tp as f64 / n_pos as f64;
            ap += delta_recall * precision;
        }
        i = j;
    }
    Ok(ap)
}

/// Confusion-matrix metrics with the prediction rule `score >= threshold`
/// (ties at the threshold count as positive predictions).
pub fn threshold_metrics(scores: &[f64], labels: &[bool], threshold: f64) -> ThresholdMetrics {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut tn = 0u64;
    let mut fne = 0u64;
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fne += 1,
        }
    }
    let n = tp + fp + tn + fne;
    let accuracy = if n > 0 {
        Some((tp + tn) as f64 / n as f64)
    } else {
        None
    };
    let precision = if tp + fp > 0 {
        Some(tp as f64 / (tp + fp) as f64)
    } else {
        None
    };
    let recall = if tp + fne > 0 {
        Some(tp as f64 / (tp + fne) as f64)
    } else {
        None
    };
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    ThresholdMetrics {
        accuracy,
        precision,
        recall,
        f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    // quadratic reference: wins + half-ties over all (pos, neg) pairs
    fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut pairs = 0u64;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                pairs += 1;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
        num / pairs as f64
    }

    // independent AP: recompute the confusion matrix from scratch at
    // every distinct threshold
    fn exhaustive_ap(scores: &[f64], labels: &[bool]) -> f64 {
        let n_pos = labels.iter().filter(|&&l| l).count() as f64;
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        let mut ap = 0.0;
        let mut prev_recall = 0.0;
        for t in thresholds {
            let tp = scores
                .iter()
                .zip(labels)
                .filter(|&(&s, &l)| s >= t && l)
                .count() as f64;
            let pp = scores.iter().filter(|&&s| s >= t).count() as f64;
            let recall = tp / n_pos;
            if tp > 0.0 {
                ap += (recall - prev_recall) * (tp / pp);
            }
            prev_recall = recall;
        }
        ap
    }

    #[test]
    fn roc_textbook_instance() {
        let auc = roc_auc(&[0.9, 0.8, 0.3, 0.1], &[true, false, true, false]).unwrap();
        assert_eq!(auc, 0.75);
    }

    #[test]
    fn roc_perfect_separation_is_one() {
        let auc = roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 1.0);
    }

    #[test]
    fn roc_complete_tie_is_half() {
        let auc = roc_auc(&[0.5; 6], &[true, false, true, false, false, true]).unwrap();
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn roc_single_class_is_rejected() {
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &[true, true]),
            Err(EvalError::SingleClass)
        ));
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &[false, false]),
            Err(EvalError::SingleClass)
        ));
    }

    #[test]
    fn roc_length_mismatch_is_rejected() {
        assert!(matches!(
            roc_auc(&[0.1], &[true, false]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn roc_score_reversal_complements_for_tie_free_scores() {
        let scores = [0.11, 0.42, 0.73, 0.24, 0.95, 0.56];
        let labels = [false, true, false, true, true, false];
        let flipped: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
        let a = roc_auc(&scores, &labels).unwrap();
        let b = roc_auc(&flipped, &labels).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roc_matches_pairwise_concordance_on_random_instances() {
        let mut rng = SplitMix64::new(0xE7A);
        for round in 0..200 {
            let n = 2 + (rng.next_below(60) as usize);
            // coarse grid makes ties common
            let scores: Vec<f64> = (0..n).map(|_| rng.next_below(8) as f64 / 7.0).collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.next_bool(0.4)).collect();
            let n_pos = labels.iter().filter(|&&l| l).count();
            if n_pos == 0 || n_pos == n {
                continue;
            }
            let fast = roc_auc(&scores, &labels).unwrap();
            let slow = pairwise_auc(&scores, &labels);
            assert!(
                (fast - slow).abs() < 1e-12,
                "round {round}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn pr_textbook_instance() {
        let ap = pr_auc(&[0.9, 0.8, 0.3, 0.1], &[true, false, true, false]).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn pr_perfect_ranking_is_one() {
        let ap = pr_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(ap, 1.0);
    }

    #[test]
    fn pr_without_positives_is_rejected() {
        assert!(matches!(
            pr_auc(&[0.5, 0.2], &[false, false]),
            Err(EvalError::NoPositives)
        ));
    }

    #[test]
    fn pr_tie_groups_are_atomic() {
        // one group holding a positive and a negative: precision is taken
        // after the whole group, whatever the input order
        let a = pr_auc(&[0.7, 0.7], &[true, false]).unwrap();
        let b = pr_auc(&[0.7, 0.7], &[false, true]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, 0.5);
    }

    #[test]
    fn pr_matches_exhaustive_thresholds_on_random_instances() {
        let mut rng = SplitMix64::new(99);
        for round in 0..200 {
            let n = 1 + (rng.next_below(50) as usize);
            let scores: Vec<f64> = (0..n).map(|_| rng.next_below(6) as f64 / 5.0).collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.next_bool(0.5)).collect();
            if !labels.iter().any(|&l| l) {
                continue;
            }
            let fast = pr_auc(&scores, &labels).unwrap();
            let slow = exhaustive_ap(&scores, &labels);
            assert!(
                (fast - slow).abs() < 1e-12,
                "round {round}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn threshold_clean_split() {
        let m = threshold_metrics(&[0.6, 0.4], &[true, false], 0.5);
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.precision, Some(1.0));
        assert_eq!(m.recall, Some(1.0));
        assert_eq!(m.f1, Some(1.0));
    }

    #[test]
    fn threshold_ties_count_as_positive_predictions() {
        let m = threshold_metrics(&[0.6, 0.6], &[true, false], 0.5);
        assert_eq!(m.precision, Some(0.5));
        assert_eq!(m.recall, Some(1.0));
        assert!((m.f1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.accuracy, Some(0.5));
    }

    #[test]
    fn threshold_without_predicted_positives() {
        let m = threshold_metrics(&[0.1, 0.2], &[true, false], 0.5);
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, Some(0.0));
        assert_eq!(m.f1, None);
        assert_eq!(m.accuracy, Some(0.5));
    }

    #[test]
    fn threshold_on_empty_input_is_fully_undefined() {
        let m = threshold_metrics(&[], &[], 0.5);
        assert_eq!(m.accuracy, None);
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f1, None);
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        proptest::collection::vec((0u32..=100, proptest::bool::ANY), 2..40).prop_map(|rows| {
            rows.into_iter()
                .map(|(s, l)| (s as f64 / 100.0, l))
                .unzip()
        })
    }

    proptest! {
        #[test]
        fn roc_is_invariant_under_monotone_maps((scores, labels) in arb_instance(), pick in 0usize..4) {
            let n_pos = labels.iter().filter(|&&l| l).count();
            prop_assume!(n_pos > 0 && n_pos < labels.len());
            let mapped: Vec<f64> = scores
                .iter()
                .map(|&s| match pick {
                    0 => s * s * s,
                    1 => s.exp(),
                    2 => 3.0 * s + 1.0,
                    _ => (1.0 + s).sqrt(),
                })
                .collect();
            let a = roc_auc(&scores, &labels).unwrap();
            let b = roc_auc(&mapped, &labels).unwrap();
            // rank-based, so the value is identical, not merely close
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        #[test]
        fn threshold_identities_hold((scores, labels) in arb_instance()) {
            let m = threshold_metrics(&scores, &labels, 0.5);
            let n = scores.len() as f64;
            let tp = scores.iter().zip(&labels).filter(|&(&s, &l)| s >= 0.5 && l).count() as f64;
            let tn = scores.iter().zip(&labels).filter(|&(&s, &l)| s < 0.5 && !l).count() as f64;
            prop_assert_eq!(m.accuracy.unwrap(), (tp + tn) / n);
            if let (Some(p), Some(r), Some(f)) = (m.precision, m.recall, m.f1) {
                prop_assert!((f - 2.0 * p * r / (p + r)).abs() < 1e-12);
            }
        }
    }
}
