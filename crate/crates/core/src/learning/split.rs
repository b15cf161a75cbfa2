//! Best-split search over candidate features.
//!
//! Thresholds are placed at midpoints of consecutive distinct sorted
//! values; rows with a missing value (NaN) are routed wholesale to
//! whichever side yields the higher gain and the chosen side is
//! recorded. Ties are broken deterministically: higher gain wins, then
//! lower feature index, then lower threshold, and a no-missing tie on
//! direction resolves to the left. A split is only returned when it has
//! strictly positive gain and both children keep at least
//! `min_samples_leaf` rows.

use super::impurity::{impurity2, Criterion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub missing_left: bool,
    pub gain: f64,
}

/// Finds the best split of `indices` (rows into `matrix`/`labels`) over
/// the candidate features. Returns `None` for pure nodes, constant
/// candidates, or when no candidate achieves positive gain.
pub fn best_split(
    matrix: &[Vec<f64>],
    indices: &[usize],
    labels: &[bool],
    candidates: &[usize],
    criterion: Criterion,
    min_samples_leaf: usize,
) -> Option<Split> {
    let n = indices.len();
    if n < 2 {
        return None;
    }
    let pos = indices.iter().filter(|&&i| labels[i]).count() as u64;
    let neg = n as u64 - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let parent = impurity2(pos, neg, criterion);
    let nf = n as f64;
    let min_leaf = min_samples_leaf.max(1) as u64;

    let mut features: Vec<usize> = candidates.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<Split> = None;
    let mut present: Vec<(f64, bool)> = Vec::with_capacity(n);

    for &f in &features {
        present.clear();
        let (mut miss_pos, mut miss_neg) = (0u64, 0u64);
        for &i in indices {
            let v = matrix[i][f];
            if v.is_nan() {
                if labels[i] {
                    miss_pos += 1;
                } else {
                    miss_neg += 1;
                }
            } else {
                present.push((v, labels[i]));
            }
        }
        if present.len() < 2 {
            continue;
        }
        present.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN among present"));
        let pres_pos: u64 = present.iter().filter(|(_, y)| *y).count() as u64;
        let pres_neg = present.len() as u64 - pres_pos;
        let has_missing = miss_pos + miss_neg > 0;

        let (mut left_pos, mut left_neg) = (0u64, 0u64);
        for j in 1..present.len() {
            if present[j - 1].1 {
                left_pos += 1;
            } else {
                left_neg += 1;
            }
            let a = present[j - 1].0;
            let b = present[j].0;
            if a == b {
                continue;
            }
            // midpoint; if rounding lands on the upper value, fall back
            // to the lower one so that `<= threshold` keeps exactly the
            // prefix the gain was computed for
            let mut threshold = a + (b - a) * 0.5;
            if threshold >= b {
                threshold = a;
            }
            for missing_left in [true, false] {
                let (mut lp, mut ln) = (left_pos, left_neg);
                let (mut rp, mut rn) = (pres_pos - left_pos, pres_neg - left_neg);
                if missing_left {
                    lp += miss_pos;
                    ln += miss_neg;
                } else {
                    rp += miss_pos;
                    rn += miss_neg;
                }
                let (l, r) = (lp + ln, rp + rn);
                if l < min_leaf || r < min_leaf {
                    if !has_missing {
                        break;
                    }
                    continue;
                }
                let gain = parent
                    - (l as f64 / nf) * impurity2(lp, ln, criterion)
                    - (r as f64 / nf) * impurity2(rp, rn, criterion);
                if gain > 0.0 && best.map_or(true, |s| gain > s.gain) {
                    best = Some(Split {
                        feature: f,
                        threshold,
                        missing_left,
                        gain,
                    });
                }
                if !has_missing {
                    break; // both directions identical without missing rows
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn column(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    /// brute-force reference: enumerate every feature, boundary, and
    /// missing direction with the same tie rules
    fn oracle(
        matrix: &[Vec<f64>],
        indices: &[usize],
        labels: &[bool],
        candidates: &[usize],
        criterion: Criterion,
        min_leaf: usize,
    ) -> Option<Split> {
        let n = indices.len();
        if n < 2 {
            return None;
        }
        let pos = indices.iter().filter(|&&i| labels[i]).count() as u64;
        if pos == 0 || pos == n as u64 {
            return None;
        }
        let parent = impurity2(pos, n as u64 - pos, criterion);
        let mut feats: Vec<usize> = candidates.to_vec();
        feats.sort_unstable();
        feats.dedup();
        let mut best: Option<Split> = None;
        for f in feats {
            let mut vals: Vec<f64> = indices
                .iter()
                .map(|&i| matrix[i][f])
                .filter(|v| !v.is_nan())
                .collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            for w in vals.windows(2) {
                let mut t = w[0] + (w[1] - w[0]) * 0.5;
                if t >= w[1] {
                    t = w[0];
                }
                for missing_left in [true, false] {
                    let (mut lp, mut ln, mut rp, mut rn) = (0u64, 0u64, 0u64, 0u64);
                    for &i in indices {
                        let v = matrix[i][f];
                        let goes_left = if v.is_nan() { missing_left } else { v <= t };
                        match (goes_left, labels[i]) {
                            (true, true) => lp += 1,
                            (true, false) => ln += 1,
                            (false, true) => rp += 1,
                            (false, false) => rn += 1,
                        }
                    }
                    if lp + ln < min_leaf as u64 || rp + rn < min_leaf as u64 {
                        continue;
                    }
                    let gain = parent
                        - ((lp + ln) as f64 / n as f64) * impurity2(lp, ln, criterion)
                        - ((rp + rn) as f64 / n as f64) * impurity2(rp, rn, criterion);
                    if gain > 0.0 && best.map_or(true, |s| gain > s.gain) {
                        best = Some(Split {
                            feature: f,
                            threshold: t,
                            missing_left,
                            gain,
                        });
                    }
                }
            }
        }
        best
    }

    #[test]
    fn textbook_split_in_the_middle() {
        let m = column(&[1.0, 2.0, 3.0, 4.0]);
        let y = [false, false, true, true];
        let s = best_split(&m, &[0, 1, 2, 3], &y, &[0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 2.5);
        assert_eq!(s.gain, 0.5); // parent 0.5, both children pure
    }

    #[test]
    fn constant_feature_yields_nothing() {
        let m = column(&[7.0, 7.0, 7.0, 7.0]);
        let y = [false, true, false, true];
        assert_eq!(best_split(&m, &[0, 1, 2, 3], &y, &[0], Criterion::Gini, 1), None);
    }

    #[test]
    fn pure_labels_yield_nothing() {
        let m = column(&[1.0, 2.0, 3.0]);
        let y = [true, true, true];
        assert_eq!(best_split(&m, &[0, 1, 2], &y, &[0], Criterion::Gini, 1), None);
    }

    #[test]
    fn missing_rows_go_to_the_better_side() {
        // feature separates perfectly; one missing positive row should
        // be routed right (with the positives)
        let m = vec![
            vec![1.0],
            vec![2.0],
            vec![3.0],
            vec![4.0],
            vec![f64::NAN],
        ];
        let y = [false, false, true, true, true];
        let s = best_split(&m, &[0, 1, 2, 3, 4], &y, &[0], Criterion::Gini, 1).unwrap();
        assert!(!s.missing_left);
        assert_eq!(s.threshold, 2.5);
    }

    #[test]
    fn min_samples_leaf_blocks_narrow_children() {
        let m = column(&[1.0, 2.0, 3.0, 4.0]);
        let y = [true, false, true, false];
        // the outer boundaries leave a single row on one side and the
        // middle boundary has zero gain, so min_samples_leaf=2 blocks all
        assert!(best_split(&m, &[0, 1, 2, 3], &y, &[0], Criterion::Gini, 1).is_some());
        assert_eq!(best_split(&m, &[0, 1, 2, 3], &y, &[0], Criterion::Gini, 2), None);
    }

    #[test]
    fn ties_prefer_lower_feature_then_lower_threshold() {
        // two identical copies of the separating feature
        let m: Vec<Vec<f64>> = vec![
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![4.0, 4.0],
        ];
        let y = [false, false, true, true];
        let s = best_split(&m, &[0, 1, 2, 3], &y, &[1, 0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.feature, 0);

        // symmetric labels make thresholds 1.5 and 2.5 equally good on
        // [1,2,3,4] with y=[t,f,t,f]? no — use a feature where two
        // boundaries tie exactly: [0,0,1,1] with y=[f,t,f,t] has no
        // positive gain; instead verify the scan keeps the first (lower)
        // threshold among equal gains
        let m2 = column(&[1.0, 2.0, 3.0]);
        let y2 = [false, true, false];
        let s2 = best_split(&m2, &[0, 1, 2], &y2, &[0], Criterion::Gini, 1).unwrap();
        // boundaries 1.5 and 2.5 give mirror-image children (1|23 vs 12|3)
        assert_eq!(s2.threshold, 1.5);
    }

    #[test]
    fn duplicate_rows_are_handled() {
        let m = column(&[1.0, 1.0, 1.0, 5.0, 5.0]);
        let y = [false, false, false, true, true];
        let s = best_split(&m, &[0, 1, 2, 3, 4], &y, &[0], Criterion::Entropy, 1).unwrap();
        assert_eq!(s.threshold, 3.0);
        assert!((s.gain - impurity2(2, 3, Criterion::Entropy)).abs() < 1e-12);
    }

    #[test]
    fn matches_exhaustive_oracle_on_random_data() {
        let mut rng = SplitMix64::new(0xBEEF);
        let grid = [0.0, 1.0, 2.0, 3.0, f64::NAN];
        for case in 0..300 {
            let n = 2 + rng.next_below(24) as usize;
            let d = 1 + rng.next_below(4) as usize;
            let matrix: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| grid[rng.next_below(5) as usize]).collect())
                .collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.next_bool(0.5)).collect();
            let indices: Vec<usize> = (0..n).collect();
            let candidates: Vec<usize> = (0..d).collect();
            let min_leaf = 1 + rng.next_below(3) as usize;
            let criterion = if case % 2 == 0 { Criterion::Gini } else { Criterion::Entropy };

            let fast = best_split(&matrix, &indices, &labels, &candidates, criterion, min_leaf);
            let slow = oracle(&matrix, &indices, &labels, &candidates, criterion, min_leaf);
            match (fast, slow) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    assert_eq!(a.feature, b.feature, "case {case}");
                    assert_eq!(a.threshold.to_bits(), b.threshold.to_bits(), "case {case}");
                    assert_eq!(a.missing_left, b.missing_left, "case {case}");
                    assert_eq!(a.gain.to_bits(), b.gain.to_bits(), "case {case}");
                }
                (a, b) => panic!("case {case}: fast={a:?} oracle={b:?}"),
            }
        }
    }

    #[test]
    fn repeated_indices_weight_rows() {
        // bootstrap-style multiset: row 0 appears three times
        let m = column(&[1.0, 2.0]);
        let y = [false, true];
        let s = best_split(&m, &[0, 0, 0, 1], &y, &[0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.threshold, 1.5);
        // parent gini with counts (1,3) = 1 - 1/16 - 9/16 = 0.375; children pure
        assert!((s.gain - 0.375).abs() < 1e-12);
    }
}
