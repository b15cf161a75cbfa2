//! Node impurity measures for tree growth.

use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Gini => "GINI",
            Criterion::Entropy => "ENTROPY",
        }
    }
}

/// Impurity of a node with the given class counts. Gini is 1 − Σ pᵢ²,
/// entropy is −Σ pᵢ log₂ pᵢ with 0·log 0 = 0.
pub fn impurity(class_counts: &[u64], criterion: Criterion) -> Result<f64, LearnError> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(LearnError::EmptyCounts);
    }
    let t = total as f64;
    let value = match criterion {
        Criterion::Gini => {
            let mut g = 1.0;
            for &c in class_counts {
                let p = c as f64 / t;
                g -= p * p;
            }
            g
        }
        Criterion::Entropy => {
            let mut h = 0.0;
            for &c in class_counts {
                if c > 0 {
                    let p = c as f64 / t;
                    h -= p * p.log2();
                }
            }
            h
        }
    };
    Ok(value)
}

/// Binary fast path used inside split search; the caller guarantees
/// `pos + neg > 0`.
pub(crate) fn impurity2(pos: u64, neg: u64, criterion: Criterion) -> f64 {
    debug_assert!(pos + neg > 0);
    let t = (pos + neg) as f64;
    match criterion {
        Criterion::Gini => {
            let p = pos as f64 / t;
            let q = neg as f64 / t;
            1.0 - p * p - q * q
        }
        Criterion::Entropy => {
            let mut h = 0.0;
            for c in [pos, neg] {
                if c > 0 {
                    let p = c as f64 / t;
                    h -= p * p.log2();
                }
            }
            h
        }
    }
}
