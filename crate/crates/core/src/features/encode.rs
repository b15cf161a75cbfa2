//! Turns feature vectors into plain numeric rows.
//!
//! Categorical fields need a dictionary before they become numbers, and
//! that dictionary must be learned on training data only: the encoder is
//! mutable while observing, then frozen, and only a frozen encoder can
//! encode. Values never seen during training encode as all-zeros (one-hot
//! fields) or frequency 0 (frequency fields), so scoring-time input can
//! never grow the row width.
//!
//! Encoding rules, per field kind:
//! - low-cardinality fields (action, subaction, language, previous
//!   action, continent) get one indicator column per training value as
//!   long as at most `ONE_HOT_LIMIT` distinct values were observed;
//!   beyond that they fall back to frequency encoding
//! - the remaining geographic fields always get a single column holding
//!   the value's relative frequency among training observations
//! - tags get one column per training tag, holding that tag's training
//!   frequency when the revision carries the tag and 0 otherwise
//!
//! Missing values (absent numeric feature, absent categorical in a
//! frequency field) encode as NaN — the out-of-band marker the trees
//! understand. No computed feature can produce NaN on its own, so the
//! marker never collides with real data.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::extract::{FeatureVector, CATEGORICAL_FIELDS, NUMERIC_COLUMNS, TAGS_FIELD};
use super::FeatureError;

/// Most distinct training values a field may have and still be one-hot.
pub const ONE_HOT_LIMIT: usize = 64;

/// Fields (by `CATEGORICAL_FIELDS` index) eligible for one-hot encoding.
const ONE_HOT_ELIGIBLE: [bool; 10] =
    [true, true, true, true, true, false, false, false, false, false];

#[derive(Debug, Clone, PartialEq)]
struct Dict {
    name: String,
    /// first-seen order; a value's position is its id
    values: Vec<String>,
    counts: Vec<u64>,
    total: u64,
    index: HashMap<String, usize>,
}

impl Dict {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            values: Vec::new(),
            counts: Vec::new(),
            total: 0,
            index: HashMap::new(),
        }
    }

    fn observe(&mut self, value: &str) {
        match self.index.get(value) {
            Some(&id) => self.counts[id] += 1,
            None => {
                self.index.insert(value.to_string(), self.values.len());
                self.values.push(value.to_string());
                self.counts.push(1);
            }
        }
        self.total += 1;
    }

    fn id_of(&self, value: &str) -> Option<usize> {
        self.index.get(value).copied()
    }

    fn frequency(&self, value: &str) -> f64 {
        match (self.id_of(value), self.total) {
            (Some(id), total) if total > 0 => self.counts[id] as f64 / total as f64,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DictRepr {
    name: String,
    values: Vec<String>,
    counts: Vec<u64>,
    total: u64,
}

impl From<DictRepr> for Dict {
    fn from(r: DictRepr) -> Self {
        let index = r
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Self {
            name: r.name,
            values: r.values,
            counts: r.counts,
            total: r.total,
            index,
        }
    }
}

impl From<Dict> for DictRepr {
    fn from(d: Dict) -> Self {
        Self {
            name: d.name,
            values: d.values,
            counts: d.counts,
            total: d.total,
        }
    }
}

/// Dictionary learner and frozen row encoder for categorical features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "EncoderRepr", into = "EncoderRepr")]
pub struct FeatureEncoder {
    frozen: bool,
    fields: Vec<Dict>,
    /// decided at freeze time, parallel to `fields`
    one_hot: Vec<bool>,
    tags: Dict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EncoderRepr {
    frozen: bool,
    fields: Vec<DictRepr>,
    one_hot: Vec<bool>,
    tags: DictRepr,
}

impl From<EncoderRepr> for FeatureEncoder {
    fn from(r: EncoderRepr) -> Self {
        Self {
            frozen: r.frozen,
            fields: r.fields.into_iter().map(Dict::from).collect(),
            one_hot: r.one_hot,
            tags: r.tags.into(),
        }
    }
}

impl From<FeatureEncoder> for EncoderRepr {
    fn from(e: FeatureEncoder) -> Self {
        Self {
            frozen: e.frozen,
            fields: e.fields.into_iter().map(DictRepr::from).collect(),
            one_hot: e.one_hot,
            tags: e.tags.into(),
        }
    }
}

impl Default for FeatureEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureEncoder {
    pub fn new() -> Self {
        Self {
            frozen: false,
            fields: CATEGORICAL_FIELDS.iter().map(|n| Dict::new(n)).collect(),
            one_hot: vec![false; CATEGORICAL_FIELDS.len()],
            tags: Dict::new(TAGS_FIELD),
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Feeds one training vector's categorical values into the
    /// dictionaries. Fails once the encoder is frozen.
    pub fn observe(&mut self, vector: &FeatureVector) -> Result<(), FeatureError> {
        if self.frozen {
            return Err(FeatureError::Frozen);
        }
        for (dict, value) in self.fields.iter_mut().zip(&vector.categorical) {
            if let Some(v) = value {
                dict.observe(v);
            }
        }
        for tag in &vector.tags {
            self.tags.observe(tag);
        }
        Ok(())
    }

    /// Locks the dictionaries and fixes each field's encoding kind.
    pub fn freeze(&mut self) {
        if self.frozen {
            return;
        }
        for (i, dict) in self.fields.iter().enumerate() {
            self.one_hot[i] = ONE_HOT_ELIGIBLE[i] && dict.values.len() <= ONE_HOT_LIMIT;
        }
        self.frozen = true;
    }

    /// Number of columns an encoded row has.
    pub fn width(&self) -> Result<usize, FeatureError> {
        if !self.frozen {
            return Err(FeatureError::NotFrozen);
        }
        let mut w = NUMERIC_COLUMNS.len();
        for (i, dict) in self.fields.iter().enumerate() {
            w += if self.one_hot[i] { dict.values.len() } else { 1 };
        }
        w += self.tags.values.len();
        Ok(w)
    }

    /// Column names of the encoded row, in row order: the numeric
    /// features, then `field=value` indicator / `field:freq` frequency
    /// columns, then one `revisionTags=tag` column per training tag.
    pub fn columns(&self) -> Result<Vec<String>, FeatureError> {
        if !self.frozen {
            return Err(FeatureError::NotFrozen);
        }
        let mut cols: Vec<String> = NUMERIC_COLUMNS.iter().map(|s| s.to_string()).collect();
        for (i, dict) in self.fields.iter().enumerate() {
            if self.one_hot[i] {
                cols.extend(dict.values.iter().map(|v| format!("{}={}", dict.name, v)));
            } else {
                cols.push(format!("{}:freq", dict.name));
            }
        }
        cols.extend(self.tags.values.iter().map(|t| format!("{TAGS_FIELD}={t}")));
        Ok(cols)
    }

    /// Encodes one vector into a plain numeric row (missing = NaN).
    pub fn encode(&self, vector: &FeatureVector) -> Result<Vec<f64>, FeatureError> {
        if !self.frozen {
            return Err(FeatureError::NotFrozen);
        }
        let mut row: Vec<f64> = Vec::with_capacity(self.width()?);
        row.extend(vector.numeric.iter().map(|v| v.unwrap_or(f64::NAN)));
        for (i, dict) in self.fields.iter().enumerate() {
            let value = vector.categorical[i].as_deref();
            if self.one_hot[i] {
                let hit = value.and_then(|v| dict.id_of(v));
                let base = row.len();
                row.extend(std::iter::repeat(0.0).take(dict.values.len()));
                if let Some(id) = hit {
                    row[base + id] = 1.0;
                }
            } else {
                row.push(match value {
                    Some(v) => dict.frequency(v),
                    None => f64::NAN,
                });
            }
        }
        for tag in &self.tags.values {
            row.push(if vector.tags.iter().any(|t| t == tag) {
                self.tags.frequency(tag)
            } else {
                0.0
            });
        }
        Ok(row)
    }

    /// Dictionary lookup: the id a field assigned to a value.
    pub fn value_id(&self, field: &str, value: &str) -> Option<usize> {
        self.dict(field)?.id_of(value)
    }

    /// Dictionary lookup: the value behind a field's id.
    pub fn value_of(&self, field: &str, id: usize) -> Option<&str> {
        self.dict(field)?.values.get(id).map(|s| s.as_str())
    }

    /// Distinct training values a field observed.
    pub fn cardinality(&self, field: &str) -> Option<usize> {
        Some(self.dict(field)?.values.len())
    }

    fn dict(&self, field: &str) -> Option<&Dict> {
        if field == TAGS_FIELD {
            return Some(&self.tags);
        }
        self.fields.iter().find(|d| d.name == field)
    }
}
