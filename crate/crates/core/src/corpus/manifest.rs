//! Dataset manifests: named time windows that carve a corpus into
//! training, validation, and test splits.
//!
//! The manifest is JSON:
//!
//! ```json
//! {"splits": [{"name": "TRAINING",
//!              "from": "2012-10-01T00:00:00Z",
//!              "to":   "2016-03-01T00:00:00Z"}, ...]}
//! ```
//!
//! Intervals are half-open `[from, to)` in UTC, so a revision stamped
//! exactly at a boundary belongs to the later window. Revisions outside
//! every window are dropped from all splits.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::record::{RevisionId, RevisionRecord};
use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SplitName {
    #[serde(rename = "TRAINING")]
    Training,
    #[serde(rename = "VALIDATION")]
    Validation,
    #[serde(rename = "TEST")]
    Test,
}

impl SplitName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitName::Training => "TRAINING",
            SplitName::Validation => "VALIDATION",
            SplitName::Test => "TEST",
        }
    }

    pub fn parse(s: &str) -> Option<SplitName> {
        match s {
            "TRAINING" => Some(SplitName::Training),
            "VALIDATION" => Some(SplitName::Validation),
            "TEST" => Some(SplitName::Test),
            _ => None,
        }
    }
}

impl std::fmt::Display for SplitName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named half-open window. Bounds are UTC epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub name: SplitName,
    pub from: i64,
    pub to: i64,
}

impl SplitSpec {
    pub fn contains(&self, timestamp: i64) -> bool {
        self.from <= timestamp && timestamp < self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    splits: Vec<SplitSpec>,
}

fn parse_instant(s: &str) -> Result<i64, CorpusError> {
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc).timestamp())
        .map_err(|e| CorpusError::BadManifest(format!("bad timestamp {s:?}: {e}")))
}

fn format_instant(t: i64) -> String {
    Utc.timestamp_opt(t, 0)
        .single()
        .expect("epoch seconds in range")
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

#[derive(Serialize, Deserialize)]
struct ManifestJson {
    splits: Vec<SplitJson>,
}

#[derive(Serialize, Deserialize)]
struct SplitJson {
    name: SplitName,
    from: String,
    to: String,
}

impl DatasetManifest {
    /// Validates bounds, name uniqueness, and pairwise disjointness.
    pub fn new(splits: Vec<SplitSpec>) -> Result<Self, CorpusError> {
        if splits.is_empty() {
            return Err(CorpusError::BadManifest("manifest has no splits".into()));
        }
        for s in &splits {
            if s.from >= s.to {
                return Err(CorpusError::BadManifest(format!(
                    "split {} is empty or inverted: [{}, {})",
                    s.name,
                    format_instant(s.from),
                    format_instant(s.to)
                )));
            }
        }
        let mut names: Vec<SplitName> = splits.iter().map(|s| s.name).collect();
        names.sort();
        names.dedup();
        if names.len() != splits.len() {
            return Err(CorpusError::BadManifest("duplicate split names".into()));
        }
        let mut ordered = splits.clone();
        ordered.sort_by_key(|s| s.from);
        for pair in ordered.windows(2) {
            if pair[1].from < pair[0].to {
                return Err(CorpusError::OverlappingIntervals(
                    pair[0].name.to_string(),
                    pair[1].name.to_string(),
                ));
            }
        }
        Ok(DatasetManifest { splits })
    }

    /// The benchmark's canonical windows: training Oct 2012 – Feb 2016,
    /// validation Mar–Apr 2016, test May–Jun 2016.
    pub fn default_windows() -> Self {
        let spec = |name, from: &str, to: &str| SplitSpec {
            name,
            from: parse_instant(from).unwrap(),
            to: parse_instant(to).unwrap(),
        };
        DatasetManifest::new(vec![
            spec(SplitName::Training, "2012-10-01T00:00:00Z", "2016-03-01T00:00:00Z"),
            spec(SplitName::Validation, "2016-03-01T00:00:00Z", "2016-05-01T00:00:00Z"),
            spec(SplitName::Test, "2016-05-01T00:00:00Z", "2016-07-01T00:00:00Z"),
        ])
        .expect("canonical windows are valid")
    }

    pub fn splits(&self) -> &[SplitSpec] {
        &self.splits
    }

    pub fn split(&self, name: SplitName) -> Option<&SplitSpec> {
        self.splits.iter().find(|s| s.name == name)
    }

    /// Split containing the timestamp, if any.
    pub fn locate(&self, timestamp: i64) -> Option<SplitName> {
        self.splits.iter().find(|s| s.contains(timestamp)).map(|s| s.name)
    }

    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let parsed: ManifestJson = serde_json::from_str(json)
            .map_err(|e| CorpusError::BadManifest(format!("bad manifest JSON: {e}")))?;
        let mut splits = Vec::with_capacity(parsed.splits.len());
        for s in parsed.splits {
            splits.push(SplitSpec {
                name: s.name,
                from: parse_instant(&s.from)?,
                to: parse_instant(&s.to)?,
            });
        }
        DatasetManifest::new(splits)
    }

    pub fn to_json(&self) -> String {
        let json = ManifestJson {
            splits: self
                .splits
                .iter()
                .map(|s| SplitJson {
                    name: s.name,
                    from: format_instant(s.from),
                    to: format_instant(s.to),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&json).expect("manifest serializes")
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, CorpusError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), CorpusError> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }
}

/// Which revisions landed in which split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitAssignment {
    pub per_split: BTreeMap<SplitName, Vec<RevisionId>>,
    /// Revisions outside every window.
    pub dropped: usize,
}

impl SplitAssignment {
    pub fn ids(&self, name: SplitName) -> &[RevisionId] {
        self.per_split.get(&name).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// (lowest id, highest id) of a non-empty split.
    pub fn id_range(&self, name: SplitName) -> Option<(RevisionId, RevisionId)> {
        let ids = self.ids(name);
        Some((*ids.first()?, *ids.last()?))
    }
}

/// Assigns every revision to the split whose window contains its
/// timestamp. Records must be in corpus order.
pub fn split_corpus(
    records: &[RevisionRecord],
    manifest: &DatasetManifest,
) -> Result<SplitAssignment, CorpusError> {
    let mut out = SplitAssignment::default();
    for s in manifest.splits() {
        out.per_split.entry(s.name).or_default();
    }
    for r in records {
        match manifest.locate(r.timestamp) {
            Some(name) => out.per_split.get_mut(&name).unwrap().push(r.revision_id),
            None => out.dropped += 1,
        }
    }
    Ok(out)
}
