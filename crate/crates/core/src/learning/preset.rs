//! Detector presets: named bundles of feature subset, forest
//! configuration, and the session-prefix scoring switch.

use serde::{Deserialize, Serialize};

use super::forest::{BaggingMode, FeatureCountRule, FeaturesPerSplit, ForestConfig};
use super::impurity::Criterion;
use crate::features::{CATEGORICAL_FIELDS, NUMERIC_COLUMNS, TAGS_FIELD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PresetName {
    Wdvd,
    Filter,
    OresSubset,
    Custom,
}

impl PresetName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Wdvd => "WDVD",
            PresetName::Filter => "FILTER",
            PresetName::OresSubset => "ORES_SUBSET",
            PresetName::Custom => "CUSTOM",
        }
    }
}

impl std::fmt::Display for PresetName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which encoded columns a detector trains on, expressed as rules over
/// column names so the selection survives corpus-dependent layouts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureSelector {
    /// exact numeric column names
    #[serde(default)]
    pub numeric: Vec<String>,
    /// categorical field names; matches all their encoded columns
    /// (`field=value` indicators or the `field:freq` column)
    #[serde(default)]
    pub fields: Vec<String>,
    /// include all per-tag columns
    #[serde(default)]
    pub tags: bool,
}

impl FeatureSelector {
    /// Selector matching every column.
    pub fn all() -> Self {
        Self {
            numeric: NUMERIC_COLUMNS.iter().map(|s| s.to_string()).collect(),
            fields: CATEGORICAL_FIELDS.iter().map(|s| s.to_string()).collect(),
            tags: true,
        }
    }

    /// Indices (into an encoded row) of the columns this selector keeps,
    /// in row order.
    pub fn select(&self, columns: &[String]) -> Vec<usize> {
        let tag_prefix = format!("{TAGS_FIELD}=");
        columns
            .iter()
            .enumerate()
            .filter(|(_, name)| {
                if name.starts_with(&tag_prefix) {
                    return self.tags;
                }
                if let Some(at) = name.find(['=', ':']) {
                    let field = &name[..at];
                    return self.fields.iter().any(|f| f == field);
                }
                self.numeric.iter().any(|c| c == *name)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorPreset {
    pub name: PresetName,
    pub features: FeatureSelector,
    pub config: ForestConfig,
    pub mil_enabled: bool,
}

/// Content features (character, word, sentence, statement blocks).
const CONTENT_NUMERIC: [&str; 27] = [
    "lowerCaseRatio",
    "upperCaseRatio",
    "digitRatio",
    "punctuationRatio",
    "whitespaceRatio",
    "asciiRatio",
    "bracketRatio",
    "alphanumericRatio",
    "latinRatio",
    "nonLatinRatio",
    "longestCharacterSequence",
    "badWordRatio",
    "languageWordRatio",
    "containsLanguageWord",
    "containsURL",
    "lowerCaseWordRatio",
    "upperCaseWordRatio",
    "longestWord",
    "proportionOfQidAdded",
    "proportionOfLinksAdded",
    "commentTailLength",
    "commentLabelSimilarity",
    "commentSitelinkSimilarity",
    "commentCommentSimilarity",
    "propertyFrequency",
    "itemValueFrequency",
    "literalValueFrequency",
];

/// Context features kept by the main detector: conservative user and
/// item aggregates plus revision metadata (the vandalism-history and
/// raw-frequency columns are deliberately left out as overfit-prone).
const WDVD_CONTEXT_NUMERIC: [&str; 9] = [
    "isRegisteredUser",
    "isPrivilegedUser",
    "userFrequency",
    "cumUserUniqueItems",
    "logItemFrequency",
    "logCumItemUniqueUsers",
    "commentLength",
    "isLatinLanguage",
    "positionWithinSession",
];

const WDVD_FIELDS: [&str; 10] = [
    "userContinent",
    "userCountry",
    "userRegion",
    "userCounty",
    "userCity",
    "userTimeZone",
    "revisionAction",
    "revisionSubaction",
    "revisionLanguage",
    "revisionPrevAction",
];

const ORES_NUMERIC: [&str; 6] = [
    "proportionOfQidAdded",
    "proportionOfLinksAdded",
    "propertyFrequency",
    "isRegisteredUser",
    "isPrivilegedUser",
    "changeCount",
];

/// Main detector: 16 disjoint bags of 1/16 of the training data, 8 trees
/// each, depth 32, two features per split, Gini, with session-prefix
/// score aggregation.
pub fn wdvd_preset(seed: u64) -> DetectorPreset {
    DetectorPreset {
        name: PresetName::Wdvd,
        features: FeatureSelector {
            numeric: CONTENT_NUMERIC
                .iter()
                .chain(WDVD_CONTEXT_NUMERIC.iter())
                .map(|s| s.to_string())
                .collect(),
            fields: WDVD_FIELDS.iter().map(|s| s.to_string()).collect(),
            tags: true,
        },
        config: ForestConfig {
            n_bags: 16,
            bag_fraction: 1.0 / 16.0,
            trees_per_bag: 8,
            max_depth: 32,
            features_per_split: FeaturesPerSplit::Count(2),
            criterion: Criterion::Gini,
            min_samples_leaf: 1,
            bagging: BaggingMode::Partition,
            seed,
        },
        mil_enabled: true,
    }
}

/// Tag-only detector: semi-automatic tool tags signal regular edits.
pub fn filter_preset(seed: u64) -> DetectorPreset {
    DetectorPreset {
        name: PresetName::Filter,
        features: FeatureSelector {
            numeric: Vec::new(),
            fields: Vec::new(),
            tags: true,
        },
        config: ForestConfig {
            n_bags: 1,
            bag_fraction: 1.0,
            trees_per_bag: 100,
            max_depth: 16,
            features_per_split: FeaturesPerSplit::Rule(FeatureCountRule::Sqrt),
            criterion: Criterion::Gini,
            min_samples_leaf: 1,
            bagging: BaggingMode::Partition,
            seed,
        },
        mil_enabled: false,
    }
}

/// Reduced-feature detector: 80 trees, log₂ features per split, entropy.
pub fn ores_preset(seed: u64) -> DetectorPreset {
    DetectorPreset {
        name: PresetName::OresSubset,
        features: FeatureSelector {
            numeric: ORES_NUMERIC.iter().map(|s| s.to_string()).collect(),
            fields: vec!["revisionAction".to_string(), "revisionSubaction".to_string()],
            tags: false,
        },
        config: ForestConfig {
            n_bags: 1,
            bag_fraction: 1.0,
            trees_per_bag: 80,
            max_depth: 32,
            features_per_split: FeaturesPerSplit::Rule(FeatureCountRule::Log2),
            criterion: Criterion::Entropy,
            min_samples_leaf: 1,
            bagging: BaggingMode::Partition,
            seed,
        },
        mil_enabled: false,
    }
}

/// Free-form preset file: a forest config plus optional feature rules
/// (defaults to every column) and the session-prefix switch.
#[derive(Debug, Clone, Deserialize)]
pub struct CustomPresetFile {
    pub config: ForestConfig,
    #[serde(default)]
    pub features: Option<FeatureSelector>,
    #[serde(default)]
    pub mil_enabled: bool,
}

pub fn custom_preset(file: CustomPresetFile) -> DetectorPreset {
    DetectorPreset {
        name: PresetName::Custom,
        features: file.features.unwrap_or_else(FeatureSelector::all),
        config: file.config,
        mil_enabled: file.mil_enabled,
    }
}
