//! From-scratch bagged decision trees, the detector presets built on
//! them, session-prefix score aggregation, and the mean ensemble.

pub mod forest;
pub mod impurity;
pub mod meta;
pub mod mil;
pub mod preset;
pub mod split;
pub mod tree;

pub use forest::{
    load_model, save_model, train_forest, BaggingMode, FeaturesPerSplit, ForestConfig,
    ForestModel, MODEL_FORMAT_VERSION,
};
pub use impurity::{impurity, Criterion};
pub use meta::meta_mean;
pub use mil::{mil_prefix, MilAccumulator};
pub use preset::{
    custom_preset, filter_preset, ores_preset, wdvd_preset, CustomPresetFile, DetectorPreset,
    FeatureSelector, PresetName,
};
pub use split::{best_split, Split};
pub use tree::{Tree, TreeNode};

use crate::corpus::record::RevisionId;

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error("impurity needs at least one nonzero class count")]
    EmptyCounts,
    #[error("no training data: {0}")]
    EmptyData(String),
    #[error("training labels contain a single class only")]
    SingleClass,
    #[error("invalid forest configuration: {0}")]
    BadConfig(String),
    #[error("row has {got} columns, model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("revision {0} is not covered by the session assignment")]
    UnknownSession(RevisionId),
    #[error("score tables disagree on the revision id set: {0}")]
    IdSetMismatch(String),
    #[error("model file has format version {found}, this build supports {supported}")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("model file is unreadable: {0}")]
    CorruptFile(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
