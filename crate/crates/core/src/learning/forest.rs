//! Bagged forest training and the persisted model format.
//!
//! Training splits the data into bags, grows `trees_per_bag` trees per
//! bag on bootstrap resamples, and averages leaf probabilities at
//! prediction time. Every random decision comes from a substream derived
//! from the config seed:
//!
//! - bag membership: salt `u64::MAX` (PARTITION's single shuffle) or
//!   salt `bag` (SUBSAMPLE's per-bag draw)
//! - tree `t` of bag `b`: salt `(b+1)·2³² + t`, which never collides
//!   with the bag salts
//!
//! Trees are therefore independent of training parallelism: rayon may
//! grow them in any order, and the indexed collect reassembles the same
//! forest every time.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::impurity::Criterion;
use super::tree::{GrowParams, Tree};
use super::LearnError;
use crate::features::FeatureEncoder;
use crate::rng::SplitMix64;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeaturesPerSplit {
    Count(usize),
    Rule(FeatureCountRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureCountRule {
    Log2,
    Sqrt,
}

impl FeaturesPerSplit {
    /// Concrete candidate count for a matrix of `d` columns.
    pub fn resolve(&self, d: usize) -> usize {
        if d == 0 {
            return 0;
        }
        let k = match self {
            FeaturesPerSplit::Count(k) => *k,
            FeaturesPerSplit::Rule(FeatureCountRule::Log2) => (d as f64).log2().ceil() as usize,
            FeaturesPerSplit::Rule(FeatureCountRule::Sqrt) => (d as f64).sqrt().ceil() as usize,
        };
        k.clamp(1, d)
    }
}

/// How bags are drawn from the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BaggingMode {
    /// one seeded shuffle, cut into disjoint consecutive parts
    #[default]
    Partition,
    /// independent per-bag samples without replacement
    Subsample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_bags: usize,
    pub bag_fraction: f64,
    pub trees_per_bag: usize,
    pub max_depth: usize,
    pub features_per_split: FeaturesPerSplit,
    pub criterion: Criterion,
    #[serde(default = "one")]
    pub min_samples_leaf: usize,
    #[serde(default)]
    pub bagging: BaggingMode,
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl ForestConfig {
    pub fn n_trees(&self) -> usize {
        self.n_bags * self.trees_per_bag
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |msg: &str| Err(LearnError::BadConfig(msg.to_string()));
        if self.n_bags == 0 || self.trees_per_bag == 0 {
            return bad("n_bags and trees_per_bag must be at least 1");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.max_depth > 512 {
            return bad("max_depth above 512 is not supported");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.bag_fraction > 0.0 && self.bag_fraction <= 1.0) {
            return bad("bag_fraction must lie in (0, 1]");
        }
        if self.bagging == BaggingMode::Partition
            && self.n_bags as f64 * self.bag_fraction > 1.0 + 1e-9
        {
            return bad("disjoint partitions need n_bags * bag_fraction <= 1");
        }
        if let FeaturesPerSplit::Count(0) = self.features_per_split {
            return bad("features_per_split count must be at least 1");
        }
        Ok(())
    }
}

/// Trained ensemble plus everything needed to score encoded rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: ForestConfig,
    /// arity of the rows this model was trained on
    pub n_features: usize,
    /// encoded-column names, parallel to row positions (set by the
    /// training pipeline; empty for bare-matrix training)
    pub columns: Vec<String>,
    /// frozen encoder that produced the training rows, when available
    pub encoder: Option<FeatureEncoder>,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Mean leaf probability across all trees.
    pub fn predict(&self, row: &[f64]) -> Result<f64, LearnError> {
        if row.len() != self.n_features {
            return Err(LearnError::ArityMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_many(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, LearnError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

const PARTITION_SALT: u64 = u64::MAX;

fn tree_salt(bag: usize, tree: usize) -> u64 {
    ((bag as u64 + 1) << 32) + tree as u64
}

fn bag_memberships(
    n_rows: usize,
    config: &ForestConfig,
) -> Result<Vec<Vec<usize>>, LearnError> {
    let per_bag = (n_rows as f64 * config.bag_fraction).floor() as usize;
    if per_bag == 0 {
        return Err(LearnError::EmptyData(format!(
            "bag_fraction {} of {} rows leaves empty bags",
            config.bag_fraction, n_rows
        )));
    }
    match config.bagging {
        BaggingMode::Partition => {
            let mut order: Vec<usize> = (0..n_rows).collect();
            SplitMix64::derive(config.seed, PARTITION_SALT).shuffle(&mut order);
            // boundaries at floor(i·n·fraction) tile the prefix evenly,
            // covering every row when n_bags·fraction == 1
            let bound = |i: usize| (i as f64 * n_rows as f64 * config.bag_fraction) as usize;
            Ok((0..config.n_bags)
                .map(|b| order[bound(b)..bound(b + 1)].to_vec())
                .collect())
        }
        BaggingMode::Subsample => Ok((0..config.n_bags)
            .map(|b| {
                let mut order: Vec<usize> = (0..n_rows).collect();
                let mut rng = SplitMix64::derive(config.seed, b as u64);
                for i in 0..per_bag {
                    let j = i + rng.next_below((n_rows - i) as u64) as usize;
                    order.swap(i, j);
                }
                order.truncate(per_bag);
                order
            })
            .collect()),
    }
}

/// Trains a forest on an already-encoded matrix. Deterministic for a
/// fixed (data, config) pair, regardless of thread count.
pub fn train_forest(
    matrix: &[Vec<f64>],
    labels: &[bool],
    config: &ForestConfig,
) -> Result<ForestModel, LearnError> {
    config.validate()?;
    if matrix.is_empty() {
        return Err(LearnError::EmptyData("matrix has no rows".to_string()));
    }
    if matrix.len() != labels.len() {
        return Err(LearnError::EmptyData(format!(
            "{} rows but {} labels",
            matrix.len(),
            labels.len()
        )));
    }
    let d = matrix[0].len();
    for row in matrix {
        if row.len() != d {
            return Err(LearnError::ArityMismatch {
                expected: d,
                got: row.len(),
            });
        }
    }
    let pos = labels.iter().filter(|&&y| y).count();
    if pos == 0 || pos == labels.len() {
        return Err(LearnError::SingleClass);
    }

    let bags = bag_memberships(matrix.len(), config)?;
    let params = GrowParams {
        max_depth: config.max_depth,
        features_per_split: config.features_per_split.resolve(d),
        n_features: d,
        criterion: config.criterion,
        min_samples_leaf: config.min_samples_leaf,
    };

    let jobs: Vec<(usize, usize)> = (0..config.n_bags)
        .flat_map(|b| (0..config.trees_per_bag).map(move |t| (b, t)))
        .collect();
    let trees: Vec<Tree> = jobs
        .par_iter()
        .map(|&(b, t)| {
            let part = &bags[b];
            let mut rng = SplitMix64::derive(config.seed, tree_salt(b, t));
            // bootstrap resample within the bag
            let indices: Vec<usize> = (0..part.len())
                .map(|_| part[rng.next_below(part.len() as u64) as usize])
                .collect();
            Tree::grow(matrix, labels, indices, &params, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        config: config.clone(),
        n_features: d,
        columns: Vec::new(),
        encoder: None,
        trees,
    })
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: ForestModel,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

/// Writes the model as versioned JSON; loading it back is exact.
pub fn save_model(model: &ForestModel, path: &Path) -> Result<(), LearnError> {
    let file = ModelFile {
        format: "wdvdb-forest".to_string(),
        version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_string(&file).map_err(|e| LearnError::CorruptFile(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ForestModel, LearnError> {
    let text = std::fs::read_to_string(path)?;
    let probe: VersionProbe =
        serde_json::from_str(&text).map_err(|e| LearnError::CorruptFile(e.to_string()))?;
    if probe.version != MODEL_FORMAT_VERSION {
        return Err(LearnError::VersionMismatch {
            found: probe.version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| LearnError::CorruptFile(e.to_string()))?;
    Ok(file.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::tree::TreeNode;

    fn toy_config(seed: u64) -> ForestConfig {
        ForestConfig {
            n_bags: 4,
            bag_fraction: 0.25,
            trees_per_bag: 3,
            max_depth: 8,
            features_per_split: FeaturesPerSplit::Count(2),
            criterion: Criterion::Gini,
            min_samples_leaf: 1,
            bagging: BaggingMode::Partition,
            seed,
        }
    }

    /// two noise columns plus one separator
    fn toy_data(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = SplitMix64::new(seed);
        let mut matrix = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let y = i % 2 == 0;
            let x = if y { 2.0 + rng.next_f64() } else { rng.next_f64() };
            matrix.push(vec![x, rng.next_f64(), rng.next_f64()]);
            labels.push(y);
        }
        (matrix, labels)
    }

    fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let (mut concordant, mut ties, mut pairs) = (0.0, 0.0, 0.0);
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi && !yj {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        concordant += 1.0;
                    } else if scores[i] == scores[j] {
                        ties += 1.0;
                    }
                }
            }
        }
        (concordant + 0.5 * ties) / pairs
    }

    #[test]
    fn separable_training_data_is_fully_ranked() {
        let (matrix, labels) = toy_data(200, 0xA0);
        let model = train_forest(&matrix, &labels, &toy_config(42)).unwrap();
        let scores = model.predict_many(&matrix).unwrap();
        assert_eq!(pairwise_auc(&scores, &labels), 1.0);
    }

    #[test]
    fn same_seed_gives_byte_identical_models() {
        let (matrix, labels) = toy_data(120, 0xA1);
        let a = train_forest(&matrix, &labels, &toy_config(7)).unwrap();
        let b = train_forest(&matrix, &labels, &toy_config(7)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = train_forest(&matrix, &labels, &toy_config(8)).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn thread_count_does_not_change_the_model() {
        let (matrix, labels) = toy_data(120, 0xA2);
        let solo = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| train_forest(&matrix, &labels, &toy_config(7)).unwrap());
        let parallel = train_forest(&matrix, &labels, &toy_config(7)).unwrap();
        assert_eq!(solo, parallel);
    }

    #[test]
    fn single_class_and_empty_inputs_are_rejected() {
        let (matrix, _) = toy_data(20, 0xA3);
        let ones = vec![true; 20];
        assert!(matches!(
            train_forest(&matrix, &ones, &toy_config(1)),
            Err(LearnError::SingleClass)
        ));
        assert!(matches!(
            train_forest(&[], &[], &toy_config(1)),
            Err(LearnError::EmptyData(_))
        ));
    }

    #[test]
    fn partition_mode_uses_every_row_exactly_once() {
        let cfg = toy_config(3);
        let bags = bag_memberships(100, &cfg).unwrap();
        assert_eq!(bags.len(), 4);
        let mut all: Vec<usize> = bags.concat();
        assert_eq!(all.len(), 100);
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 100, "partitions must be disjoint and complete");
    }

    #[test]
    fn subsample_mode_draws_independent_bags() {
        let mut cfg = toy_config(3);
        cfg.bagging = BaggingMode::Subsample;
        cfg.n_bags = 8;
        cfg.bag_fraction = 0.5; // >1 in total: only legal when subsampling
        let bags = bag_memberships(100, &cfg).unwrap();
        assert_eq!(bags.len(), 8);
        for bag in &bags {
            assert_eq!(bag.len(), 50);
            let mut sorted = bag.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 50, "sampling is without replacement");
        }
        assert_ne!(bags[0], bags[1]);
    }

    #[test]
    fn partition_invariant_is_enforced() {
        let mut cfg = toy_config(1);
        cfg.bag_fraction = 0.5; // 4 bags * 0.5 = 2 > 1
        assert!(matches!(cfg.validate(), Err(LearnError::BadConfig(_))));
        cfg.bagging = BaggingMode::Subsample;
        cfg.validate().unwrap();
    }

    #[test]
    fn tree_count_matches_config() {
        let (matrix, labels) = toy_data(80, 0xA4);
        let model = train_forest(&matrix, &labels, &toy_config(5)).unwrap();
        assert_eq!(model.trees.len(), toy_config(5).n_trees());
        assert_eq!(model.trees.len(), 12);
    }

    #[test]
    fn prediction_stays_within_leaf_bounds() {
        let (matrix, labels) = toy_data(100, 0xA5);
        let model = train_forest(&matrix, &labels, &toy_config(9)).unwrap();
        for row in matrix.iter().take(20) {
            let score = model.predict(row).unwrap();
            let per_tree: Vec<f64> = model.trees.iter().map(|t| t.predict(row)).collect();
            let lo = per_tree.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = per_tree.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(score >= lo && score <= hi);
            assert!((0.0..=1.0).contains(&score));
        }
    }

    #[test]
    fn hand_built_model_averages_leaves() {
        let model = ForestModel {
            config: toy_config(0),
            n_features: 1,
            columns: Vec::new(),
            encoder: None,
            trees: vec![
                Tree { nodes: vec![TreeNode::Leaf { probability: 0.2 }] },
                Tree { nodes: vec![TreeNode::Leaf { probability: 0.6 }] },
            ],
        };
        assert_eq!(model.predict(&[0.0]).unwrap(), 0.4);

        let single = ForestModel {
            trees: vec![Tree { nodes: vec![TreeNode::Leaf { probability: 0.9 }] }],
            ..model.clone()
        };
        assert_eq!(single.predict(&[1.0]).unwrap(), 0.9);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let (matrix, labels) = toy_data(40, 0xA6);
        let model = train_forest(&matrix, &labels, &toy_config(2)).unwrap();
        let err = model.predict(&[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(
            err,
            Err(LearnError::ArityMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn features_per_split_rules_resolve() {
        assert_eq!(FeaturesPerSplit::Count(2).resolve(100), 2);
        assert_eq!(FeaturesPerSplit::Count(200).resolve(100), 100);
        assert_eq!(FeaturesPerSplit::Rule(FeatureCountRule::Log2).resolve(100), 7);
        assert_eq!(FeaturesPerSplit::Rule(FeatureCountRule::Sqrt).resolve(100), 10);
        assert_eq!(FeaturesPerSplit::Rule(FeatureCountRule::Log2).resolve(1), 1);
        assert_eq!(FeaturesPerSplit::Count(3).resolve(0), 0);
    }

    #[test]
    fn features_per_split_serde_forms() {
        let n: FeaturesPerSplit = serde_json::from_str("2").unwrap();
        assert_eq!(n, FeaturesPerSplit::Count(2));
        let r: FeaturesPerSplit = serde_json::from_str("\"LOG2\"").unwrap();
        assert_eq!(r, FeaturesPerSplit::Rule(FeatureCountRule::Log2));
        let s: FeaturesPerSplit = serde_json::from_str("\"SQRT\"").unwrap();
        assert_eq!(s, FeaturesPerSplit::Rule(FeatureCountRule::Sqrt));
        assert_eq!(serde_json::to_string(&n).unwrap(), "2");
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"LOG2\"");
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (matrix, labels) = toy_data(100, 0xA7);
        let model = train_forest(&matrix, &labels, &toy_config(21)).unwrap();
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, model);

        // second save produces identical bytes
        let first = std::fs::read(&path).unwrap();
        save_model(&loaded, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);

        // predictions agree bit for bit on random rows
        let mut rng = SplitMix64::new(0xA8);
        for _ in 0..100 {
            let row = vec![rng.next_f64() * 3.0, rng.next_f64(), rng.next_f64()];
            assert_eq!(
                model.predict(&row).unwrap().to_bits(),
                loaded.predict(&row).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (matrix, labels) = toy_data(40, 0xA9);
        let model = train_forest(&matrix, &labels, &toy_config(4)).unwrap();
        save_model(&model, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(LearnError::CorruptFile(_))));
    }

    #[test]
    fn future_version_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(&path, r#"{"format":"wdvdb-forest","version":99,"model":{}}"#).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(LearnError::VersionMismatch { found: 99, supported: 1 })
        ));
    }
}
