//! The detect pipeline: causal feature extraction over the corpus,
//! a frozen encoder and forest trained on the TRAINING split, and a
//! streaming detector that scores served revisions as they arrive,
//! optionally applying the session-prefix transform online.

use std::collections::BTreeMap;
use std::net::TcpListener;
use std::time::Duration;

use wdvdb_core::corpus::{
    assign_sessions, split_corpus, DatasetManifest, GroundTruth, RevisionId, RevisionRecord,
    SessionAssignment, SplitName,
};
use wdvdb_core::features::{extract_and_update, CumulativeState, FeatureEncoder, Lexicons};
use wdvdb_core::learning::{train_forest, DetectorPreset, ForestModel, MilAccumulator};
use wdvdb_core::stream::{run_client, serve_listener, ClientMode, Detector, StreamTrace};

use crate::error::CliError;

/// Rows of the corpus that fall in one manifest split, in stream order.
pub fn split_rows(
    records: &[RevisionRecord],
    manifest: &DatasetManifest,
    split: SplitName,
) -> Vec<RevisionRecord> {
    records
        .iter()
        .filter(|r| manifest.locate(r.timestamp) == Some(split))
        .cloned()
        .collect()
}

/// A trained detector ready to stream: model, frozen encoder, selected
/// columns, and the cumulative state warmed on every revision older
/// than the first served one. Scoring a received revision folds it into
/// the state, so causality holds by construction.
pub struct ReadyDetector {
    model: ForestModel,
    encoder: FeatureEncoder,
    selected: Vec<usize>,
    state: CumulativeState,
    lexicons: Lexicons,
    /// session lookup when the preset aggregates over session prefixes
    sessions: Option<SessionAssignment>,
    mil: MilAccumulator,
    /// model outputs before the session-prefix transform, kept so runs
    /// can be compared with and without the transform
    raw_scores: BTreeMap<RevisionId, f64>,
}

impl ReadyDetector {
    pub fn model(&self) -> &ForestModel {
        &self.model
    }

    pub fn raw_scores(&self) -> &BTreeMap<RevisionId, f64> {
        &self.raw_scores
    }
}

impl Detector for ReadyDetector {
    fn score(&mut self, record: &RevisionRecord) -> Result<f64, String> {
        let vector = extract_and_update(record, &mut self.state, &self.lexicons)
            .map_err(|e| e.to_string())?;
        let row = self.encoder.encode(&vector).map_err(|e| e.to_string())?;
        let picked: Vec<f64> = self.selected.iter().map(|&i| row[i]).collect();
        let raw = self.model.predict(&picked).map_err(|e| e.to_string())?;
        self.raw_scores.insert(record.revision_id, raw);
        let Some(sessions) = &self.sessions else {
            return Ok(raw);
        };
        let (session, _) = sessions
            .get(record.revision_id)
            .ok_or_else(|| format!("revision {} missing from session map", record.revision_id))?;
        Ok(self.mil.push(session, raw))
    }
}

/// Trains `preset` on the TRAINING split of `records` and returns a
/// detector warmed up to (but not including) the first revision of the
/// `served` split. `threads` caps the training thread pool; `None`
/// uses the global default.
pub fn prepare_detector(
    records: &[RevisionRecord],
    truth: &GroundTruth,
    manifest: &DatasetManifest,
    preset: &DetectorPreset,
    served: SplitName,
    threads: Option<usize>,
) -> Result<ReadyDetector, CliError> {
    let assignment = split_corpus(records, manifest)?;
    let first_served = assignment
        .ids(served)
        .first()
        .copied()
        .ok_or_else(|| CliError::Data(format!("split {served:?} has no revisions")))?;

    let lexicons = Lexicons::default();
    let mut state = CumulativeState::new();
    let mut train_vectors = Vec::new();
    let mut labels = Vec::new();
    for record in records {
        if record.revision_id >= first_served {
            break;
        }
        let vector = extract_and_update(record, &mut state, &lexicons)?;
        if manifest.locate(record.timestamp) == Some(SplitName::Training) {
            let label = truth.is_vandalism(record.revision_id).ok_or_else(|| {
                CliError::Data(format!("revision {} has no label", record.revision_id))
            })?;
            train_vectors.push(vector);
            labels.push(label);
        }
    }
    if train_vectors.is_empty() {
        return Err(CliError::Data(
            "TRAINING split has no revisions before the served split".into(),
        ));
    }

    let mut encoder = FeatureEncoder::new();
    for vector in &train_vectors {
        encoder.observe(vector)?;
    }
    encoder.freeze();
    let columns = encoder.columns()?;
    let selected = preset.features.select(&columns);
    if selected.is_empty() {
        return Err(CliError::Data(format!(
            "preset {} selects none of the {} encoded columns",
            preset.name,
            columns.len()
        )));
    }

    let mut matrix = Vec::with_capacity(train_vectors.len());
    for vector in &train_vectors {
        let row = encoder.encode(vector)?;
        matrix.push(selected.iter().map(|&i| row[i]).collect::<Vec<f64>>());
    }
    drop(train_vectors);

    let model = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
            pool.install(|| train_forest(&matrix, &labels, &preset.config))?
        }
        None => train_forest(&matrix, &labels, &preset.config)?,
    };

    let sessions = if preset.mil_enabled {
        Some(assign_sessions(records)?)
    } else {
        None
    };

    Ok(ReadyDetector {
        model,
        encoder,
        selected,
        state,
        lexicons,
        sessions,
        mil: MilAccumulator::new(),
        raw_scores: BTreeMap::new(),
    })
}

/// Replays `served` to `detector` over loopback inside one process:
/// binds an ephemeral port, serves on a background thread, runs the
/// client here, and returns the scores with the server's trace.
pub fn run_self_play(
    served: &[RevisionRecord],
    k: usize,
    timeout: Duration,
    client_name: &str,
    mode: ClientMode,
    detector: &mut dyn Detector,
) -> Result<(BTreeMap<RevisionId, f64>, StreamTrace), CliError> {
    let listener = TcpListener::bind("127.0.0.1:0")
        .map_err(|e| CliError::Protocol(format!("bind loopback: {e}")))?;
    let address = listener
        .local_addr()
        .map_err(|e| CliError::Protocol(format!("bind loopback: {e}")))?
        .to_string();
    std::thread::scope(|scope| {
        let server = scope.spawn(|| serve_listener(&listener, served, k, timeout));
        let client_result = run_client(&address, client_name, mode, detector);
        let server_result = server
            .join()
            .map_err(|_| CliError::Protocol("replay server panicked".into()))?;
        // a client failure usually takes the server down with it; report
        // the client error as the cause
        let scores = client_result?;
        let trace = server_result?;
        Ok((scores, trace))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use wdvdb_core::corpus::{generate_corpus, SynthConfig};
    use wdvdb_core::learning::filter_preset;

    fn small_corpus() -> (Vec<RevisionRecord>, GroundTruth) {
        let cfg = SynthConfig {
            n_revisions: 400,
            n_users: 12,
            n_items: 10,
            vandalism_rate: 0.05,
            seed: 9,
            ..SynthConfig::default()
        };
        let (records, truth, _) = generate_corpus(&cfg).unwrap();
        (records, truth)
    }

    #[test]
    fn split_rows_partition_the_located_corpus() {
        let (records, _) = small_corpus();
        let manifest = DatasetManifest::default_windows();
        let total: usize = [SplitName::Training, SplitName::Validation, SplitName::Test]
            .iter()
            .map(|&s| split_rows(&records, &manifest, s).len())
            .sum();
        let dropped = records
            .iter()
            .filter(|r| manifest.locate(r.timestamp).is_none())
            .count();
        assert_eq!(total + dropped, records.len());
    }

    #[test]
    fn self_play_scores_every_served_revision_in_range() {
        let (records, truth) = small_corpus();
        let manifest = DatasetManifest::default_windows();
        let preset = filter_preset(3);
        let mut detector = prepare_detector(
            &records,
            &truth,
            &manifest,
            &preset,
            SplitName::Test,
            Some(2),
        )
        .unwrap();
        let served = split_rows(&records, &manifest, SplitName::Test);
        let (scores, trace) = run_self_play(
            &served,
            16,
            Duration::from_secs(10),
            "t",
            ClientMode::Pipelined,
            &mut detector,
        )
        .unwrap();
        assert_eq!(scores.len(), served.len());
        assert!(scores.values().all(|s| (0.0..=1.0).contains(s)));
        assert!(trace.peak_window() <= 16);
    }

    #[test]
    fn missing_split_is_a_data_error() {
        let (records, truth) = small_corpus();
        let manifest = DatasetManifest::default_windows();
        // drop everything at or past the validation window start
        let cut: Vec<RevisionRecord> = records
            .iter()
            .filter(|r| manifest.locate(r.timestamp) == Some(SplitName::Training))
            .cloned()
            .collect();
        let preset = filter_preset(3);
        let err = match prepare_detector(&cut, &truth, &manifest, &preset, SplitName::Test, None) {
            Err(e) => e,
            Ok(_) => panic!("expected a data error"),
        };
        assert_eq!(err.exit_code(), 2);
    }
}
