//! Corpus handling: revision records, TSV I/O, editing sessions,
//! time-window splits, rollback-derived labels, synthetic generation, and
//! summary statistics.

pub mod label;
pub mod manifest;
pub mod record;
pub mod session;
pub mod stats;
pub mod synth;
pub mod tsv;

pub use label::label_from_rollbacks;
pub use manifest::{split_corpus, DatasetManifest, SplitAssignment, SplitName, SplitSpec};
pub use record::{user_is_anonymous, ContentType, GeoInfo, RevisionId, RevisionRecord};
pub use session::{assign_sessions, SessionAssignment, SessionId};
pub use stats::{compute_stats, write_stats, CorpusStats, EntityStats, StatsCell};
pub use synth::{generate_corpus, SynthConfig};
pub use tsv::{
    load_corpus, load_rollbacks, load_truth, parse_row, read_corpus, read_rollbacks, read_truth,
    save_corpus, save_rollbacks, save_truth, serialize_row, write_corpus, write_rollbacks,
    write_truth, GroundTruth, RollbackEvent, TruthEntry,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}, column {column}: {msg}")]
    Malformed { line: usize, column: usize, msg: String },
    #[error("revision ids must be strictly increasing; {0} is out of order")]
    NonMonotoneId(RevisionId),
    #[error("unknown revision {0}")]
    UnknownRevision(RevisionId),
    #[error("no label for revision {0}")]
    MissingLabel(RevisionId),
    #[error("splits {0} and {1} overlap")]
    OverlappingIntervals(String, String),
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("bad rollback event: {0}")]
    BadRollback(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("unserializable field: {0}")]
    BadField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
