//! Feature extraction: comment parsing, text statistics, cumulative
//! stream state, per-revision vectors, and the frozen categorical
//! encoder that turns vectors into numeric rows.

pub mod comment;
pub mod encode;
pub mod extract;
pub mod lexicon;
pub mod state;
pub mod text;

pub use comment::{parse_comment, serialize_comment, ParsedComment};
pub use encode::{FeatureEncoder, ONE_HOT_LIMIT};
pub use extract::{
    extract_and_update, FeatureVector, CATEGORICAL_FIELDS, NUMERIC_COLUMNS, TAGS_FIELD,
};
pub use lexicon::Lexicons;
pub use state::CumulativeState;

use crate::corpus::record::RevisionId;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("revision {id} arrived at or before already-processed id {last}")]
    OutOfOrder { id: RevisionId, last: RevisionId },
    #[error("revision {id} has timestamp {timestamp} outside the representable range")]
    BadTimestamp { id: RevisionId, timestamp: i64 },
    #[error("encoder is not frozen yet; freeze() before encoding")]
    NotFrozen,
    #[error("encoder is frozen; dictionaries can no longer be changed")]
    Frozen,
}
