//! Per-revision feature extraction.
//!
//! `extract_and_update` turns one revision into a `FeatureVector` using
//! only the cumulative state accrued from earlier revisions, then folds
//! the revision into that state. Replaying any prefix of a corpus
//! therefore reproduces the exact vectors that prefix produced the first
//! time — deleting future revisions can never change a past vector.
//!
//! Numeric features are `Option<f64>`: `None` means the feature does not
//! apply to this revision (no comment tail, no geolocation, first
//! statement edit, ...). Categorical features are string-valued and
//! likewise optional; tags are a multi-valued set. Encoding to plain
//! numeric rows happens separately in `encode`.

use chrono::{DateTime, Datelike, Timelike};

use super::comment::parse_comment;
use super::lexicon::Lexicons;
use super::state::CumulativeState;
use super::text::{char_stats, similarity, word_stats};
use super::FeatureError;
use crate::corpus::record::{user_is_anonymous, RevisionId, RevisionRecord};

/// Names of the numeric feature columns, in vector order.
pub const NUMERIC_COLUMNS: [&str; 48] = [
    // character-level statistics of the comment tail
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
    // word-level statistics of the comment tail
    "badWordRatio",
    "languageWordRatio",
    "containsLanguageWord",
    "containsURL",
    "lowerCaseWordRatio",
    "upperCaseWordRatio",
    "longestWord",
    "proportionOfQidAdded",
    "proportionOfLinksAdded",
    // sentence-level
    "commentTailLength",
    "commentLabelSimilarity",
    "commentSitelinkSimilarity",
    "commentCommentSimilarity",
    // statement-level prior frequencies
    "propertyFrequency",
    "itemValueFrequency",
    "literalValueFrequency",
    // user history
    "isRegisteredUser",
    "isPrivilegedUser",
    "userFrequency",
    "cumUserUniqueItems",
    "userUniqueItems",
    "userVandalismFraction",
    "userVandalismCount",
    // item history
    "logItemFrequency",
    "logCumItemUniqueUsers",
    "itemFrequency",
    "itemUniqueUsers",
    "itemVandalismFraction",
    "itemVandalismCount",
    // revision-level
    "commentLength",
    "isLatinLanguage",
    "positionWithinSession",
    "changeCount",
    "revisionSize",
    "isMinorRevision",
    "hourOfDay",
    "dayOfWeek",
];

/// Names of the single-valued categorical fields, in vector order.
pub const CATEGORICAL_FIELDS: [&str; 10] = [
    "revisionAction",
    "revisionSubaction",
    "revisionLanguage",
    "revisionPrevAction",
    "userContinent",
    "userCountry",
    "userRegion",
    "userCounty",
    "userCity",
    "userTimeZone",
];

/// Name of the multi-valued tag field.
pub const TAGS_FIELD: &str = "revisionTags";

/// Size threshold below which an edit counts as minor.
pub const MINOR_REVISION_BYTES: i64 = 10;

/// One revision's features, prior to numeric encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub revision_id: RevisionId,
    /// parallel to `NUMERIC_COLUMNS`
    pub numeric: Vec<Option<f64>>,
    /// parallel to `CATEGORICAL_FIELDS`
    pub categorical: Vec<Option<String>>,
    pub tags: Vec<String>,
}

impl FeatureVector {
    pub fn numeric_by_name(&self, name: &str) -> Option<f64> {
        let idx = NUMERIC_COLUMNS.iter().position(|c| *c == name)?;
        self.numeric[idx]
    }

    pub fn categorical_by_name(&self, name: &str) -> Option<&str> {
        let idx = CATEGORICAL_FIELDS.iter().position(|c| *c == name)?;
        self.categorical[idx].as_deref()
    }
}

fn bool_feature(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

fn nonempty(s: &str) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s.to_string())
    }
}

/// Computes the feature vector for `record` against the state of all
/// earlier revisions, then ingests the record into the state. Rejects
/// out-of-order input.
pub fn extract_and_update(
    record: &RevisionRecord,
    state: &mut CumulativeState,
    lexicons: &Lexicons,
) -> Result<FeatureVector, FeatureError> {
    if let Some(last) = state.last_id() {
        if record.revision_id <= last {
            return Err(FeatureError::OutOfOrder {
                id: record.revision_id,
                last,
            });
        }
    }

    let parsed = parse_comment(&record.comment);
    let tail = parsed.tail.as_deref();
    let item = state.item(&record.item_id);
    let user = state.user(&record.user_id);

    let mut numeric: Vec<Option<f64>> = Vec::with_capacity(NUMERIC_COLUMNS.len());

    // character-level
    match tail.and_then(char_stats) {
        Some(cs) => {
            numeric.push(Some(cs.lower_ratio));
            numeric.push(Some(cs.upper_ratio));
            numeric.push(Some(cs.digit_ratio));
            numeric.push(Some(cs.punctuation_ratio));
            numeric.push(Some(cs.whitespace_ratio));
            numeric.push(Some(cs.ascii_ratio));
            numeric.push(Some(cs.bracket_ratio));
            numeric.push(Some(cs.alphanumeric_ratio));
            numeric.push(cs.latin_ratio);
            numeric.push(cs.non_latin_ratio);
            numeric.push(Some(cs.longest_run as f64));
        }
        None => numeric.extend(std::iter::repeat(None).take(11)),
    }

    // word-level
    match tail.and_then(|t| word_stats(t, lexicons)) {
        Some(ws) => {
            numeric.push(ws.badword_ratio);
            numeric.push(ws.language_word_ratio);
            numeric.push(Some(ws.contains_language_word as u8 as f64));
            numeric.push(Some(ws.contains_url as u8 as f64));
            numeric.push(ws.lower_word_ratio);
            numeric.push(ws.upper_word_ratio);
            numeric.push(ws.longest_word.map(|w| w as f64));
            numeric.push(ws.qid_proportion);
            numeric.push(ws.link_proportion);
        }
        None => numeric.extend(std::iter::repeat(None).take(9)),
    }

    // sentence-level
    numeric.push(Some(tail.map_or(0, |t| t.chars().count()) as f64));
    numeric.push(pair_similarity(tail, record.item_label.as_deref()));
    numeric.push(pair_similarity(tail, record.sitelink_title.as_deref()));
    numeric.push(pair_similarity(tail, item.prev_tail.as_deref()));

    // statement-level
    numeric.push(
        record
            .property_id
            .as_deref()
            .and_then(|p| state.property_frequency(p)),
    );
    numeric.push(
        record
            .value_item
            .as_deref()
            .and_then(|v| state.item_value_frequency(v)),
    );
    numeric.push(
        record
            .value_literal
            .as_deref()
            .and_then(|v| state.literal_value_frequency(v)),
    );

    // user history
    let registered = !user_is_anonymous(&record.user_id);
    numeric.push(bool_feature(registered));
    numeric.push(bool_feature(
        record.is_privileged || lexicons.is_privileged_user(&record.user_id),
    ));
    numeric.push(Some(user.revisions as f64));
    numeric.push(Some(user.unique_items as f64));
    numeric.push(Some(user.unique_items as f64));
    numeric.push(if user.revisions > 0 {
        Some(user.vandalism as f64 / user.revisions as f64)
    } else {
        None
    });
    numeric.push(Some(user.vandalism as f64));

    // item history
    numeric.push(Some((1.0 + item.revisions as f64).ln()));
    numeric.push(Some((1.0 + item.unique_users as f64).ln()));
    numeric.push(Some(item.revisions as f64));
    numeric.push(Some(item.unique_users as f64));
    numeric.push(if item.revisions > 0 {
        Some(item.vandalism as f64 / item.revisions as f64)
    } else {
        None
    });
    numeric.push(Some(item.vandalism as f64));

    // revision-level
    numeric.push(Some(record.comment.chars().count() as f64));
    numeric.push(
        parsed
            .language
            .as_deref()
            .map(|l| lexicons.is_latin_language(l) as u8 as f64),
    );
    numeric.push(Some(
        state.session_position(&record.item_id, &record.user_id) as f64,
    ));
    numeric.push(parsed.count.map(|c| c as f64));
    numeric.push(Some(record.bytes_changed as f64));
    numeric.push(bool_feature(record.bytes_changed.abs() < MINOR_REVISION_BYTES));
    let when = DateTime::from_timestamp(record.timestamp, 0).ok_or(
        FeatureError::BadTimestamp {
            id: record.revision_id,
            timestamp: record.timestamp,
        },
    )?;
    numeric.push(Some(when.hour() as f64));
    numeric.push(Some(when.weekday().num_days_from_monday() as f64));

    debug_assert_eq!(numeric.len(), NUMERIC_COLUMNS.len());

    let geo = record.geo.as_ref();
    let categorical: Vec<Option<String>> = vec![
        parsed.action.clone(),
        parsed.subaction.clone(),
        parsed.language.clone(),
        item.prev_action.clone(),
        geo.and_then(|g| nonempty(&g.continent)),
        geo.and_then(|g| nonempty(&g.country)),
        geo.and_then(|g| nonempty(&g.region)),
        geo.and_then(|g| nonempty(&g.county)),
        geo.and_then(|g| nonempty(&g.city)),
        geo.and_then(|g| nonempty(&g.timezone)),
    ];
    debug_assert_eq!(categorical.len(), CATEGORICAL_FIELDS.len());

    let vector = FeatureVector {
        revision_id: record.revision_id,
        numeric,
        categorical,
        tags: record.tags.clone(),
    };

    state.ingest(record, &parsed);
    Ok(vector)
}

fn pair_similarity(a: Option<&str>, b: Option<&str>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(similarity(a, b)),
        _ => None,
    }
}
