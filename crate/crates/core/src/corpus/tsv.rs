//! TSV serialization for corpora, ground truth, and rollback events.
//!
//! Corpus files are UTF-8, one revision per line, 20 tab-separated columns:
//!
//! ```text
//! revision_id  timestamp  item_id  user_id  is_privileged  content_type
//! comment  tags  continent  country  region  county  city  timezone
//! item_label  sitelink_title  property_id  value_literal  value_item
//! bytes_changed
//! ```
//!
//! Embedded tabs are escaped as `\t`, newlines as `\n`, backslashes as
//! `\\`; absent optional fields serialize as the empty string. Timestamps
//! are UTC epoch seconds, is_privileged is 0/1, tags are comma-joined.
//! Revision ids must be strictly increasing down the file.
//!
//! Ground-truth files have three columns: revision_id, is_vandalism (0/1),
//! reverting_revision_id (empty when the revision was never reverted).
//! Rollback-event files have two: reverting_revision_id and the
//! comma-joined ids it reverted.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::record::{ContentType, GeoInfo, RevisionId, RevisionRecord};
use super::CorpusError;

pub const CORPUS_COLUMNS: usize = 20;

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Result<String, String> {
    if !s.contains('\\') {
        return Ok(s.to_string());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => return Err(format!("unknown escape sequence \\{other}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

fn opt_str(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

fn non_empty(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// One corpus line (no trailing newline). This exact string is what the
/// replay server embeds in its R frames.
pub fn serialize_row(r: &RevisionRecord) -> Result<String, CorpusError> {
    for tag in &r.tags {
        if tag.contains(',') || tag.is_empty() {
            return Err(CorpusError::BadField(format!(
                "tag {tag:?} on revision {} must be non-empty and comma-free",
                r.revision_id
            )));
        }
    }
    if r.property_id.is_some() && r.content_type != ContentType::Body {
        return Err(CorpusError::BadField(format!(
            "revision {} has a property_id but is not a BODY edit",
            r.revision_id
        )));
    }
    let empty = GeoInfo {
        continent: String::new(),
        country: String::new(),
        region: String::new(),
        county: String::new(),
        city: String::new(),
        timezone: String::new(),
    };
    let geo = r.geo.as_ref().unwrap_or(&empty);
    let cols: [&str; CORPUS_COLUMNS] = [
        &r.revision_id.to_string(),
        &r.timestamp.to_string(),
        &r.item_id,
        &r.user_id,
        if r.is_privileged { "1" } else { "0" },
        r.content_type.as_str(),
        &r.comment,
        &r.tags.join(","),
        &geo.continent,
        &geo.country,
        &geo.region,
        &geo.county,
        &geo.city,
        &geo.timezone,
        opt_str(&r.item_label),
        opt_str(&r.sitelink_title),
        opt_str(&r.property_id),
        opt_str(&r.value_literal),
        opt_str(&r.value_item),
        &r.bytes_changed.to_string(),
    ];
    let escaped: Vec<String> = cols.iter().map(|c| escape_field(c)).collect();
    Ok(escaped.join("\t"))
}

/// Parses one corpus line. `line_no` is 1-based and only used in errors.
pub fn parse_row(line: &str, line_no: usize) -> Result<RevisionRecord, CorpusError> {
    let raw: Vec<&str> = line.split('\t').collect();
    if raw.len() != CORPUS_COLUMNS {
        return Err(CorpusError::Malformed {
            line: line_no,
            column: raw.len(),
            msg: format!("expected {CORPUS_COLUMNS} columns, found {}", raw.len()),
        });
    }
    let mut cols = Vec::with_capacity(CORPUS_COLUMNS);
    for (i, f) in raw.iter().enumerate() {
        cols.push(unescape_field(f).map_err(|msg| CorpusError::Malformed {
            line: line_no,
            column: i,
            msg,
        })?);
    }
    let bad = |column: usize, msg: String| CorpusError::Malformed {
        line: line_no,
        column,
        msg,
    };
    let revision_id: RevisionId = cols[0]
        .parse()
        .map_err(|_| bad(0, format!("bad revision id {:?}", cols[0])))?;
    let timestamp: i64 = cols[1]
        .parse()
        .map_err(|_| bad(1, format!("bad timestamp {:?}", cols[1])))?;
    let is_privileged = match cols[4].as_str() {
        "0" => false,
        "1" => true,
        other => return Err(bad(4, format!("is_privileged must be 0 or 1, got {other:?}"))),
    };
    let content_type = ContentType::parse(&cols[5])
        .ok_or_else(|| bad(5, format!("bad content type {:?}", cols[5])))?;
    let tags: Vec<String> = cols[7]
        .split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.to_string())
        .collect();
    let geo_fields = &cols[8..14];
    let geo = if geo_fields.iter().all(|f| f.is_empty()) {
        None
    } else {
        Some(GeoInfo {
            continent: geo_fields[0].clone(),
            country: geo_fields[1].clone(),
            region: geo_fields[2].clone(),
            county: geo_fields[3].clone(),
            city: geo_fields[4].clone(),
            timezone: geo_fields[5].clone(),
        })
    };
    let property_id = non_empty(cols[16].clone());
    if property_id.is_some() && content_type != ContentType::Body {
        return Err(bad(16, "property_id present on a non-BODY edit".to_string()));
    }
    let bytes_changed: i64 = cols[19]
        .parse()
        .map_err(|_| bad(19, format!("bad bytes_changed {:?}", cols[19])))?;
    Ok(RevisionRecord {
        revision_id,
        timestamp,
        item_id: cols[2].clone(),
        user_id: cols[3].clone(),
        is_privileged,
        content_type,
        comment: cols[6].clone(),
        tags,
        geo,
        item_label: non_empty(cols[14].clone()),
        sitelink_title: non_empty(cols[15].clone()),
        property_id,
        value_literal: non_empty(cols[17].clone()),
        value_item: non_empty(cols[18].clone()),
        bytes_changed,
    })
}

pub fn write_corpus<W: Write>(records: &[RevisionRecord], out: &mut W) -> Result<(), CorpusError> {
    for r in records {
        out.write_all(serialize_row(r)?.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a whole corpus, enforcing strictly increasing revision ids.
pub fn read_corpus<R: Read>(input: R) -> Result<Vec<RevisionRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut last_id: Option<RevisionId> = None;
    // split on '\n' ourselves: embedded newlines are escaped, and we must
    // not strip '\r' bytes that belong to field data
    let mut reader = BufReader::new(input);
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    for (i, line) in buf.split('\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let record = parse_row(line, i + 1)?;
        if let Some(prev) = last_id {
            if record.revision_id <= prev {
                return Err(CorpusError::NonMonotoneId(record.revision_id));
            }
        }
        last_id = Some(record.revision_id);
        records.push(record);
    }
    Ok(records)
}

pub fn save_corpus<P: AsRef<Path>>(records: &[RevisionRecord], path: P) -> Result<(), CorpusError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_corpus(records, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_corpus<P: AsRef<Path>>(path: P) -> Result<Vec<RevisionRecord>, CorpusError> {
    read_corpus(std::fs::File::open(path)?)
}

// ---------------------------------------------------------------------------
// ground truth
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthEntry {
    pub is_vandalism: bool,
    /// Id of the revision that rolled this one back, when any did.
    pub reverting_id: Option<RevisionId>,
}

/// Per-revision labels. Vandalism labels are derived from rollbacks, so
/// every vandalism entry carries the reverting revision's id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    entries: BTreeMap<RevisionId, TruthEntry>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: RevisionId, entry: TruthEntry) -> Result<(), CorpusError> {
        if entry.is_vandalism && entry.reverting_id.is_none() {
            return Err(CorpusError::BadField(format!(
                "vandalism label for revision {id} lacks a reverting id"
            )));
        }
        self.entries.insert(id, entry);
        Ok(())
    }

    pub fn get(&self, id: RevisionId) -> Option<&TruthEntry> {
        self.entries.get(&id)
    }

    pub fn is_vandalism(&self, id: RevisionId) -> Option<bool> {
        self.entries.get(&id).map(|e| e.is_vandalism)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RevisionId, &TruthEntry)> {
        self.entries.iter()
    }

    pub fn vandalism_count(&self) -> usize {
        self.entries.values().filter(|e| e.is_vandalism).count()
    }
}

pub fn write_truth<W: Write>(truth: &GroundTruth, out: &mut W) -> Result<(), CorpusError> {
    for (id, e) in truth.iter() {
        let reverting = e.reverting_id.map(|r| r.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{id}\t{}\t{reverting}",
            if e.is_vandalism { "1" } else { "0" }
        )?;
    }
    Ok(())
}

pub fn read_truth<R: Read>(input: R) -> Result<GroundTruth, CorpusError> {
    let mut truth = GroundTruth::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(CorpusError::Malformed {
                line: line_no,
                column: cols.len(),
                msg: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let bad = |column: usize, msg: String| CorpusError::Malformed {
            line: line_no,
            column,
            msg,
        };
        let id: RevisionId = cols[0]
            .parse()
            .map_err(|_| bad(0, format!("bad revision id {:?}", cols[0])))?;
        let is_vandalism = match cols[1] {
            "0" => false,
            "1" => true,
            other => return Err(bad(1, format!("is_vandalism must be 0 or 1, got {other:?}"))),
        };
        let reverting_id = if cols[2].is_empty() {
            None
        } else {
            Some(
                cols[2]
                    .parse()
                    .map_err(|_| bad(2, format!("bad reverting id {:?}", cols[2])))?,
            )
        };
        truth
            .insert(id, TruthEntry { is_vandalism, reverting_id })
            .map_err(|e| bad(2, e.to_string()))?;
    }
    Ok(truth)
}

pub fn save_truth<P: AsRef<Path>>(truth: &GroundTruth, path: P) -> Result<(), CorpusError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_truth(truth, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_truth<P: AsRef<Path>>(path: P) -> Result<GroundTruth, CorpusError> {
    read_truth(std::fs::File::open(path)?)
}

// ---------------------------------------------------------------------------
// rollback events
// ---------------------------------------------------------------------------

/// One rollback: a privileged revision that reverted a set of earlier
/// revisions on the same item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollbackEvent {
    pub reverting_id: RevisionId,
    pub reverted: Vec<RevisionId>,
}

pub fn write_rollbacks<W: Write>(events: &[RollbackEvent], out: &mut W) -> Result<(), CorpusError> {
    for e in events {
        let ids: Vec<String> = e.reverted.iter().map(|id| id.to_string()).collect();
        writeln!(out, "{}\t{}", e.reverting_id, ids.join(","))?;
    }
    Ok(())
}

pub fn read_rollbacks<R: Read>(input: R) -> Result<Vec<RollbackEvent>, CorpusError> {
    let mut events = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(CorpusError::Malformed {
                line: line_no,
                column: cols.len(),
                msg: format!("expected 2 columns, found {}", cols.len()),
            });
        }
        let bad = |column: usize, msg: String| CorpusError::Malformed {
            line: line_no,
            column,
            msg,
        };
        let reverting_id: RevisionId = cols[0]
            .parse()
            .map_err(|_| bad(0, format!("bad revision id {:?}", cols[0])))?;
        let mut reverted = Vec::new();
        for part in cols[1].split(',').filter(|p| !p.is_empty()) {
            reverted.push(
                part.parse()
                    .map_err(|_| bad(1, format!("bad reverted id {part:?}")))?,
            );
        }
        events.push(RollbackEvent { reverting_id, reverted });
    }
    Ok(events)
}

pub fn save_rollbacks<P: AsRef<Path>>(events: &[RollbackEvent], path: P) -> Result<(), CorpusError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_rollbacks(events, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_rollbacks<P: AsRef<Path>>(path: P) -> Result<Vec<RollbackEvent>, CorpusError> {
    read_rollbacks(std::fs::File::open(path)?)
}
