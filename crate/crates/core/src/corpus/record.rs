//! Revision records: one row of benchmark corpus data.
//!
//! A corpus is a chronologically ordered list of edits ("revisions") to a
//! collaborative knowledge base. Each revision touches one item and is
//! attributed to one user; unregistered users are identified by their IP
//! address (dotted-quad or colon-hex), registered users by name. Edits to
//! an item's label/description/alias record are HEAD edits; edits to its
//! statements and sitelinks are BODY edits.

use serde::{Deserialize, Serialize};

pub type RevisionId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContentType {
    Head,
    Body,
}

impl ContentType {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContentType::Head => "HEAD",
            ContentType::Body => "BODY",
        }
    }

    pub fn parse(s: &str) -> Option<ContentType> {
        match s {
            "HEAD" => Some(ContentType::Head),
            "BODY" => Some(ContentType::Body),
            _ => None,
        }
    }
}

/// Coarse geolocation of the editing IP. Present only for unregistered
/// users; registered accounts carry no location data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoInfo {
    pub continent: String,
    pub country: String,
    pub region: String,
    pub county: String,
    pub city: String,
    pub timezone: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub revision_id: RevisionId,
    /// UTC, seconds since the Unix epoch.
    pub timestamp: i64,
    /// Item identifier, e.g. "Q42".
    pub item_id: String,
    /// User name, or IP address for unregistered users.
    pub user_id: String,
    /// Whether the user holds an elevated role (rollbacker, admin, ...).
    pub is_privileged: bool,
    pub content_type: ContentType,
    /// Full revision comment, possibly with a machine-generated prefix
    /// block (see features::comment).
    pub comment: String,
    /// Revision tags (abuse-filter hits, editing tools). May be empty.
    pub tags: Vec<String>,
    pub geo: Option<GeoInfo>,
    pub item_label: Option<String>,
    pub sitelink_title: Option<String>,
    /// Property touched by a statement edit, e.g. "P31". Only BODY edits
    /// may carry one.
    pub property_id: Option<String>,
    pub value_literal: Option<String>,
    pub value_item: Option<String>,
    /// Signed size delta of the edit in bytes.
    pub bytes_changed: i64,
}

/// True when the user identifier is an IP address (dotted-quad IPv4 or
/// colon-hex IPv6), which marks an unregistered editor.
pub fn user_is_anonymous(user_id: &str) -> bool {
    user_id.parse::<std::net::Ipv4Addr>().is_ok() || user_id.parse::<std::net::Ipv6Addr>().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ip_forms_are_anonymous() {
        assert!(user_is_anonymous("192.168.0.1"));
        assert!(user_is_anonymous("2001:db8::1"));
        assert!(!user_is_anonymous("Alice"));
        assert!(!user_is_anonymous("10.0.0"));
        assert!(!user_is_anonymous("300.1.2.3"));
        assert!(!user_is_anonymous(""));
    }

    #[test]
    fn content_type_round_trips() {
        for ct in [ContentType::Head, ContentType::Body] {
            assert_eq!(ContentType::parse(ct.as_str()), Some(ct));
        }
        assert_eq!(ContentType::parse("head"), None);
    }
}
