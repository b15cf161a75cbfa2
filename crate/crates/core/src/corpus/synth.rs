//! Deterministic synthetic corpus generator.
//!
//! The generator emits a realistic-looking edit stream with known labels:
//! users arrive in sessions (consecutive edits by one user on one item),
//! a configurable fraction of sessions are vandalism, and every vandalism
//! session is reverted by a privileged rollback revision that appears
//! within `rollback_delay_max` stream positions of the vandalism. The
//! rollback's comment block encodes the reverted revision ids, so labels
//! can be reconstructed from the stream itself.
//!
//! Signal design, so that detectors have something to learn:
//! - vandalism comments carry bad words with `badword_inject_prob` (HEAD
//!   edits at full strength, BODY edits attenuated) and gibberish
//!   (character runs, all-caps words, punctuation bursts);
//! - vandalism revisions carry an abuse-filter tag with
//!   `tag_inject_prob`; regular revisions instead carry tool tags at a
//!   fixed low rate plus a tiny abuse-tag false-positive rate;
//! - vandals are mostly unregistered drive-by IPs, with a small pool of
//!   repeat offenders for user-history signal;
//! - regular HEAD comments resemble the item label, vandalism does not.
//!
//! All randomness comes from one seeded SplitMix64 stream consumed in a
//! fixed order, so equal seeds give byte-identical corpora on every
//! platform. Timestamps spread evenly over Oct 2012 – Jun 2016, matching
//! the benchmark's canonical split windows.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::label::label_from_rollbacks;
use super::record::{ContentType, GeoInfo, RevisionId, RevisionRecord};
use super::tsv::{GroundTruth, RollbackEvent};
use super::CorpusError;
use crate::rng::SplitMix64;

/// First timestamp: 2012-10-01T00:00:00Z.
const TIME_START: i64 = 1_349_049_600;
/// One past the last timestamp: 2016-07-01T00:00:00Z.
const TIME_END: i64 = 1_467_331_200;

/// Chance that a new regular session reuses the previous session's item.
const ITEM_STICKINESS: f64 = 0.15;
/// Regular revisions carry an editing-tool tag at this rate.
const TOOL_TAG_RATE: f64 = 0.15;
/// Abuse filters occasionally fire on good edits.
const ABUSE_TAG_FALSE_POSITIVE: f64 = 0.002;
/// BODY vandalism carries bad words less often than HEAD vandalism.
const BODY_BADWORD_ATTENUATION: f64 = 0.4;
/// Session-level vandalism probability = rate * this, compensating for
/// vandal sessions being shorter than regular ones (so the per-revision
/// rate comes out near the configured value).
const SESSION_RATE_FACTOR: f64 = 1.15;
/// Fraction of vandal sessions by a brand-new IP (the rest come from a
/// small repeat-offender pool or, rarely, a registered account).
const VANDAL_FRESH_IP: f64 = 0.7;
const VANDAL_REGISTERED: f64 = 0.1;
/// Vandal sessions edit HEAD content at this rate (regular sessions use
/// `head_fraction`), giving HEAD a stronger lexical vandalism signal.
const VANDAL_HEAD_FRACTION: f64 = 0.5;

const ABUSE_TAGS: [&str; 3] = ["abuse-blanking", "abuse-badwords", "possible-vandalism"];
const TOOL_TAGS: [&str; 4] = ["oauth-widar", "quickstatements", "wikidata-game", "petscan"];
const ROLLBACK_TAG: &str = "mw-rollback";

const LANGS: [(&str, f64); 12] = [
    ("en", 0.35), ("de", 0.12), ("fr", 0.10), ("es", 0.08), ("it", 0.06),
    ("nl", 0.05), ("ru", 0.07), ("ja", 0.06), ("zh", 0.05), ("ar", 0.03),
    ("he", 0.02), ("fa", 0.01),
];

const NOUNS: [&str; 24] = [
    "river", "mountain", "writer", "village", "album", "painter", "bridge",
    "station", "novel", "engineer", "valley", "castle", "singer", "museum",
    "harbor", "forest", "comet", "island", "poet", "temple", "glacier",
    "archive", "meadow", "lagoon",
];

const ADJECTIVES: [&str; 16] = [
    "northern", "ancient", "small", "famous", "coastal", "historic", "upper",
    "lower", "central", "rural", "modern", "eastern", "western", "quiet",
    "national", "regional",
];

// language names show up in genuine descriptions ("english writer"), which
// is exactly what the language-word lexicon looks for
const DESC_EXTRAS: [&str; 6] = ["english", "german", "french", "spanish", "italian", "russian"];

const BADWORDS: [&str; 8] = ["poop", "stupid", "idiot", "dumb", "sucks", "loser", "crap", "fart"];

const GIBBERISH: [&str; 6] = ["asdf", "qwerty", "lol", "haha", "blah", "zzz"];

const GEO_POOL: [(&str, &str, &str, &str, &str, &str); 8] = [
    ("EU", "DE", "BE", "Berlin", "Berlin", "Europe/Berlin"),
    ("EU", "FR", "IDF", "Paris", "Paris", "Europe/Paris"),
    ("EU", "GB", "ENG", "London", "London", "Europe/London"),
    ("NA", "US", "CA", "Santa Clara", "San Jose", "America/Los_Angeles"),
    ("NA", "US", "NY", "New York", "New York", "America/New_York"),
    ("AS", "JP", "13", "Tokyo", "Tokyo", "Asia/Tokyo"),
    ("AS", "IN", "MH", "Mumbai", "Mumbai", "Asia/Kolkata"),
    ("SA", "BR", "SP", "Sao Paulo", "Sao Paulo", "America/Sao_Paulo"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_revisions: usize,
    /// Size of the registered-user pool.
    pub n_users: usize,
    pub n_items: usize,
    /// Target fraction of revisions that are vandalism.
    pub vandalism_rate: f64,
    /// Fraction of regular sessions made by unregistered (IP) users.
    pub anon_fraction: f64,
    /// Chance a HEAD vandalism comment contains a bad word.
    pub badword_inject_prob: f64,
    /// Chance a vandalism revision carries an abuse-filter tag.
    pub tag_inject_prob: f64,
    /// Fraction of regular sessions that edit HEAD content.
    pub head_fraction: f64,
    /// A rollback lands within this many stream positions of the
    /// vandalism it reverts.
    pub rollback_delay_max: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_revisions: 100_000,
            n_users: 2_000,
            n_items: 5_000,
            vandalism_rate: 0.01,
            anon_fraction: 0.2,
            badword_inject_prob: 0.6,
            tag_inject_prob: 0.4,
            head_fraction: 0.2,
            rollback_delay_max: 8,
            seed: 42,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), CorpusError> {
        let mut problems = Vec::new();
        if self.n_revisions < 10 {
            problems.push("n_revisions must be at least 10".to_string());
        }
        if self.n_users < 4 {
            problems.push("n_users must be at least 4".to_string());
        }
        if self.n_items < 2 {
            problems.push("n_items must be at least 2".to_string());
        }
        for (name, p) in [
            ("vandalism_rate", self.vandalism_rate),
            ("anon_fraction", self.anon_fraction),
            ("badword_inject_prob", self.badword_inject_prob),
            ("tag_inject_prob", self.tag_inject_prob),
            ("head_fraction", self.head_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                problems.push(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.vandalism_rate > 0.5 {
            problems.push("vandalism_rate above 0.5 is not supported".to_string());
        }
        if !(6..=64).contains(&self.rollback_delay_max) {
            problems.push("rollback_delay_max must lie in 6..=64".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CorpusError::InvalidConfig(problems.join("; ")))
        }
    }
}

struct SessionPlan {
    user: String,
    item_idx: usize,
    content: ContentType,
    lang: &'static str,
    vandalism: bool,
    remaining: usize,
    emitted_ids: Vec<RevisionId>,
    bytes_sum: i64,
}

struct PendingRollback {
    item_idx: usize,
    content: ContentType,
    vandal_user: String,
    reverted: Vec<RevisionId>,
    bytes_sum: i64,
}

struct Gen<'a> {
    cfg: &'a SynthConfig,
    rng: SplitMix64,
    item_labels: Vec<String>,
    hot_items: usize,
    moderators: usize,
    offender_pool: Vec<String>,
    anon_pool: Vec<String>,
    geo_by_user: HashMap<String, GeoInfo>,
    properties: Vec<String>,
    property_weights: Vec<f64>,
    records: Vec<RevisionRecord>,
    events: Vec<RollbackEvent>,
    pending: BTreeMap<usize, PendingRollback>,
    booked: HashSet<usize>,
    next_id: RevisionId,
    last_item: Option<usize>,
}

impl<'a> Gen<'a> {
    fn new(cfg: &'a SynthConfig) -> Self {
        let mut rng = SplitMix64::derive(cfg.seed, 0x636f_7270_7573);
        let mut item_labels = Vec::with_capacity(cfg.n_items);
        for _ in 0..cfg.n_items {
            let adj = ADJECTIVES[rng.next_below(ADJECTIVES.len() as u64) as usize];
            let noun = NOUNS[rng.next_below(NOUNS.len() as u64) as usize];
            item_labels.push(format!("{adj} {noun}"));
        }
        let anon_pool: Vec<String> = (0..(cfg.n_users / 4).max(2))
            .map(|_| random_ip(&mut rng))
            .collect();
        let offender_pool: Vec<String> = (0..(cfg.n_users / 100).max(3))
            .map(|_| random_ip(&mut rng))
            .collect();
        let properties: Vec<String> = (1..=60).map(|i| format!("P{i}")).collect();
        let property_weights: Vec<f64> =
            (0..60).map(|rank| 1.0 / (rank as f64 + 3.0)).collect();
        Gen {
            cfg,
            rng,
            item_labels,
            hot_items: (cfg.n_items / 50).max(1),
            moderators: (cfg.n_users / 100).max(2),
            offender_pool,
            anon_pool,
            geo_by_user: HashMap::new(),
            properties,
            property_weights,
            records: Vec::with_capacity(cfg.n_revisions),
            events: Vec::new(),
            pending: BTreeMap::new(),
            booked: HashSet::new(),
            next_id: 1,
            last_item: None,
        }
    }

    fn timestamp(&self, position: usize) -> i64 {
        let span = (TIME_END - TIME_START) as i128;
        TIME_START + ((position as i128 * span) / self.cfg.n_revisions as i128) as i64
    }

    fn take_id(&mut self) -> RevisionId {
        let id = self.next_id;
        self.next_id += 1 + self.rng.next_below(3);
        id
    }

    fn geo_for(&mut self, user: &str) -> GeoInfo {
        if let Some(g) = self.geo_by_user.get(user) {
            return g.clone();
        }
        let (continent, country, region, county, city, timezone) =
            GEO_POOL[self.rng.next_below(GEO_POOL.len() as u64) as usize];
        let geo = GeoInfo {
            continent: continent.to_string(),
            country: country.to_string(),
            region: region.to_string(),
            county: county.to_string(),
            city: city.to_string(),
            timezone: timezone.to_string(),
        };
        self.geo_by_user.insert(user.to_string(), geo.clone());
        geo
    }

    fn pick_lang(&mut self) -> &'static str {
        let weights: Vec<f64> = LANGS.iter().map(|(_, w)| *w).collect();
        LANGS[self.rng.next_weighted(&weights)].0
    }

    fn pick_item(&mut self) -> usize {
        if let Some(prev) = self.last_item {
            if self.rng.next_bool(ITEM_STICKINESS) {
                return prev;
            }
        }
        if self.rng.next_bool(0.2) {
            self.rng.next_below(self.hot_items as u64) as usize
        } else {
            self.rng.next_below(self.cfg.n_items as u64) as usize
        }
    }

    fn pick_regular_user(&mut self) -> String {
        if self.rng.next_bool(self.cfg.anon_fraction) {
            if self.rng.next_bool(0.6) {
                let i = self.rng.next_below(self.anon_pool.len() as u64) as usize;
                self.anon_pool[i].clone()
            } else {
                let ip = random_ip(&mut self.rng);
                ip
            }
        } else if self.rng.next_bool(0.3) {
            // a small core of heavy editors
            let core = (self.cfg.n_users / 20).max(1);
            format!("User_{}", self.rng.next_below(core as u64))
        } else {
            format!("User_{}", self.rng.next_below(self.cfg.n_users as u64))
        }
    }

    fn pick_vandal_user(&mut self) -> String {
        if self.rng.next_bool(VANDAL_REGISTERED) {
            format!("User_{}", self.rng.next_below(self.cfg.n_users as u64))
        } else if self.rng.next_bool(VANDAL_FRESH_IP) {
            random_ip(&mut self.rng)
        } else {
            let i = self.rng.next_below(self.offender_pool.len() as u64) as usize;
            self.offender_pool[i].clone()
        }
    }

    fn phrase(&mut self, words: usize, with_language_word: bool) -> String {
        let mut parts = Vec::with_capacity(words);
        for i in 0..words {
            if i == 0 && with_language_word {
                parts.push(DESC_EXTRAS[self.rng.next_below(DESC_EXTRAS.len() as u64) as usize]);
                continue;
            }
            if self.rng.next_bool(0.4) {
                parts.push(ADJECTIVES[self.rng.next_below(ADJECTIVES.len() as u64) as usize]);
            } else {
                parts.push(NOUNS[self.rng.next_below(NOUNS.len() as u64) as usize]);
            }
        }
        parts.join(" ")
    }

    fn vandal_text(&mut self, head: bool) -> String {
        let badword_prob = if head {
            self.cfg.badword_inject_prob
        } else {
            self.cfg.badword_inject_prob * BODY_BADWORD_ATTENUATION
        };
        let mut parts: Vec<String> = Vec::new();
        match self.rng.next_below(4) {
            0 => {
                // character run: "looooool"
                let base = GIBBERISH[self.rng.next_below(GIBBERISH.len() as u64) as usize];
                let run = self.rng.next_range(4, 12) as usize;
                let c = base.chars().next_back().unwrap();
                parts.push(format!("{base}{}", c.to_string().repeat(run)));
            }
            1 => {
                // shouting
                let word = NOUNS[self.rng.next_below(NOUNS.len() as u64) as usize];
                parts.push(word.to_uppercase());
                parts.push(
                    GIBBERISH[self.rng.next_below(GIBBERISH.len() as u64) as usize].to_uppercase(),
                );
            }
            2 => {
                parts.push("!!!!".to_string());
                parts.push(GIBBERISH[self.rng.next_below(GIBBERISH.len() as u64) as usize].to_string());
            }
            _ => {
                parts.push(self.phrase(2, false));
            }
        }
        if self.rng.next_bool(badword_prob) {
            let bad = BADWORDS[self.rng.next_below(BADWORDS.len() as u64) as usize];
            let at = self.rng.next_below(parts.len() as u64 + 1) as usize;
            parts.insert(at, bad.to_string());
        }
        if self.rng.next_bool(0.08) {
            parts.push("http://spam.example/win".to_string());
        }
        parts.join(" ")
    }

    /// Emits one revision of the running session plan.
    fn emit_session_revision(&mut self, plan: &mut SessionPlan, position: usize) {
        let id = self.take_id();
        let label = self.item_labels[plan.item_idx].clone();
        let head = plan.content == ContentType::Head;
        let anon = super::record::user_is_anonymous(&plan.user);

        let mut tags: Vec<String> = Vec::new();
        if plan.vandalism {
            if self.rng.next_bool(self.cfg.tag_inject_prob) {
                tags.push(ABUSE_TAGS[self.rng.next_below(3) as usize].to_string());
            }
        } else {
            if self.rng.next_bool(TOOL_TAG_RATE) {
                tags.push(TOOL_TAGS[self.rng.next_below(4) as usize].to_string());
            }
            if self.rng.next_bool(ABUSE_TAG_FALSE_POSITIVE) {
                tags.push(ABUSE_TAGS[self.rng.next_below(3) as usize].to_string());
            }
        }

        let mut property_id = None;
        let mut value_literal = None;
        let mut value_item = None;
        let mut sitelink_title = None;
        let comment;
        let bytes_changed;

        if head {
            let (action, sub) = match self.rng.next_weighted(&[0.5, 0.3, 0.2]) {
                0 => ("wbsetlabel", "set"),
                1 => ("wbsetdescription", "set"),
                _ => ("wbsetaliases", "add"),
            };
            let tail = if plan.vandalism {
                self.vandal_text(true)
            } else if action == "wbsetlabel" {
                // close to the item label, sometimes with a small edit
                if self.rng.next_bool(0.3) {
                    format!("{label} {}", NOUNS[self.rng.next_below(NOUNS.len() as u64) as usize])
                } else {
                    label.clone()
                }
            } else {
                let with_lang_word = self.rng.next_bool(0.35);
                self.phrase(3, with_lang_word)
            };
            comment = format!("/* {action}-{sub}:1|{} */ {tail}", plan.lang);
            bytes_changed = if plan.vandalism {
                signed_magnitude(&mut self.rng, 5, 900, 0.3)
            } else {
                signed_magnitude(&mut self.rng, 1, 250, 0.7)
            };
        } else {
            let choice = if plan.vandalism {
                // vandals mess with claims on unusual properties
                if self.rng.next_bool(0.8) { 0 } else { 3 }
            } else {
                self.rng.next_weighted(&[0.35, 0.3, 0.1, 0.15, 0.1])
            };
            let (action, sub) = match choice {
                0 => ("wbcreateclaim", "create"),
                1 => ("wbsetclaim", "update"),
                2 => ("wbremoveclaim", "remove"),
                3 => ("wbsetsitelink", "add"),
                _ => ("wbsetsitelink", "set"),
            };
            let mut lang = plan.lang.to_string();
            let tail_value;
            if action.contains("claim") {
                let pi = if plan.vandalism {
                    self.rng.next_below(self.properties.len() as u64) as usize
                } else {
                    let weights = self.property_weights.clone();
                    self.rng.next_weighted(&weights)
                };
                property_id = Some(self.properties[pi].clone());
                if self.rng.next_bool(0.6) {
                    let q = format!("Q{}", 100 + self.rng.next_below(2 * self.cfg.n_items as u64));
                    tail_value = q.clone();
                    value_item = Some(q);
                } else {
                    let lit = if plan.vandalism && self.rng.next_bool(0.5) {
                        self.vandal_text(false)
                    } else {
                        self.phrase(2, false)
                    };
                    tail_value = lit.clone();
                    value_literal = Some(lit);
                }
            } else {
                lang = format!("{}wiki", plan.lang);
                let title = label.replace(' ', "_");
                tail_value = title.clone();
                sitelink_title = Some(title);
            }
            let tail = if plan.vandalism && self.rng.next_bool(0.5) {
                self.vandal_text(false)
            } else if self.rng.next_bool(0.7) {
                tail_value
            } else {
                String::new()
            };
            comment = if tail.is_empty() {
                format!("/* {action}-{sub}:1|{lang} */")
            } else {
                format!("/* {action}-{sub}:1|{lang} */ {tail}")
            };
            bytes_changed = if plan.vandalism {
                signed_magnitude(&mut self.rng, 5, 900, 0.3)
            } else {
                signed_magnitude(&mut self.rng, 1, 250, 0.7)
            };
        }

        let geo = if anon { Some(self.geo_for(&plan.user)) } else { None };
        let record = RevisionRecord {
            revision_id: id,
            timestamp: self.timestamp(position),
            item_id: format!("Q{}", 100 + plan.item_idx),
            user_id: plan.user.clone(),
            is_privileged: false,
            content_type: plan.content,
            comment,
            tags,
            geo,
            item_label: Some(label),
            sitelink_title,
            property_id,
            value_literal,
            value_item,
            bytes_changed,
        };
        plan.emitted_ids.push(id);
        plan.bytes_sum += bytes_changed;
        plan.remaining -= 1;
        self.records.push(record);
    }

    fn emit_rollback(&mut self, pending: PendingRollback, position: usize) {
        let id = self.take_id();
        let moderator = format!("Moderator_{}", self.rng.next_below(self.moderators as u64));
        let ids: Vec<String> = pending.reverted.iter().map(|i| i.to_string()).collect();
        let comment = format!(
            "/* rollback-revert:{}||{} */ Reverted edits by {}",
            pending.reverted.len(),
            ids.join(","),
            pending.vandal_user
        );
        let record = RevisionRecord {
            revision_id: id,
            timestamp: self.timestamp(position),
            item_id: format!("Q{}", 100 + pending.item_idx),
            user_id: moderator,
            is_privileged: true,
            content_type: pending.content,
            comment,
            tags: vec![ROLLBACK_TAG.to_string()],
            geo: None,
            item_label: Some(self.item_labels[pending.item_idx].clone()),
            sitelink_title: None,
            property_id: None,
            value_literal: None,
            value_item: None,
            bytes_changed: -pending.bytes_sum,
        };
        self.records.push(record);
        self.events.push(RollbackEvent { reverting_id: id, reverted: pending.reverted });
    }

    /// Books the rollback for a finished vandal session at the first free
    /// position that keeps it within `rollback_delay_max` of the session's
    /// first revision.
    fn schedule_rollback(&mut self, plan: SessionPlan, position: usize) {
        let session_len = plan.emitted_ids.len();
        let max_gap = self
            .cfg
            .rollback_delay_max
            .saturating_sub(session_len - 1)
            .max(1);
        let gap = self.rng.next_range(1, max_gap as u64) as usize;
        let mut due = position + gap;
        while self.booked.contains(&due) {
            due += 1;
        }
        self.booked.insert(due);
        self.pending.insert(
            due,
            PendingRollback {
                item_idx: plan.item_idx,
                content: plan.content,
                vandal_user: plan.user,
                reverted: plan.emitted_ids,
                bytes_sum: plan.bytes_sum,
            },
        );
    }

    fn start_session(&mut self, position: usize) -> SessionPlan {
        let n = self.cfg.n_revisions;
        // vandal sessions start only with no rollback pending: then nothing
        // can interrupt them, their revisions occupy consecutive positions,
        // and the scheduled rollback provably lands within the delay bound
        let vandal_allowed =
            position + 3 + self.cfg.rollback_delay_max < n && self.pending.is_empty();
        let vandalism = vandal_allowed
            && self
                .rng
                .next_bool(self.cfg.vandalism_rate * SESSION_RATE_FACTOR);
        let (user, length, content) = if vandalism {
            let user = self.pick_vandal_user();
            let length = 1 + self.rng.next_weighted(&[0.6, 0.25, 0.15]);
            let content = if self.rng.next_bool(VANDAL_HEAD_FRACTION) {
                ContentType::Head
            } else {
                ContentType::Body
            };
            (user, length, content)
        } else {
            let user = self.pick_regular_user();
            let length = 1 + self.rng.next_weighted(&[0.55, 0.2, 0.1, 0.07, 0.05, 0.03]);
            let content = if self.rng.next_bool(self.cfg.head_fraction) {
                ContentType::Head
            } else {
                ContentType::Body
            };
            (user, length, content)
        };
        let item_idx = self.pick_item();
        self.last_item = Some(item_idx);
        let lang = self.pick_lang();
        SessionPlan {
            user,
            item_idx,
            content,
            lang,
            vandalism,
            remaining: length,
            emitted_ids: Vec::new(),
            bytes_sum: 0,
        }
    }

    fn run(mut self) -> (Vec<RevisionRecord>, Vec<RollbackEvent>) {
        let mut current: Option<SessionPlan> = None;
        for position in 0..self.cfg.n_revisions {
            // due rollbacks take priority over everything else
            let due = self.pending.keys().next().copied().filter(|d| *d <= position);
            if let Some(d) = due {
                let pending = self.pending.remove(&d).unwrap();
                self.emit_rollback(pending, position);
                continue;
            }
            let mut plan = match current.take() {
                Some(plan) => plan,
                None => self.start_session(position),
            };
            self.emit_session_revision(&mut plan, position);
            if plan.remaining == 0 {
                if plan.vandalism {
                    self.schedule_rollback(plan, position);
                }
            } else {
                current = Some(plan);
            }
        }
        // anything still booked past the end cannot happen: vandal
        // sessions only start when their rollback provably fits
        debug_assert!(self.pending.is_empty(), "unemitted rollbacks at stream end");
        (self.records, self.events)
    }
}

fn random_ip(rng: &mut SplitMix64) -> String {
    format!(
        "{}.{}.{}.{}",
        1 + rng.next_below(223),
        rng.next_below(256),
        rng.next_below(256),
        1 + rng.next_below(254)
    )
}

fn signed_magnitude(rng: &mut SplitMix64, lo: u64, hi: u64, positive_prob: f64) -> i64 {
    // skew towards small edits: square a uniform draw
    let u = rng.next_f64();
    let magnitude = lo as f64 + (hi - lo) as f64 * u * u;
    let sign = if rng.next_bool(positive_prob) { 1 } else { -1 };
    sign * magnitude.round() as i64
}

/// Generates a corpus with labels and the rollback events behind them.
/// Equal configs produce byte-identical output.
pub fn generate_corpus(
    cfg: &SynthConfig,
) -> Result<(Vec<RevisionRecord>, GroundTruth, Vec<RollbackEvent>), CorpusError> {
    cfg.validate()?;
    let (records, events) = Gen::new(cfg).run();
    let truth = label_from_rollbacks(&records, &events)?;
    Ok((records, truth, events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tsv::write_corpus;

    fn small() -> SynthConfig {
        SynthConfig {
            n_revisions: 2_000,
            n_users: 100,
            n_items: 200,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn equal_seeds_byte_identical() {
        let cfg = small();
        let (a, ta, ea) = generate_corpus(&cfg).unwrap();
        let (b, tb, eb) = generate_corpus(&cfg).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        write_corpus(&a, &mut ba).unwrap();
        write_corpus(&b, &mut bb).unwrap();
        assert_eq!(ba, bb);
        assert_eq!(ta, tb);
        assert_eq!(ea, eb);
    }

    #[test]
    fn different_seeds_differ() {
        let mut outputs = Vec::new();
        for seed in [1, 2, 3] {
            let cfg = SynthConfig { seed, ..small() };
            let (records, _, _) = generate_corpus(&cfg).unwrap();
            let mut buf = Vec::new();
            write_corpus(&records, &mut buf).unwrap();
            outputs.push(buf);
        }
        assert_ne!(outputs[0], outputs[1]);
        assert_ne!(outputs[1], outputs[2]);
        assert_ne!(outputs[0], outputs[2]);
    }

    #[test]
    fn vandalism_rate_near_target() {
        let cfg = small();
        let (records, truth, _) = generate_corpus(&cfg).unwrap();
        assert_eq!(records.len(), cfg.n_revisions);
        let vandalism = truth.vandalism_count() as f64;
        let rate = vandalism / records.len() as f64;
        assert!(rate > 0.003 && rate < 0.03, "rate {rate} far from target");
    }

    #[test]
    fn every_vandalism_reverted_within_delay() {
        let cfg = small();
        let (records, truth, events) = generate_corpus(&cfg).unwrap();
        let position: std::collections::HashMap<RevisionId, usize> = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.revision_id, i))
            .collect();
        let mut reverted_total = 0;
        for e in &events {
            let rollback_pos = position[&e.reverting_id];
            for target in &e.reverted {
                let vandal_pos = position[target];
                assert!(rollback_pos > vandal_pos);
                assert!(
                    rollback_pos - vandal_pos <= cfg.rollback_delay_max,
                    "rollback {} positions after its vandalism",
                    rollback_pos - vandal_pos
                );
                reverted_total += 1;
            }
        }
        assert_eq!(reverted_total, truth.vandalism_count());
        // the reverting revisions themselves are privileged and regular
        for e in &events {
            let r = &records[position[&e.reverting_id]];
            assert!(r.is_privileged);
            assert_eq!(truth.is_vandalism(e.reverting_id), Some(false));
        }
    }

    #[test]
    fn timestamps_cover_split_windows_monotonically() {
        let cfg = small();
        let (records, _, _) = generate_corpus(&cfg).unwrap();
        for pair in records.windows(2) {
            assert!(pair[0].timestamp <= pair[1].timestamp);
            assert!(pair[0].revision_id < pair[1].revision_id);
        }
        assert!(records.first().unwrap().timestamp >= TIME_START);
        assert!(records.last().unwrap().timestamp < TIME_END);
        // the canonical windows all receive revisions
        let manifest = crate::corpus::manifest::DatasetManifest::default_windows();
        let split = crate::corpus::manifest::split_corpus(&records, &manifest).unwrap();
        for (name, ids) in &split.per_split {
            assert!(!ids.is_empty(), "split {name} is empty");
        }
        assert_eq!(split.dropped, 0);
    }

    #[test]
    fn anonymous_users_have_geo_registered_do_not() {
        let cfg = small();
        let (records, _, _) = generate_corpus(&cfg).unwrap();
        let mut anon_seen = false;
        for r in &records {
            let anon = crate::corpus::record::user_is_anonymous(&r.user_id);
            anon_seen |= anon;
            assert_eq!(r.geo.is_some(), anon, "geo mismatch for {}", r.user_id);
        }
        assert!(anon_seen);
    }

    #[test]
    fn serialized_corpus_parses_back() {
        let cfg = SynthConfig { n_revisions: 500, n_users: 30, n_items: 40, ..small() };
        let (records, _, _) = generate_corpus(&cfg).unwrap();
        let mut buf = Vec::new();
        write_corpus(&records, &mut buf).unwrap();
        let back = crate::corpus::tsv::read_corpus(&buf[..]).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn invalid_configs_rejected() {
        for cfg in [
            SynthConfig { vandalism_rate: -0.1, ..small() },
            SynthConfig { badword_inject_prob: 1.5, ..small() },
            SynthConfig { rollback_delay_max: 1, ..small() },
            SynthConfig { n_users: 1, ..small() },
        ] {
            assert!(matches!(
                generate_corpus(&cfg),
                Err(CorpusError::InvalidConfig(_))
            ));
        }
    }
}
