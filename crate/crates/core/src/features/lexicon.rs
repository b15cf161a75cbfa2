//! Word lists backing the lexical features: bad words, language names,
//! Latin-script language codes, and known privileged user names.
//!
//! Non-empty defaults are compiled in; each list can be replaced from a
//! UTF-8 file with one entry per line (`#` starts a comment line). All
//! matching is on lowercased entries.

use std::collections::HashSet;
use std::path::Path;

const DEFAULT_BADWORDS: &[&str] = &[
    "poop", "stupid", "idiot", "dumb", "sucks", "loser", "crap", "fart",
    "noob", "fool", "ugly", "troll", "spam", "butt", "pee", "wtf",
];

const DEFAULT_LANGUAGE_WORDS: &[&str] = &[
    "english", "german", "french", "spanish", "italian", "russian",
    "japanese", "chinese", "arabic", "dutch", "portuguese", "polish",
    "swedish", "hebrew", "persian", "hindi", "korean", "turkish",
];

const DEFAULT_LATIN_LANGUAGES: &[&str] = &[
    "en", "de", "fr", "es", "it", "nl", "pt", "sv", "pl", "da", "no", "fi",
    "cs", "hu", "ro", "ca", "tr", "id", "vi", "eo", "sk", "sl", "hr", "lt",
    "lv", "et", "sq", "eu", "gl", "ms", "sw",
];

const DEFAULT_PRIVILEGED_USERS: &[&str] = &["admin", "moderator", "steward", "rollbacker"];

#[derive(Debug, Clone)]
pub struct Lexicons {
    badwords: HashSet<String>,
    language_words: HashSet<String>,
    latin_languages: HashSet<String>,
    privileged_users: HashSet<String>,
}

fn to_set(entries: &[&str]) -> HashSet<String> {
    entries.iter().map(|e| e.to_lowercase()).collect()
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons {
            badwords: to_set(DEFAULT_BADWORDS),
            language_words: to_set(DEFAULT_LANGUAGE_WORDS),
            latin_languages: to_set(DEFAULT_LATIN_LANGUAGES),
            privileged_users: to_set(DEFAULT_PRIVILEGED_USERS),
        }
    }
}

fn load_list<P: AsRef<Path>>(path: P) -> std::io::Result<HashSet<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect())
}

impl Lexicons {
    pub fn load_badwords<P: AsRef<Path>>(&mut self, path: P) -> std::io::Result<()> {
        self.badwords = load_list(path)?;
        Ok(())
    }

    pub fn load_language_words<P: AsRef<Path>>(&mut self, path: P) -> std::io::Result<()> {
        self.language_words = load_list(path)?;
        Ok(())
    }

    pub fn load_latin_languages<P: AsRef<Path>>(&mut self, path: P) -> std::io::Result<()> {
        self.latin_languages = load_list(path)?;
        Ok(())
    }

    pub fn load_privileged_users<P: AsRef<Path>>(&mut self, path: P) -> std::io::Result<()> {
        self.privileged_users = load_list(path)?;
        Ok(())
    }

    /// `word` must already be lowercased.
    pub fn is_badword(&self, word: &str) -> bool {
        self.badwords.contains(word)
    }

    /// `word` must already be lowercased.
    pub fn is_language_word(&self, word: &str) -> bool {
        self.language_words.contains(word)
    }

    /// Whether a comment language code denotes a Latin-script language.
    /// Site codes like "enwiki" are reduced to their language part.
    pub fn is_latin_language(&self, code: &str) -> bool {
        let lower = code.to_lowercase();
        let base = lower.strip_suffix("wiki").unwrap_or(&lower);
        self.latin_languages.contains(base)
    }

    pub fn is_privileged_user(&self, user_id: &str) -> bool {
        self.privileged_users.contains(&user_id.to_lowercase())
    }
}
