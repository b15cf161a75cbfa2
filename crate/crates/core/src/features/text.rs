//! Character- and word-level text statistics over comment tails.

use super::lexicon::Lexicons;

/// Letters of the Latin script: ASCII letters plus the Latin-1 supplement
/// letters and the Latin Extended-A/B and Additional blocks.
pub fn is_latin_letter(c: char) -> bool {
    match c {
        'a'..='z' | 'A'..='Z' => true,
        '\u{00C0}'..='\u{00FF}' => c != '\u{00D7}' && c != '\u{00F7}',
        '\u{0100}'..='\u{024F}' => true,
        '\u{1E00}'..='\u{1EFF}' => true,
        _ => false,
    }
}

fn is_bracket(c: char) -> bool {
    matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | '<' | '>')
}

/// Ratios over all characters of the text; the Latin ratios are over
/// letters only and are `None` when the text has no letters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharStats {
    pub lower_ratio: f64,
    pub upper_ratio: f64,
    pub digit_ratio: f64,
    pub punctuation_ratio: f64,
    pub whitespace_ratio: f64,
    pub ascii_ratio: f64,
    pub bracket_ratio: f64,
    pub alphanumeric_ratio: f64,
    pub latin_ratio: Option<f64>,
    pub non_latin_ratio: Option<f64>,
    pub longest_run: u64,
}

/// `None` when the text is empty.
pub fn char_stats(text: &str) -> Option<CharStats> {
    let mut total = 0u64;
    let mut lower = 0u64;
    let mut upper = 0u64;
    let mut digit = 0u64;
    let mut punct = 0u64;
    let mut white = 0u64;
    let mut ascii = 0u64;
    let mut bracket = 0u64;
    let mut alnum = 0u64;
    let mut letters = 0u64;
    let mut latin = 0u64;
    let mut longest_run = 0u64;
    let mut run = 0u64;
    let mut prev: Option<char> = None;
    for c in text.chars() {
        total += 1;
        if c.is_lowercase() {
            lower += 1;
        }
        if c.is_uppercase() {
            upper += 1;
        }
        if c.is_numeric() {
            digit += 1;
        }
        if c.is_ascii_punctuation() {
            punct += 1;
        }
        if c.is_whitespace() {
            white += 1;
        }
        if c.is_ascii() {
            ascii += 1;
        }
        if is_bracket(c) {
            bracket += 1;
        }
        if c.is_alphanumeric() {
            alnum += 1;
        }
        if c.is_alphabetic() {
            letters += 1;
            if is_latin_letter(c) {
                latin += 1;
            }
        }
        run = if prev == Some(c) { run + 1 } else { 1 };
        longest_run = longest_run.max(run);
        prev = Some(c);
    }
    if total == 0 {
        return None;
    }
    let t = total as f64;
    Some(CharStats {
        lower_ratio: lower as f64 / t,
        upper_ratio: upper as f64 / t,
        digit_ratio: digit as f64 / t,
        punctuation_ratio: punct as f64 / t,
        whitespace_ratio: white as f64 / t,
        ascii_ratio: ascii as f64 / t,
        bracket_ratio: bracket as f64 / t,
        alphanumeric_ratio: alnum as f64 / t,
        latin_ratio: (letters > 0).then(|| latin as f64 / letters as f64),
        non_latin_ratio: (letters > 0).then(|| (letters - latin) as f64 / letters as f64),
        longest_run,
    })
}

/// Maximal alphabetic runs, in original case.
pub fn words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphabetic() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(&text[s..i]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordStats {
    /// Lexicon-hit fraction over words; `None` when there are no words.
    pub badword_ratio: Option<f64>,
    pub language_word_ratio: Option<f64>,
    pub contains_language_word: bool,
    pub contains_url: bool,
    pub lower_word_ratio: Option<f64>,
    pub upper_word_ratio: Option<f64>,
    pub longest_word: Option<u64>,
    /// Q-id tokens over whitespace tokens; `None` without whitespace tokens.
    pub qid_proportion: Option<f64>,
    /// "[[" occurrences over whitespace tokens.
    pub link_proportion: Option<f64>,
}

fn is_qid_token(token: &str) -> bool {
    let Some(rest) = token.strip_prefix('Q') else {
        return false;
    };
    !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
}

/// `None` when the text is empty.
pub fn word_stats(text: &str, lexicons: &Lexicons) -> Option<WordStats> {
    if text.is_empty() {
        return None;
    }
    let words = words(text);
    let n = words.len() as f64;
    let mut bad = 0u64;
    let mut lang = 0u64;
    let mut lower = 0u64;
    let mut upper = 0u64;
    let mut longest = 0u64;
    for w in &words {
        let folded = w.to_lowercase();
        if lexicons.is_badword(&folded) {
            bad += 1;
        }
        if lexicons.is_language_word(&folded) {
            lang += 1;
        }
        if w.chars().all(|c| c.is_lowercase()) {
            lower += 1;
        }
        if w.chars().all(|c| c.is_uppercase()) {
            upper += 1;
        }
        longest = longest.max(w.chars().count() as u64);
    }
    let lowered = text.to_lowercase();
    let tokens = text.split_whitespace();
    let mut token_count = 0u64;
    let mut qid_tokens = 0u64;
    for t in tokens {
        token_count += 1;
        if is_qid_token(t) {
            qid_tokens += 1;
        }
    }
    let links = text.matches("[[").count() as u64;
    let has_words = !words.is_empty();
    Some(WordStats {
        badword_ratio: has_words.then(|| bad as f64 / n),
        language_word_ratio: has_words.then(|| lang as f64 / n),
        contains_language_word: lang > 0,
        contains_url: lowered.contains("http://") || lowered.contains("https://"),
        lower_word_ratio: has_words.then(|| lower as f64 / n),
        upper_word_ratio: has_words.then(|| upper as f64 / n),
        longest_word: has_words.then_some(longest),
        qid_proportion: (token_count > 0).then(|| qid_tokens as f64 / token_count as f64),
        link_proportion: (token_count > 0).then(|| links as f64 / token_count as f64),
    })
}

/// Levenshtein distance in unit insert/delete/substitute costs, over
/// Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Normalized similarity: 1 - distance/max(len), case-folded. Two empty
/// strings are identical (1.0).
pub fn similarity(a: &str, b: &str) -> f64 {
    let a = a.to_lowercase();
    let b = b.to_lowercase();
    let la = a.chars().count();
    let lb = b.chars().count();
    let denom = la.max(lb);
    if denom == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / denom as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_stats_all_alphanumeric() {
        let s = char_stats("AAbb12").unwrap();
        assert_eq!(s.alphanumeric_ratio, 1.0);
        assert_eq!(s.upper_ratio, 2.0 / 6.0);
        assert_eq!(s.lower_ratio, 2.0 / 6.0);
        assert_eq!(s.digit_ratio, 2.0 / 6.0);
        assert_eq!(s.latin_ratio, Some(1.0));
        assert_eq!(s.longest_run, 2);
    }

    #[test]
    fn char_stats_no_letters() {
        let s = char_stats("123 !!").unwrap();
        assert_eq!(s.latin_ratio, None);
        assert_eq!(s.non_latin_ratio, None);
        assert_eq!(s.punctuation_ratio, 2.0 / 6.0);
        assert_eq!(s.whitespace_ratio, 1.0 / 6.0);
    }

    #[test]
    fn char_stats_non_latin() {
        let s = char_stats("дом ok").unwrap();
        assert_eq!(s.latin_ratio, Some(2.0 / 5.0));
        assert_eq!(s.non_latin_ratio, Some(3.0 / 5.0));
        assert!(s.ascii_ratio < 1.0);
    }

    #[test]
    fn longest_run_counts_repeats() {
        assert_eq!(char_stats("looool").unwrap().longest_run, 4);
        assert_eq!(char_stats("ab").unwrap().longest_run, 1);
    }

    #[test]
    fn words_are_alphabetic_runs() {
        assert_eq!(words("foo bar42baz!"), vec!["foo", "bar", "baz"]);
        assert_eq!(words("123"), Vec::<&str>::new());
        assert_eq!(words("héllo wörld"), vec!["héllo", "wörld"]);
    }

    #[test]
    fn word_stats_ratios() {
        let lex = Lexicons::default();
        let s = word_stats("This POOP sucks badly", &lex).unwrap();
        // words: This, POOP, sucks, badly
        assert_eq!(s.badword_ratio, Some(0.5));
        assert_eq!(s.upper_word_ratio, Some(0.25));
        assert_eq!(s.lower_word_ratio, Some(0.5));
        assert_eq!(s.longest_word, Some(5));
        assert!(!s.contains_language_word);
        assert!(!s.contains_url);
    }

    #[test]
    fn word_stats_qids_and_links() {
        let lex = Lexicons::default();
        let s = word_stats("added Q42 and [[link]] to Q7x", &lex).unwrap();
        // whitespace tokens: added, Q42, and, [[link]], to, Q7x
        assert_eq!(s.qid_proportion, Some(1.0 / 6.0));
        assert_eq!(s.link_proportion, Some(1.0 / 6.0));
    }

    #[test]
    fn word_stats_without_words() {
        let lex = Lexicons::default();
        let s = word_stats("123 456", &lex).unwrap();
        assert_eq!(s.badword_ratio, None);
        assert_eq!(s.longest_word, None);
        assert_eq!(s.qid_proportion, Some(0.0));
    }

    #[test]
    fn url_detection_is_substring_based() {
        let lex = Lexicons::default();
        assert!(word_stats("see https://example.org", &lex).unwrap().contains_url);
        assert!(word_stats("HTTP://CAPS.example", &lex).unwrap().contains_url);
        assert!(!word_stats("http:/ /broken", &lex).unwrap().contains_url);
    }

    #[test]
    fn edit_distance_known_pairs() {
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("abc", "abc"), 0);
        assert_eq!(edit_distance("flaw", "lawn"), 2);
    }

    #[test]
    fn similarity_matches_hand_value() {
        let s = similarity("kitten", "sitting");
        assert!((s - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
        assert_eq!(similarity("Same", "same"), 1.0);
        assert_eq!(similarity("", ""), 1.0);
    }
}
