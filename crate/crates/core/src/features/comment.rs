//! Structured comment parsing.
//!
//! Machine-generated edit comments carry a leading block of the form
//!
//! ```text
//! /* <action>-<subaction>:<count>|<language>[|<param>] */ <tail>
//! ```
//!
//! e.g. `/* wbsetlabel-set:1|en */ Hello`. The subaction, language, param,
//! and tail may each be absent. Parsing is total: anything that fails the
//! grammar — no block, mangled block, non-integer count — degrades to a
//! comment whose entire text is the tail. An empty tail is reported as
//! absent rather than as an empty string.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedComment {
    pub action: Option<String>,
    pub subaction: Option<String>,
    pub count: Option<u64>,
    pub language: Option<String>,
    pub param: Option<String>,
    pub tail: Option<String>,
}

fn tail_only(comment: &str) -> ParsedComment {
    let trimmed = comment.trim();
    ParsedComment {
        tail: if trimmed.is_empty() { None } else { Some(trimmed.to_string()) },
        ..ParsedComment::default()
    }
}

/// Never fails; malformed inputs come back as tail-only comments.
pub fn parse_comment(comment: &str) -> ParsedComment {
    let s = comment.trim_start();
    let Some(after_open) = s.strip_prefix("/*") else {
        return tail_only(comment);
    };
    let Some(close) = after_open.find("*/") else {
        return tail_only(comment);
    };
    let block = after_open[..close].trim();
    let rest = &after_open[close + 2..];

    // block: name:count|language[|param]
    let Some((name, counted)) = block.split_once(':') else {
        return tail_only(comment);
    };
    if name.is_empty() || name.contains('|') {
        return tail_only(comment);
    }
    let (action, subaction) = match name.split_once('-') {
        Some((a, s)) if !a.is_empty() && !s.is_empty() => (a, Some(s)),
        Some(_) => return tail_only(comment),
        None => (name, None),
    };
    let Some((count_str, lang_and_param)) = counted.split_once('|') else {
        return tail_only(comment);
    };
    let Ok(count) = count_str.parse::<u64>() else {
        return tail_only(comment);
    };
    let (language, param) = match lang_and_param.split_once('|') {
        Some((lang, param)) => (lang, Some(param.to_string())),
        None => (lang_and_param, None),
    };
    let tail = rest.trim();
    ParsedComment {
        action: Some(action.to_string()),
        subaction: subaction.map(|s| s.to_string()),
        count: Some(count),
        language: if language.is_empty() { None } else { Some(language.to_string()) },
        param,
        tail: if tail.is_empty() { None } else { Some(tail.to_string()) },
    }
}

/// Re-serializes a structured comment in canonical form. Inverse of
/// `parse_comment` on grammar-conforming input.
pub fn serialize_comment(c: &ParsedComment) -> String {
    match &c.action {
        None => c.tail.clone().unwrap_or_default(),
        Some(action) => {
            let mut out = String::from("/* ");
            out.push_str(action);
            if let Some(sub) = &c.subaction {
                out.push('-');
                out.push_str(sub);
            }
            out.push(':');
            out.push_str(&c.count.unwrap_or(0).to_string());
            out.push('|');
            if let Some(lang) = &c.language {
                out.push_str(lang);
            }
            if let Some(param) = &c.param {
                out.push('|');
                out.push_str(param);
            }
            out.push_str(" */");
            if let Some(tail) = &c.tail {
                out.push(' ');
                out.push_str(tail);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_form() {
        let c = parse_comment("/* wbsetlabel-set:1|en */ Hello");
        assert_eq!(c.action.as_deref(), Some("wbsetlabel"));
        assert_eq!(c.subaction.as_deref(), Some("set"));
        assert_eq!(c.count, Some(1));
        assert_eq!(c.language.as_deref(), Some("en"));
        assert_eq!(c.param, None);
        assert_eq!(c.tail.as_deref(), Some("Hello"));
    }

    #[test]
    fn empty_language_and_tail() {
        let c = parse_comment("/* wbeditentity-update:0| */");
        assert_eq!(c.action.as_deref(), Some("wbeditentity"));
        assert_eq!(c.subaction.as_deref(), Some("update"));
        assert_eq!(c.count, Some(0));
        assert_eq!(c.language, None);
        assert_eq!(c.tail, None);
    }

    #[test]
    fn param_slot() {
        let c = parse_comment("/* rollback-revert:2||7,8 */ Reverted edits by 1.2.3.4");
        assert_eq!(c.action.as_deref(), Some("rollback"));
        assert_eq!(c.subaction.as_deref(), Some("revert"));
        assert_eq!(c.count, Some(2));
        assert_eq!(c.language, None);
        assert_eq!(c.param.as_deref(), Some("7,8"));
        assert_eq!(c.tail.as_deref(), Some("Reverted edits by 1.2.3.4"));
    }

    #[test]
    fn plain_text_is_tail_only() {
        let c = parse_comment("plain text note");
        assert_eq!(c.action, None);
        assert_eq!(c.tail.as_deref(), Some("plain text note"));
    }

    #[test]
    fn empty_comment_has_no_tail() {
        assert_eq!(parse_comment(""), ParsedComment::default());
        assert_eq!(parse_comment("   "), ParsedComment::default());
    }

    #[test]
    fn degenerate_blocks_fall_back() {
        for s in [
            "/* nocolon */ x",
            "/* bad:count|en */ x",
            "/* :1|en */ x",
            "/* a-:1|en */ x",
            "/* -b:1|en */ x",
            "/* wbsetlabel-set:1 */ x", // missing language slot
            "/* unterminated:1|en x",
            "/* pipe|name:1|en */ x",
        ] {
            let c = parse_comment(s);
            assert_eq!(c.action, None, "{s:?} should not parse");
            assert_eq!(c.tail.as_deref(), Some(s.trim()));
        }
    }

    #[test]
    fn action_without_subaction() {
        let c = parse_comment("/* restore:1|en */ undo");
        assert_eq!(c.action.as_deref(), Some("restore"));
        assert_eq!(c.subaction, None);
    }

    #[test]
    fn serialize_inverts_parse() {
        for s in [
            "/* wbsetlabel-set:1|en */ Hello",
            "/* wbeditentity-update:0| */",
            "/* rollback-revert:2||7,8 */ Reverted edits by 1.2.3.4",
            "/* restore:3|de */ x y z",
            "plain text",
        ] {
            assert_eq!(serialize_comment(&parse_comment(s)), s);
        }
    }
}
