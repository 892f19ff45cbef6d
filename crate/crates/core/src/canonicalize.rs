//! Normalization of raw OCR text into the form the rule engine consumes.
//!
//! Steps run in a fixed order: lowercase, special characters, margin
//! phrases, keyword typos, whitespace. Parentheses always survive because
//! act titles use them.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::matching::edit_distance;

pub const STEP_LOWERCASE: &str = "lowercase";
pub const STEP_SPECIAL_CHARS: &str = "special_chars";
pub const STEP_MARGIN_PHRASES: &str = "margin_phrases";
pub const STEP_KEYWORD_TYPOS: &str = "keyword_typos";
pub const STEP_WHITESPACE: &str = "whitespace";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalText {
    pub doc_id: String,
    pub text: String,
    pub applied_steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CanonConfig {
    /// Characters replaced by a space.
    pub special_chars: String,
    /// Characters deleted outright, so the letters around them join up
    /// (apostrophes: "vomen's" becomes "vomens").
    pub elided_chars: String,
    /// Treat every other non-alphanumeric, non-space character except
    /// parentheses as special too.
    pub replace_other_symbols: bool,
    pub margin_phrases: Vec<String>,
    /// Maximum edit distance for a margin phrase match; `None` allows one
    /// edit per word of the phrase.
    pub margin_max_edit: Option<usize>,
    /// Token sequences inside which margin phrases are legitimate text and
    /// must not be removed.
    pub protected_contexts: Vec<String>,
    /// Whole-word misspelling to replacement.
    pub keyword_fixes: BTreeMap<String, String>,
}

impl Default for CanonConfig {
    fn default() -> Self {
        let fixes = [
            ("aot", "act"),
            ("a0t", "act"),
            ("acl", "act"),
            ("aet", "act"),
            ("aci", "act"),
            ("aots", "acts"),
            ("acls", "acts"),
            ("ordinanee", "ordinance"),
            ("ordlnance", "ordinance"),
        ];
        CanonConfig {
            special_chars: "!\"#$%&*+,-./:;<=>?@[\\]^_{|}~".to_string(),
            elided_chars: "'`\u{2018}\u{2019}".to_string(),
            replace_other_symbols: true,
            margin_phrases: vec!["short title".to_string()],
            margin_max_edit: None,
            protected_contexts: vec!["short title of this".to_string(), "short title of the".to_string()],
            keyword_fixes: fixes.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl CanonConfig {
    pub fn validate(&self) -> Result<()> {
        for c in self.special_chars.chars().chain(self.elided_chars.chars()) {
            if c == '(' || c == ')' {
                return Err(Error::Config(
                    "parentheses cannot be special or elided characters".into(),
                ));
            }
            if c.is_whitespace() {
                return Err(Error::Config(
                    "whitespace cannot be a special or elided character".into(),
                ));
            }
        }
        for (typo, fix) in &self.keyword_fixes {
            if typo.is_empty() || typo.split_whitespace().count() != 1 {
                return Err(Error::Config(format!("keyword fix {typo:?} must be a single word")));
            }
            if self.keyword_fixes.contains_key(fix) {
                return Err(Error::Config(format!(
                    "keyword fix target {fix:?} is itself listed as a misspelling"
                )));
            }
            if fix.len() > typo.len() {
                return Err(Error::Config(format!(
                    "keyword fix {typo:?} -> {fix:?} would lengthen the text"
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: CanonConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

struct MarginPhrase {
    text: String,
    words: usize,
    max_edit: usize,
}

/// A compiled [`CanonConfig`].
pub struct Canonicalizer {
    cfg: CanonConfig,
    phrases: Vec<MarginPhrase>,
    protected: Vec<Vec<String>>,
    fixes: Option<Regex>,
}

impl Canonicalizer {
    pub fn new(cfg: CanonConfig) -> Result<Self> {
        cfg.validate()?;
        let phrases = cfg
            .margin_phrases
            .iter()
            .map(|p| {
                let text = collapse_whitespace(&p.to_lowercase());
                let words = text.split(' ').count();
                MarginPhrase {
                    max_edit: cfg.margin_max_edit.unwrap_or(words),
                    words,
                    text,
                }
            })
            .filter(|p| !p.text.is_empty())
            .collect();
        let protected = cfg
            .protected_contexts
            .iter()
            .map(|p| p.to_lowercase().split_whitespace().map(str::to_string).collect())
            .filter(|p: &Vec<String>| !p.is_empty())
            .collect();
        let fixes = fix_regex(&cfg.keyword_fixes);
        Ok(Canonicalizer {
            cfg,
            phrases,
            protected,
            fixes,
        })
    }

    pub fn config(&self) -> &CanonConfig {
        &self.cfg
    }

    pub fn canonicalize(&self, doc_id: &str, body: &str) -> CanonicalText {
        let lowered = body.to_lowercase();
        let cleaned = self.replace_special(&lowered);
        // Removing one margin window can join its neighbours into a new
        // match, so repeat until nothing changes.
        let mut text = cleaned;
        loop {
            let next = strip_windows(&text, &self.phrases, &self.protected);
            if next == text {
                break;
            }
            text = next;
        }
        let fixed = match &self.fixes {
            Some(re) => apply_fixes(re, &self.cfg.keyword_fixes, &text),
            None => text,
        };
        CanonicalText {
            doc_id: doc_id.to_string(),
            text: collapse_whitespace(&fixed),
            applied_steps: [
                STEP_LOWERCASE,
                STEP_SPECIAL_CHARS,
                STEP_MARGIN_PHRASES,
                STEP_KEYWORD_TYPOS,
                STEP_WHITESPACE,
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        }
    }

    fn replace_special(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for c in text.chars() {
            if self.cfg.elided_chars.contains(c) {
                continue;
            }
            if self.is_special(c) {
                out.push(' ');
            } else {
                out.push(c);
            }
        }
        out
    }

    /// Whether `c` is stripped by the special-character step.
    pub fn is_special(&self, c: char) -> bool {
        if c == '(' || c == ')' {
            return false;
        }
        self.cfg.special_chars.contains(c)
            || self.cfg.elided_chars.contains(c)
            || (self.cfg.replace_other_symbols && !c.is_alphanumeric() && !c.is_whitespace())
    }
}

pub fn canonicalize_text(doc: &Document, cfg: &CanonConfig) -> Result<CanonicalText> {
    Ok(Canonicalizer::new(cfg.clone())?.canonicalize(&doc.doc_id, &doc.body))
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Deletes every window of whitespace tokens within `max_edit` of one of
/// `phrases`, longest match first, scanning left to right. A window is
/// skipped when dropping its first or last token matches no worse. Adjacent removed
/// windows are removed together with the whitespace between them.
pub fn strip_margin_phrases(text: &str, phrases: &[&str], max_edit: usize) -> String {
    let phrases: Vec<MarginPhrase> = phrases
        .iter()
        .map(|p| {
            let text = collapse_whitespace(p);
            MarginPhrase {
                words: text.split(' ').count(),
                text,
                max_edit,
            }
        })
        .filter(|p| !p.text.is_empty())
        .collect();
    strip_windows(text, &phrases, &[])
}

fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
}

fn strip_windows(text: &str, phrases: &[MarginPhrase], protected: &[Vec<String>]) -> String {
    if phrases.is_empty() {
        return text.to_string();
    }
    let spans = token_spans(text);
    let tokens: Vec<&str> = spans.iter().map(|&(s, e)| &text[s..e]).collect();
    let n = tokens.len();

    let mut locked = vec![false; n];
    for ctx in protected {
        let k = ctx.len();
        if k > n {
            continue;
        }
        for i in 0..=n - k {
            if tokens[i..i + k].iter().zip(ctx).all(|(t, c)| *t == c) {
                locked[i..i + k].iter_mut().for_each(|l| *l = true);
            }
        }
    }

    // Inclusive token ranges to delete.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best: Option<usize> = None;
        for phrase in phrases {
            let widest = phrase.words + 1;
            let narrowest = phrase.words.saturating_sub(1).max(1);
            for w in (narrowest..=widest).rev() {
                if i + w > n || best.is_some_and(|b| b >= w) {
                    continue;
                }
                if locked[i..i + w].iter().any(|&l| l) {
                    continue;
                }
                let dist = edit_distance(&tokens[i..i + w].join(" "), &phrase.text);
                if dist > phrase.max_edit {
                    continue;
                }
                // A window that still matches as well without an edge token
                // would swallow a neighbouring word.
                let loose = w > 1
                    && (edit_distance(&tokens[i + 1..i + w].join(" "), &phrase.text) <= dist
                        || edit_distance(&tokens[i..i + w - 1].join(" "), &phrase.text) <= dist);
                if !loose {
                    best = Some(w);
                    break;
                }
            }
        }
        match best {
            Some(w) => {
                match runs.last_mut() {
                    Some(last) if last.1 + 1 == i => last.1 = i + w - 1,
                    _ => runs.push((i, i + w - 1)),
                }
                i += w;
            }
            None => i += 1,
        }
    }

    if runs.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (first, last) in runs {
        out.push_str(&text[cursor..spans[first].0]);
        cursor = spans[last].1;
    }
    out.push_str(&text[cursor..]);
    out
}

fn fix_regex(fixes: &BTreeMap<String, String>) -> Option<Regex> {
    if fixes.is_empty() {
        return None;
    }
    let mut keys: Vec<&String> = fixes.keys().collect();
    keys.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let alternation = keys.iter().map(|k| regex::escape(k)).collect::<Vec<_>>().join("|");
    Some(Regex::new(&format!(r"\b(?:{alternation})\b")).expect("escaped alternation is a valid regex"))
}

fn apply_fixes(re: &Regex, fixes: &BTreeMap<String, String>, text: &str) -> String {
    re.replace_all(text, |caps: &regex::Captures| fixes[&caps[0]].clone())
        .into_owned()
}

/// Replaces whole-word occurrences of each misspelling with its fix.
pub fn fix_keyword_typos(text: &str, fixes: &BTreeMap<String, String>) -> String {
    match fix_regex(fixes) {
        Some(re) => apply_fixes(&re, fixes, text),
        None => text.to_string(),
    }
}
