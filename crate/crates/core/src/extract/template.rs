//! The rule template language.
//!
//! A template is a sequence of literal words and placeholders:
//! `[keyword]`, `[act name]`, `[year]`, `[date]`, `[any phrase]` and
//! `[any number]`. Matching runs over word tokens of canonical text, where
//! whitespace and parentheses separate tokens.

use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::parse_year;
use crate::error::{Error, Result};

/// Longest act name, in tokens, including the closing "act"/"ordinance".
pub const MAX_ACT_NAME_TOKENS: usize = 12;
/// Default bound on `[any phrase]`.
pub const DEFAULT_ANY_PHRASE_MAX: usize = 40;
const MAX_NUMBER_TOKENS: usize = 8;

const ACT_KEYWORDS: [&str; 2] = ["act", "ordinance"];
const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

static PLACEHOLDER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\[\]]*)\]").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')'
}

pub(crate) fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (is_separator(c), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &text[s..i],
                    start: s,
                    end: i,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &text[s..],
            start: s,
            end: text.len(),
        });
    }
    out
}

/// How an act name treats the year token after "act".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YearSlot {
    /// Taken into the capture when present.
    Optional,
    /// Must follow immediately (`[act name] [year]`).
    Required,
    /// Must follow, possibly after day and month words (`[act name] [date]`).
    Date,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Literal(String),
    Keyword,
    ActName(YearSlot),
    Year,
    Date,
    AnyPhrase,
    AnyNumber,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub rule_id: String,
    pub pattern: String,
    pub elements: Vec<Element>,
}

impl Template {
    pub fn parse(rule_id: &str, pattern: &str) -> Result<Self> {
        let fail = |reason: String| Error::Rule {
            rule_id: rule_id.to_string(),
            reason,
        };
        let mut raw = Vec::new();
        let mut cursor = 0;
        let push_literals = |raw: &mut Vec<Element>, text: &str| -> Result<()> {
            if text.contains('[') || text.contains(']') {
                return Err(fail(format!("unbalanced bracket in {text:?}")));
            }
            for tok in tokenize(&text.to_lowercase()) {
                raw.push(Element::Literal(tok.text.to_string()));
            }
            Ok(())
        };
        for caps in PLACEHOLDER.captures_iter(pattern) {
            let whole = caps.get(0).unwrap();
            push_literals(&mut raw, &pattern[cursor..whole.start()])?;
            let name = caps[1].split_whitespace().collect::<Vec<_>>().join(" ");
            raw.push(match name.to_lowercase().as_str() {
                "keyword" => Element::Keyword,
                "act name" => Element::ActName(YearSlot::Optional),
                "year" => Element::Year,
                "date" => Element::Date,
                "any phrase" => Element::AnyPhrase,
                "any number" => Element::AnyNumber,
                _ => return Err(fail(format!("unknown placeholder [{}]", &caps[1]))),
            });
            cursor = whole.end();
        }
        push_literals(&mut raw, &pattern[cursor..])?;

        let act_names = raw.iter().filter(|e| matches!(e, Element::ActName(_))).count();
        if act_names != 1 {
            return Err(fail(format!(
                "pattern must contain exactly one [act name], found {act_names}"
            )));
        }

        // Fold a year or date that directly follows the act name into it.
        let mut elements = Vec::with_capacity(raw.len());
        let mut iter = raw.into_iter().peekable();
        while let Some(e) = iter.next() {
            if let Element::ActName(_) = e {
                let slot = match iter.peek() {
                    Some(Element::Year) => Some(YearSlot::Required),
                    Some(Element::Date) => Some(YearSlot::Date),
                    _ => None,
                };
                if let Some(slot) = slot {
                    iter.next();
                    elements.push(Element::ActName(slot));
                } else {
                    elements.push(Element::ActName(YearSlot::Optional));
                }
            } else {
                elements.push(e);
            }
        }
        Ok(Template {
            rule_id: rule_id.to_string(),
            pattern: pattern.to_string(),
            elements,
        })
    }

    pub fn uses_keywords(&self) -> bool {
        self.elements.contains(&Element::Keyword)
    }

    /// Upper bound on the number of tokens before the act name.
    pub(crate) fn max_prefix_tokens(&self, keywords: &[Vec<String>], any_phrase_max: usize) -> usize {
        let longest_kw = keywords.iter().map(Vec::len).max().unwrap_or(0);
        self.elements
            .iter()
            .take_while(|e| !matches!(e, Element::ActName(_)))
            .map(|e| match e {
                Element::Literal(_) | Element::Year => 1,
                Element::Keyword => longest_kw,
                Element::Date => 3,
                Element::AnyPhrase => any_phrase_max,
                Element::AnyNumber => MAX_NUMBER_TOKENS,
                Element::ActName(_) => 0,
            })
            .sum()
    }
}

/// Token range (inclusive) and year of an `[act name]` capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Capture {
    pub first: usize,
    pub last: usize,
    pub year: Option<i32>,
}

pub(crate) struct Matcher<'t, 'k> {
    pub tokens: &'t [Token<'t>],
    pub keywords: &'k [Vec<String>],
    pub any_phrase_max: usize,
    /// When set, the act name must capture exactly this token range.
    pub pinned: Option<(usize, usize)>,
}

fn is_day(tok: &str) -> bool {
    let digits = tok.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let suffix = &tok[digits.len()..];
    (1..=2).contains(&digits.len())
        && digits.bytes().all(|b| b.is_ascii_digit())
        && matches!(suffix, "" | "st" | "nd" | "rd" | "th")
}

fn is_number(tok: &str) -> bool {
    tok.as_bytes().first().is_some_and(u8::is_ascii_digit)
}

impl Matcher<'_, '_> {
    /// Calls `emit` for every way `elements` matches starting at token `pos`.
    /// `emit` returns `false` to stop the search; the return value reports
    /// whether the search was stopped.
    pub fn walk(
        &self,
        elements: &[Element],
        pos: usize,
        capture: Option<Capture>,
        emit: &mut dyn FnMut(Capture) -> bool,
    ) -> bool {
        let Some((head, rest)) = elements.split_first() else {
            return match capture {
                Some(c) => !emit(c),
                None => false,
            };
        };
        let tokens = self.tokens;
        let n = tokens.len();
        match head {
            Element::Literal(lit) => pos < n && tokens[pos].text == lit && self.walk(rest, pos + 1, capture, emit),
            Element::Year => {
                pos < n && parse_year(tokens[pos].text).is_some() && self.walk(rest, pos + 1, capture, emit)
            }
            Element::Date => match self.date_at(pos) {
                Some((_, next)) => self.walk(rest, next, capture, emit),
                None => false,
            },
            Element::Keyword => {
                for kw in self.keywords {
                    let end = pos + kw.len();
                    if end <= n
                        && tokens[pos..end].iter().zip(kw).all(|(t, k)| t.text == k)
                        && self.walk(rest, end, capture, emit)
                    {
                        return true;
                    }
                }
                false
            }
            Element::AnyPhrase => {
                for skip in 0..=self.any_phrase_max {
                    if pos + skip > n {
                        break;
                    }
                    if self.walk(rest, pos + skip, capture, emit) {
                        return true;
                    }
                }
                false
            }
            Element::AnyNumber => {
                let run = tokens[pos.min(n)..]
                    .iter()
                    .take(MAX_NUMBER_TOKENS)
                    .take_while(|t| is_number(t.text))
                    .count();
                for len in (1..=run).rev() {
                    if self.walk(rest, pos + len, capture, emit) {
                        return true;
                    }
                }
                false
            }
            Element::ActName(slot) => match self.act_name_at(pos, *slot) {
                Some((cap, next)) => {
                    if let Some(pin) = self.pinned {
                        if (cap.first, cap.last) != pin {
                            return false;
                        }
                    }
                    self.walk(rest, next, Some(cap), emit)
                }
                None => false,
            },
        }
    }

    /// Returns the year and the position after a date starting at `pos`.
    fn date_at(&self, pos: usize) -> Option<(i32, usize)> {
        let tokens = self.tokens;
        let mut p = pos;
        if p < tokens.len() && is_day(tokens[p].text) {
            p += 1;
        }
        if p < tokens.len() && MONTHS.contains(&tokens[p].text) {
            p += 1;
        }
        let year = parse_year(tokens.get(p)?.text)?;
        Some((year, p + 1))
    }

    fn act_name_at(&self, pos: usize, slot: YearSlot) -> Option<(Capture, usize)> {
        let tokens = self.tokens;
        let first = tokens.get(pos)?;
        if !first.text.chars().any(char::is_alphabetic) || ACT_KEYWORDS.contains(&first.text) {
            return None;
        }
        let act =
            (pos + 1..tokens.len().min(pos + MAX_ACT_NAME_TOKENS)).find(|&k| ACT_KEYWORDS.contains(&tokens[k].text))?;
        let following = tokens.get(act + 1).and_then(|t| parse_year(t.text));
        match slot {
            YearSlot::Optional => Some(match following {
                Some(y) => (
                    Capture {
                        first: pos,
                        last: act + 1,
                        year: Some(y),
                    },
                    act + 2,
                ),
                None => (
                    Capture {
                        first: pos,
                        last: act,
                        year: None,
                    },
                    act + 1,
                ),
            }),
            YearSlot::Required => following.map(|y| {
                (
                    Capture {
                        first: pos,
                        last: act + 1,
                        year: Some(y),
                    },
                    act + 2,
                )
            }),
            YearSlot::Date => {
                let (year, next) = self.date_at(act + 1)?;
                let last = if next == act + 2 { act + 1 } else { act };
                Some((
                    Capture {
                        first: pos,
                        last,
                        year: Some(year),
                    },
                    next,
                ))
            }
        }
    }
}
