//! Resolution of noisy act-name mentions against the master title list.
//!
//! [`hybrid_match`] scans the list in order, scoring each title with token
//! Jaccard similarity and Levenshtein distance, and stops at the first title
//! that is either an exact match or shares at least `jaccard_exit` of its
//! tokens. Among the scanned prefix it prefers the closest title by edit
//! distance when that distance is within `edit_threshold`, and otherwise
//! falls back to the best Jaccard score.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{MasterEntry, MasterList};
use crate::error::{Error, Result};
use crate::extract::EntityMention;

/// Unit-cost Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(lc != sc);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

fn token_set(s: &str) -> HashSet<&str> {
    s.split_whitespace().collect()
}

/// Intersection over union of whitespace token sets; two empty strings score 1.
pub fn jaccard_similarity(a: &str, b: &str) -> f64 {
    jaccard_sets(&token_set(a), &token_set(b))
}

fn jaccard_sets(a: &HashSet<&str>, b: &HashSet<&str>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub edit_threshold: usize,
    /// Scan stops at the first title with Jaccard at or above this value.
    /// Values above 1 disable the Jaccard exit.
    pub jaccard_exit: f64,
    /// The Jaccard fallback needs a score strictly above this value.
    pub jaccard_floor: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            edit_threshold: 5,
            jaccard_exit: 0.5,
            jaccard_floor: 0.0,
        }
    }
}

impl MatchConfig {
    /// Full-scan variant: the Jaccard exit can never fire.
    pub const FULL_SCAN_EXIT: f64 = 1.01;

    pub fn validate(&self) -> Result<()> {
        // jaccard_exit may exceed 1 to disable early exit.
        if !(0.0..=1.0).contains(&self.jaccard_floor) || self.jaccard_floor > self.jaccard_exit {
            return Err(Error::Config(format!(
                "need 0 <= jaccard_floor ({}) <= jaccard_exit ({})",
                self.jaccard_floor, self.jaccard_exit
            )));
        }
        if self.jaccard_exit.is_nan() {
            return Err(Error::Config("jaccard_exit is NaN".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMethod {
    ExactEdit,
    Jaccard,
    None,
}

impl MatchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMethod::ExactEdit => "exact_edit",
            MatchMethod::Jaccard => "jaccard",
            MatchMethod::None => "none",
        }
    }
}

/// Outcome of matching one surface string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Index into the master list.
    pub entry: Option<usize>,
    pub method: MatchMethod,
    /// Smallest edit distance seen over the scanned prefix.
    pub edit_dist: usize,
    /// Largest Jaccard score seen over the scanned prefix.
    pub jaccard: f64,
    pub early_exit: bool,
    /// Number of master entries scanned.
    pub scanned: usize,
}

impl Resolution {
    fn unmatched() -> Self {
        Resolution {
            entry: None,
            method: MatchMethod::None,
            edit_dist: 0,
            jaccard: 0.0,
            early_exit: false,
            scanned: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub mention: EntityMention,
    pub entry: Option<MasterEntry>,
    pub method: MatchMethod,
    pub edit_dist: usize,
    pub jaccard: f64,
    pub early_exit: bool,
}

/// Matches one canonical surface string against the master list.
pub fn hybrid_match(surface: &str, master: &MasterList, cfg: &MatchConfig) -> Resolution {
    let entries = master.entries();
    if entries.is_empty() {
        return Resolution::unmatched();
    }
    let query = token_set(surface);
    // (score, index) with first index kept on ties.
    let mut best_jaccard = (f64::NEG_INFINITY, 0usize);
    let mut best_edit = (usize::MAX, 0usize);
    let mut early_exit = false;
    let mut scanned = 0;
    for (j, entry) in entries.iter().enumerate() {
        let title = &entry.canonical_title;
        let m = jaccard_sets(&query, &token_set(title));
        let n = edit_distance(surface, title);
        if m > best_jaccard.0 {
            best_jaccard = (m, j);
        }
        if n < best_edit.0 {
            best_edit = (n, j);
        }
        scanned = j + 1;
        if m >= cfg.jaccard_exit || n == 0 {
            early_exit = true;
            break;
        }
    }
    let (x1, i1) = best_jaccard;
    let (y1, i2) = best_edit;
    let (entry, method) = if y1 <= cfg.edit_threshold {
        (Some(i2), MatchMethod::ExactEdit)
    } else if x1 > cfg.jaccard_floor {
        (Some(i1), MatchMethod::Jaccard)
    } else {
        (None, MatchMethod::None)
    };
    Resolution {
        entry,
        method,
        edit_dist: y1,
        jaccard: x1,
        early_exit,
        scanned,
    }
}

/// Full-scan nearest title by edit distance, accepted within `edit_threshold`.
pub fn edit_only_match(surface: &str, master: &MasterList, edit_threshold: usize) -> Option<usize> {
    let (best, idx) = master
        .entries()
        .iter()
        .enumerate()
        .map(|(j, e)| (edit_distance(surface, &e.canonical_title), j))
        .min()?;
    (best <= edit_threshold).then_some(idx)
}

/// Full-scan best title by Jaccard, accepted strictly above `floor`.
pub fn jaccard_only_match(surface: &str, master: &MasterList, floor: f64) -> Option<usize> {
    let query = token_set(surface);
    let mut best: Option<(f64, usize)> = None;
    for (j, e) in master.entries().iter().enumerate() {
        let m = jaccard_sets(&query, &token_set(&e.canonical_title));
        if best.is_none_or(|(b, _)| m > b) {
            best = Some((m, j));
        }
    }
    best.filter(|&(m, _)| m > floor).map(|(_, j)| j)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub total: usize,
    pub matched: usize,
    pub unmatched: usize,
    pub by_method: BTreeMap<MatchMethod, usize>,
}

/// Matches every mention, preserving order.
pub fn batch_match(
    mentions: &[EntityMention],
    master: &MasterList,
    cfg: &MatchConfig,
) -> (Vec<MatchResult>, MatchSummary) {
    let results: Vec<MatchResult> = mentions
        .par_iter()
        .map(|mention| {
            let r = hybrid_match(&mention.surface, master, cfg);
            MatchResult {
                mention: mention.clone(),
                entry: r.entry.and_then(|i| master.get(i)).cloned(),
                method: r.method,
                edit_dist: r.edit_dist,
                jaccard: r.jaccard,
                early_exit: r.early_exit,
            }
        })
        .collect();
    let mut summary = MatchSummary {
        total: results.len(),
        ..Default::default()
    };
    for r in &results {
        if r.entry.is_some() {
            summary.matched += 1;
        } else {
            summary.unmatched += 1;
        }
        *summary.by_method.entry(r.method).or_default() += 1;
    }
    log::debug!(
        "matched {}/{} mentions ({} unmatched)",
        summary.matched,
        summary.total,
        summary.unmatched
    );
    (results, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance("abc", "abc"), 0);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("", "act"), 3);
        assert_eq!(edit_distance("act", ""), 3);
        assert_eq!(edit_distance("£a", "a"), 1);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard_similarity("trade marks act 2002", "trade marks act 2002"), 1.0);
        assert_eq!(
            jaccard_similarity("trade marks act 2002", "trade marks amendment act 2005"),
            0.5
        );
        assert_eq!(jaccard_similarity("a b", "c d"), 0.0);
        assert_eq!(jaccard_similarity("", ""), 1.0);
        assert_eq!(jaccard_similarity("", "a"), 0.0);
    }

    fn master(titles: &[&str]) -> MasterList {
        MasterList::from_titles(titles).unwrap()
    }

    #[test]
    fn worked_ocr_example_resolves() {
        let m = master(&[
            "marriage act 1908",
            "married women property protection act 1860",
            "married women property act 1884",
        ]);
        let r = hybrid_match("married vomens propertyprotectio act 1860", &m, &MatchConfig::default());
        assert_eq!(r.entry, Some(1));
        assert_eq!(r.method, MatchMethod::ExactEdit);
        assert_eq!(r.edit_dist, 4);
    }

    #[test]
    fn exact_title_exits_early() {
        let m = master(&["a act 1900", "companies act 1993", "zz act 2000"]);
        let r = hybrid_match("companies act 1993", &m, &MatchConfig::default());
        assert_eq!((r.entry, r.edit_dist, r.early_exit, r.scanned), (Some(1), 0, true, 2));
    }

    #[test]
    fn unrelated_text_is_unmatched() {
        let m = master(&["trade marks act 2002"]);
        let r = hybrid_match("zzz qqq", &m, &MatchConfig::default());
        assert_eq!(r.method, MatchMethod::None);
        assert_eq!(r.entry, None);
        assert_eq!(r.jaccard, 0.0);
        assert!(r.edit_dist > 5);
    }

    #[test]
    fn jaccard_fallback_when_edit_too_far() {
        let m = master(&["land transfer act 1885", "native land act 1909"]);
        let r = hybrid_match("lnd trnsfr xct 1885 land", &m, &MatchConfig::default());
        assert_eq!(r.method, MatchMethod::Jaccard);
        assert_eq!(r.entry, Some(0));
    }

    #[test]
    fn empty_master_list() {
        let r = hybrid_match("x act 1900", &MasterList::default(), &MatchConfig::default());
        assert_eq!(r.method, MatchMethod::None);
    }

    #[test]
    fn ties_resolve_to_first_entry() {
        let m = master(&["ab act 1900", "ac act 1900"]);
        let cfg = MatchConfig {
            jaccard_exit: MatchConfig::FULL_SCAN_EXIT,
            ..MatchConfig::default()
        };
        let r = hybrid_match("ax act 1900", &m, &cfg);
        assert_eq!(r.entry, Some(0));
    }

    #[test]
    fn config_validation() {
        assert!(MatchConfig::default().validate().is_ok());
        let bad = MatchConfig {
            jaccard_floor: 0.6,
            ..MatchConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    fn mention(surface: &str) -> EntityMention {
        EntityMention {
            doc_id: "d".into(),
            surface: surface.into(),
            span: (0, surface.len()),
            year: None,
            rule_id: "r".into(),
        }
    }

    #[test]
    fn batch_summary_counts() {
        let m = master(&["trade marks act 2002", "companies act 1993"]);
        let mentions = vec![
            mention("companies act 1993"),
            mention("zzz qqq"),
            mention("trade rnarks act 2002"),
        ];
        let (results, summary) = batch_match(&mentions, &m, &MatchConfig::default());
        assert_eq!(results.len(), 3);
        assert_eq!(summary.matched, 2);
        assert_eq!(summary.unmatched, 1);
        assert_eq!(summary.by_method[&MatchMethod::None], 1);
        assert_eq!(results[1].entry, None);
        assert!(batch_match(&[], &m, &MatchConfig::default()).0.is_empty());
    }

    #[test]
    fn batch_is_deterministic_for_duplicates() {
        let m = master(&["trade marks act 2002", "companies act 1993"]);
        let mentions = vec![mention("compnies act 1993"), mention("compnies act 1993")];
        let (results, _) = batch_match(&mentions, &m, &MatchConfig::default());
        assert_eq!(results[0], results[1]);
    }

    proptest! {
        #[test]
        fn edit_distance_is_a_metric(a in "[a-c ]{0,40}", b in "[a-c ]{0,40}", c in "[a-c ]{0,40}") {
            let ab = edit_distance(&a, &b);
            prop_assert_eq!(ab, edit_distance(&b, &a));
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
        }

        #[test]
        fn jaccard_bounds_and_symmetry(a in "[a-d]{1,2}( [a-d]{1,2}){0,5}", b in "[a-d]{1,2}( [a-d]{1,2}){0,5}") {
            let j = jaccard_similarity(&a, &b);
            prop_assert!((0.0..=1.0).contains(&j));
            prop_assert_eq!(j, jaccard_similarity(&b, &a));
            prop_assert_eq!(j == 1.0, token_set(&a) == token_set(&b));
        }

        #[test]
        fn early_exit_on_exact_implies_zero_distance(idx in 0usize..4, noise in "[a-z]{0,3}") {
            let titles = ["land act 1900", "land transfer act 1885", "police act 1958", "zz act 2000"];
            let m = master(&titles);
            let query = format!("{}{}", titles[idx], noise);
            let r = hybrid_match(&query, &m, &MatchConfig::default());
            if r.early_exit && r.edit_dist == 0 {
                prop_assert_eq!(&m.entries()[r.entry.unwrap()].canonical_title, &query);
            }
        }
    }
}
