//! Rule-based recognition of act names and of the relation each mention expresses.

mod rules;
mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use rules::{
    compile_rules, RelationRule, RelationRuleSpec, RuleSet, RulesFile, Stratum, StratumSpec, TemplateSpec,
};
pub use template::{Element, Template, YearSlot, MAX_ACT_NAME_TOKENS};

use crate::canonicalize::CanonicalText;
use template::{tokenize, Matcher, Token};

/// Rule id given to mentions no relation rule claims.
pub const DEFAULT_RELATION_RULE: &str = "default-cit";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationType {
    /// The document's own title.
    #[serde(rename = "TIT")]
    Title,
    #[serde(rename = "CIT")]
    Citation,
    #[serde(rename = "AMD")]
    Amendment,
    #[serde(rename = "PRP")]
    PartialRepeal,
    #[serde(rename = "FRP")]
    FullRepeal,
}

impl RelationType {
    pub const ALL: [RelationType; 5] = [
        RelationType::Title,
        RelationType::Citation,
        RelationType::Amendment,
        RelationType::PartialRepeal,
        RelationType::FullRepeal,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RelationType::Title => "TIT",
            RelationType::Citation => "CIT",
            RelationType::Amendment => "AMD",
            RelationType::PartialRepeal => "PRP",
            RelationType::FullRepeal => "FRP",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown relation type {s:?}"))
    }
}

/// An act name found in a document. `span` is a byte range into the
/// canonical text and `surface` is exactly the text it covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntityMention {
    pub doc_id: String,
    pub surface: String,
    pub span: (usize, usize),
    pub year: Option<i32>,
    pub rule_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMention {
    pub doc_id: String,
    pub rtype: RelationType,
    pub target: EntityMention,
    pub event_year: Option<i32>,
    pub rule_id: String,
}

fn mention_from(
    ct: &CanonicalText,
    tokens: &[Token<'_>],
    first: usize,
    last: usize,
    year: Option<i32>,
    rule_id: &str,
) -> EntityMention {
    let span = (tokens[first].start, tokens[last].end);
    EntityMention {
        doc_id: ct.doc_id.clone(),
        surface: ct.text[span.0..span.1].to_string(),
        span,
        year,
        rule_id: rule_id.to_string(),
    }
}

/// Finds act-name mentions using the templates of the strata that apply to
/// `doc_year` plus every relation rule's template. Results are sorted by
/// span; a span found by several templates keeps the first template's id.
pub fn extract_entities(ct: &CanonicalText, doc_year: Option<i32>, rules: &RuleSet) -> Vec<EntityMention> {
    let tokens = tokenize(&ct.text);
    if tokens.is_empty() {
        return Vec::new();
    }
    let mut found: BTreeMap<(usize, usize), EntityMention> = BTreeMap::new();

    let mut run = |template: &Template, keywords: &[Vec<String>]| {
        let matcher = Matcher {
            tokens: &tokens,
            keywords,
            any_phrase_max: rules.any_phrase_max,
            pinned: None,
        };
        for start in 0..tokens.len() {
            matcher.walk(&template.elements, start, None, &mut |cap| {
                let m = mention_from(ct, &tokens, cap.first, cap.last, cap.year, &template.rule_id);
                found.entry(m.span).or_insert(m);
                true
            });
        }
    };

    for stratum in rules.strata_for(doc_year) {
        for template in &stratum.entity_templates {
            run(template, &stratum.keywords);
        }
    }
    for rule in &rules.relation_rules {
        run(&rule.template, &rule.keywords);
    }
    found.into_values().collect()
}

/// Classifies each mention by the first relation rule whose pattern matches
/// with its act name exactly on the mention. Unclaimed mentions are CIT.
pub fn extract_relations(ct: &CanonicalText, mentions: &[EntityMention], rules: &RuleSet) -> Vec<RelationMention> {
    let tokens = tokenize(&ct.text);
    let by_start: BTreeMap<usize, usize> = tokens.iter().enumerate().map(|(i, t)| (t.start, i)).collect();
    let by_end: BTreeMap<usize, usize> = tokens.iter().enumerate().map(|(i, t)| (t.end, i)).collect();

    mentions
        .iter()
        .map(|mention| {
            let range = by_start
                .get(&mention.span.0)
                .zip(by_end.get(&mention.span.1))
                .map(|(&a, &b)| (a, b));
            let claimed = range.and_then(|(first, last)| {
                rules.relation_rules.iter().find(|rule| {
                    let matcher = Matcher {
                        tokens: &tokens,
                        keywords: &rule.keywords,
                        any_phrase_max: rules.any_phrase_max,
                        pinned: Some((first, last)),
                    };
                    let reach = rule.template.max_prefix_tokens(&rule.keywords, rules.any_phrase_max);
                    (first.saturating_sub(reach)..=first)
                        .any(|start| matcher.walk(&rule.template.elements, start, None, &mut |_| false))
                })
            });
            let (rtype, rule_id) = match claimed {
                Some(rule) => (rule.rtype, rule.template.rule_id.as_str()),
                None => (RelationType::Citation, DEFAULT_RELATION_RULE),
            };
            let event_year = match rtype {
                RelationType::Amendment | RelationType::PartialRepeal => mention.year,
                _ => None,
            };
            RelationMention {
                doc_id: mention.doc_id.clone(),
                rtype,
                target: mention.clone(),
                event_year,
                rule_id: rule_id.to_string(),
            }
        })
        .collect()
}
