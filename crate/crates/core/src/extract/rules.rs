use std::path::Path;

use serde::{Deserialize, Serialize};

use super::template::{Template, DEFAULT_ANY_PHRASE_MAX};
use super::RelationType;
use crate::corpus::{MAX_YEAR, MIN_YEAR};
use crate::error::{Error, Result};

const BUNDLED_RULES: &str = include_str!("../../data/rules.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub rule_id: String,
    pub pattern: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    #[serde(default)]
    pub label: String,
    pub year_lo: i32,
    pub year_hi: i32,
    pub keywords: Vec<String>,
    pub entity_templates: Vec<TemplateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRuleSpec {
    pub rule_id: String,
    #[serde(rename = "type")]
    pub rtype: RelationType,
    pub pattern: String,
    #[serde(default)]
    pub keywords: Vec<String>,
}

/// On-disk form of a rules file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesFile {
    #[serde(default)]
    pub any_phrase_max: Option<usize>,
    pub strata: Vec<StratumSpec>,
    #[serde(default)]
    pub relation_rules: Vec<RelationRuleSpec>,
}

/// A commencement-year band with its own keywords and entity templates.
/// Both year bounds are inclusive.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub label: String,
    pub year_lo: i32,
    pub year_hi: i32,
    pub keywords: Vec<Vec<String>>,
    pub entity_templates: Vec<Template>,
}

impl Stratum {
    pub fn contains(&self, year: i32) -> bool {
        (self.year_lo..=self.year_hi).contains(&year)
    }
}

#[derive(Debug, Clone)]
pub struct RelationRule {
    pub rtype: RelationType,
    pub keywords: Vec<Vec<String>>,
    pub template: Template,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub strata: Vec<Stratum>,
    pub relation_rules: Vec<RelationRule>,
    pub any_phrase_max: usize,
}

fn keyword_tokens(keywords: &[String]) -> Vec<Vec<String>> {
    keywords
        .iter()
        .map(|k| {
            k.to_lowercase()
                .split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .filter(|k| !k.is_empty())
        .collect()
}

impl RuleSet {
    pub fn from_file_spec(spec: RulesFile) -> Result<Self> {
        let mut seen_ids = std::collections::HashSet::new();
        let mut check_id = |id: &str| -> Result<()> {
            if !seen_ids.insert(id.to_string()) {
                return Err(Error::Rule {
                    rule_id: id.to_string(),
                    reason: "duplicate rule_id".into(),
                });
            }
            Ok(())
        };

        let mut strata = Vec::with_capacity(spec.strata.len());
        for s in spec.strata {
            let label = if s.label.is_empty() {
                format!("{}-{}", s.year_lo, s.year_hi)
            } else {
                s.label
            };
            if s.year_lo >= s.year_hi {
                return Err(Error::RuleSet(format!(
                    "stratum {label}: year_lo {} must be below year_hi {}",
                    s.year_lo, s.year_hi
                )));
            }
            if s.entity_templates.is_empty() {
                return Err(Error::RuleSet(format!("stratum {label} has no entity templates")));
            }
            let keywords = keyword_tokens(&s.keywords);
            let mut templates = Vec::new();
            for t in s.entity_templates {
                check_id(&t.rule_id)?;
                let template = Template::parse(&t.rule_id, &t.pattern)?;
                if template.uses_keywords() && keywords.is_empty() {
                    return Err(Error::Rule {
                        rule_id: t.rule_id,
                        reason: format!("uses [keyword] but stratum {label} has no keywords"),
                    });
                }
                templates.push(template);
            }
            strata.push(Stratum {
                label,
                year_lo: s.year_lo,
                year_hi: s.year_hi,
                keywords,
                entity_templates: templates,
            });
        }
        validate_coverage(&mut strata)?;

        let mut relation_rules = Vec::new();
        for r in spec.relation_rules {
            check_id(&r.rule_id)?;
            let template = Template::parse(&r.rule_id, &r.pattern)?;
            let keywords = keyword_tokens(&r.keywords);
            if template.uses_keywords() && keywords.is_empty() {
                return Err(Error::Rule {
                    rule_id: r.rule_id,
                    reason: "uses [keyword] but lists no keywords".into(),
                });
            }
            relation_rules.push(RelationRule {
                rtype: r.rtype,
                keywords,
                template,
            });
        }
        if relation_rules.is_empty() {
            log::warn!("rule set has no relation rules; every mention will be classified as CIT");
        }
        Ok(RuleSet {
            strata,
            relation_rules,
            any_phrase_max: spec.any_phrase_max.unwrap_or(DEFAULT_ANY_PHRASE_MAX),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RulesFile =
            serde_json::from_str(text).map_err(|e| Error::RuleSet(format!("cannot parse rules: {e}")))?;
        Self::from_file_spec(spec)
    }

    /// The default rules shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_RULES).expect("bundled rules are valid")
    }

    pub fn bundled_json() -> &'static str {
        BUNDLED_RULES
    }

    pub fn relation_extraction_enabled(&self) -> bool {
        !self.relation_rules.is_empty()
    }

    /// Strata applying to a document year; all strata when the year is unknown.
    pub fn strata_for(&self, year: Option<i32>) -> Vec<&Stratum> {
        match year {
            Some(y) => self.strata.iter().filter(|s| s.contains(y)).collect(),
            None => self.strata.iter().collect(),
        }
    }
}

/// Strata must be disjoint and together cover every supported year.
fn validate_coverage(strata: &mut [Stratum]) -> Result<()> {
    if strata.is_empty() {
        return Err(Error::RuleSet("no strata defined".into()));
    }
    strata.sort_by_key(|s| s.year_lo);
    for pair in strata.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.year_lo <= a.year_hi {
            return Err(Error::RuleSet(format!(
                "overlapping strata {} and {}",
                a.label, b.label
            )));
        }
        if b.year_lo != a.year_hi + 1 {
            return Err(Error::RuleSet(format!(
                "gap between strata {} and {} (years {}..{})",
                a.label,
                b.label,
                a.year_hi + 1,
                b.year_lo - 1
            )));
        }
    }
    let first = &strata[0];
    let last = &strata[strata.len() - 1];
    if first.year_lo > MIN_YEAR || last.year_hi < MAX_YEAR {
        return Err(Error::RuleSet(format!(
            "strata cover {}..={} but must cover {MIN_YEAR}..={MAX_YEAR}",
            first.year_lo, last.year_hi
        )));
    }
    Ok(())
}

/// Reads and validates a rules file.
pub fn compile_rules(path: &Path) -> Result<RuleSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: RulesFile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    RuleSet::from_file_spec(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(strata: &str, relations: &str) -> String {
        format!(r#"{{"strata": [{strata}], "relation_rules": [{relations}]}}"#)
    }

    const WHOLE_RANGE: &str = r#"{"year_lo": 1200, "year_hi": 2100, "keywords": ["act"],
        "entity_templates": [{"rule_id": "e1", "pattern": "this [keyword] is the [act name] [year]"}]}"#;

    #[test]
    fn bundled_rules_have_five_strata() {
        let rules = RuleSet::bundled();
        assert_eq!(rules.strata.len(), 5);
        assert!(rules.relation_extraction_enabled());
        let kinds: std::collections::BTreeSet<_> = rules.relation_rules.iter().map(|r| r.rtype).collect();
        assert_eq!(kinds.len(), 5);
    }

    #[test]
    fn unknown_placeholder_names_rule() {
        let bad = minimal(
            r#"{"year_lo": 1200, "year_hi": 2100, "keywords": [],
                "entity_templates": [{"rule_id": "weird-rule", "pattern": "the [foo] [act name]"}]}"#,
            "",
        );
        let err = RuleSet::from_json(&bad).unwrap_err();
        assert!(matches!(err, Error::Rule { ref rule_id, .. } if rule_id == "weird-rule"));
    }

    #[test]
    fn empty_relation_rules_are_allowed() {
        let rules = RuleSet::from_json(&minimal(WHOLE_RANGE, "")).unwrap();
        assert!(!rules.relation_extraction_enabled());
    }

    #[test]
    fn overlapping_strata_rejected() {
        let strata = r#"
            {"year_lo": 1200, "year_hi": 1900, "keywords": ["act"],
             "entity_templates": [{"rule_id": "a", "pattern": "the [act name]"}]},
            {"year_lo": 1850, "year_hi": 2100, "keywords": ["act"],
             "entity_templates": [{"rule_id": "b", "pattern": "the [act name]"}]}"#;
        let err = RuleSet::from_json(&minimal(strata, "")).unwrap_err();
        assert!(err.to_string().contains("overlapping"));
    }

    #[test]
    fn uncovered_years_rejected() {
        let strata = r#"{"year_lo": 1800, "year_hi": 2100, "keywords": [],
             "entity_templates": [{"rule_id": "a", "pattern": "the [act name]"}]}"#;
        assert!(RuleSet::from_json(&minimal(strata, "")).is_err());
    }

    #[test]
    fn keyword_placeholder_needs_keywords() {
        let rel = r#"{"rule_id": "r", "type": "CIT", "pattern": "[keyword] of the [act name]"}"#;
        assert!(RuleSet::from_json(&minimal(WHOLE_RANGE, rel)).is_err());
    }

    #[test]
    fn strata_lookup_by_year() {
        let rules = RuleSet::bundled();
        assert_eq!(rules.strata_for(Some(1873)).len(), 1);
        assert_eq!(rules.strata_for(Some(1873))[0].year_lo, 1850);
        assert_eq!(rules.strata_for(None).len(), 5);
    }
}
