//! Glue for running the stages over a whole corpus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonicalize::{CanonicalText, Canonicalizer};
use crate::corpus::{AnnotationSet, Document, MasterList};
use crate::eval::DocumentEvaluation;
use crate::extract::{extract_entities, extract_relations, EntityMention, RelationMention, RuleSet};
use crate::matching::{batch_match, MatchConfig, MatchResult};
use crate::network::DocumentExtraction;

/// Identity of a document, carried between stages without its text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMeta {
    pub doc_id: String,
    pub title_hint: String,
    pub year: Option<i32>,
}

impl From<&Document> for DocMeta {
    fn from(d: &Document) -> Self {
        DocMeta {
            doc_id: d.doc_id.clone(),
            title_hint: d.title_hint.clone(),
            year: d.year,
        }
    }
}

/// Extraction output for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extracted {
    pub doc_id: String,
    pub title_hint: String,
    pub year: Option<i32>,
    pub mentions: Vec<EntityMention>,
    pub relations: Vec<RelationMention>,
}

pub fn canonicalize_all(docs: &[Document], canon: &Canonicalizer) -> Vec<CanonicalText> {
    docs.par_iter()
        .map(|d| canon.canonicalize(&d.doc_id, &d.body))
        .collect()
}

pub fn extract_one(doc: &DocMeta, ct: &CanonicalText, rules: &RuleSet) -> Extracted {
    let mentions = extract_entities(ct, doc.year, rules);
    let relations = extract_relations(ct, &mentions, rules);
    Extracted {
        doc_id: doc.doc_id.clone(),
        title_hint: doc.title_hint.clone(),
        year: doc.year,
        mentions,
        relations,
    }
}

pub fn extract_all(docs: &[DocMeta], canonical: &[CanonicalText], rules: &RuleSet) -> Vec<Extracted> {
    assert_eq!(docs.len(), canonical.len());
    docs.par_iter()
        .zip(canonical.par_iter())
        .map(|(d, ct)| extract_one(d, ct, rules))
        .collect()
}

/// Matches each document's mentions and packages the result for network building.
pub fn match_all(extracted: &[Extracted], master: &MasterList, cfg: &MatchConfig) -> Vec<DocumentExtraction> {
    extracted
        .iter()
        .map(|e| DocumentExtraction {
            doc_id: e.doc_id.clone(),
            title_hint: e.title_hint.clone(),
            year: e.year,
            relations: e.relations.clone(),
            matches: batch_match(&e.mentions, master, cfg).0,
        })
        .collect()
}

/// Pairs extraction and match output with annotations by doc id. Documents
/// without annotations are left out.
pub fn evaluation_inputs(
    extracted: &[Extracted],
    matched: &[DocumentExtraction],
    annotations: &std::collections::BTreeMap<String, AnnotationSet>,
) -> Vec<DocumentEvaluation> {
    extracted
        .iter()
        .zip(matched)
        .filter_map(|(e, m)| {
            let ann = annotations.get(&e.doc_id)?;
            Some(DocumentEvaluation {
                annotations: ann.clone(),
                mentions: e.mentions.clone(),
                matches: m.matches.clone(),
                relations: e.relations.clone(),
            })
        })
        .collect()
}

pub fn matches_of(docs: &[DocumentExtraction]) -> impl Iterator<Item = &MatchResult> {
    docs.iter().flat_map(|d| d.matches.iter())
}
