//! Error-component estimation and precision/recall for the extraction
//! pipeline.
//!
//! alpha1: wrong matches (false positives). beta1: the same wrong matches
//! seen as lost true entities. beta2: entities missed for lack of a rule.
//! beta3: entities missed because of a numeric typo.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_year, AnnotationSet, MasterList, MissCause};
use crate::error::{Error, Result};
use crate::extract::{EntityMention, RelationMention, RelationType};
use crate::matching::MatchResult;
use crate::synth::{rng_for, year_typo};

pub const DEFAULT_CLUSTERS: usize = 10;
pub const DEFAULT_CLUSTER_SIZE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorComponent {
    pub mean: f64,
    /// Sample standard deviation; missing with fewer than two samples.
    pub std: Option<f64>,
    pub n_samples: usize,
}

impl ErrorComponent {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Precondition("no samples to estimate an error rate from".into()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std =
            (samples.len() > 1).then(|| (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
        Ok(ErrorComponent {
            mean,
            std,
            n_samples: samples.len(),
        })
    }

    /// A point value with no sampling information.
    pub fn exact(mean: f64) -> Self {
        ErrorComponent {
            mean,
            std: None,
            n_samples: 1,
        }
    }

    pub fn std_error(&self) -> Option<f64> {
        self.std.map(|s| s / (self.n_samples as f64).sqrt())
    }
}

/// One sampled entity: what the matcher chose and what it should have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledMatch {
    pub predicted: Option<String>,
    pub truth: String,
}

impl LabelledMatch {
    pub fn is_correct(&self) -> bool {
        self.predicted.as_deref() == Some(self.truth.as_str())
    }
}

/// Per-cluster incorrect-match rate. Returns (alpha1, beta1), which are the
/// same estimate by construction.
pub fn estimate_match_errors(clusters: &[Vec<LabelledMatch>]) -> Result<(ErrorComponent, ErrorComponent)> {
    let mut rates = Vec::with_capacity(clusters.len());
    for (i, cluster) in clusters.iter().enumerate() {
        if cluster.is_empty() {
            log::warn!("match cluster {i} is empty; excluded");
            continue;
        }
        let wrong = cluster.iter().filter(|m| !m.is_correct()).count();
        rates.push(wrong as f64 / cluster.len() as f64);
    }
    let alpha1 = ErrorComponent::from_samples(&rates)?;
    Ok((alpha1, alpha1))
}

/// Draws `clusters` independent samples of up to `size` entities each
/// (without replacement within a cluster). Cluster `i` uses stream `i`.
pub fn cluster_sample<T: Clone>(pool: &[T], clusters: usize, size: usize, seed: u64) -> Vec<Vec<T>> {
    let size = size.min(pool.len());
    (0..clusters)
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), size).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| pool[i].clone()).collect()
        })
        .collect()
}

/// Everything the evaluator needs about one annotated document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentEvaluation {
    pub annotations: AnnotationSet,
    pub mentions: Vec<EntityMention>,
    pub matches: Vec<MatchResult>,
    pub relations: Vec<RelationMention>,
}

/// A token that should be a year but carries a misread digit, e.g. "l987".
pub fn is_numeric_typo(token: &str) -> bool {
    let chars: Vec<char> = token.chars().collect();
    chars.len() == 4
        && parse_year(token).is_none()
        && chars.iter().filter(|c| c.is_ascii_digit()).count() >= 2
        && chars.iter().all(|c| c.is_ascii_alphanumeric())
}

/// Why a true entity was missed: an explicit annotation wins, otherwise a
/// numeric typo in its surface marks a typo miss and anything else a rule miss.
fn miss_cause(ann: &AnnotationSet, surface: &str, canonical: &str) -> MissCause {
    if let Some(m) = ann.misses.iter().find(|m| m.canonical == canonical) {
        return m.cause;
    }
    if surface.split_whitespace().any(is_numeric_typo) {
        MissCause::Typo
    } else {
        MissCause::Rule
    }
}

/// Result of aligning one document's annotations with its extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub true_entities: usize,
    pub extracted: usize,
    /// (annotation index, mention index) pairs with equal surfaces.
    pub pairs: Vec<(usize, usize)>,
    pub rule_misses: usize,
    pub typo_misses: usize,
}

/// Multiset alignment on surface strings: the k-th annotated occurrence of
/// a surface pairs with the k-th extracted mention of it.
pub fn align(doc: &DocumentEvaluation) -> Alignment {
    let mut available: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, m) in doc.mentions.iter().enumerate().rev() {
        available.entry(m.surface.as_str()).or_default().push(i);
    }
    let mut out = Alignment {
        true_entities: doc.annotations.entities.len(),
        extracted: doc.mentions.len(),
        ..Default::default()
    };
    for (a, e) in doc.annotations.entities.iter().enumerate() {
        match available.get_mut(e.surface.as_str()).and_then(Vec::pop) {
            Some(mi) => out.pairs.push((a, mi)),
            None => match miss_cause(&doc.annotations, &e.surface, &e.canonical) {
                MissCause::Rule => out.rule_misses += 1,
                MissCause::Typo => out.typo_misses += 1,
            },
        }
    }
    out
}

/// Per-document rule-miss and typo-miss rates. Returns (beta2, beta3).
pub fn estimate_extraction_errors(
    docs: &[DocumentEvaluation],
    master: &MasterList,
) -> Result<(ErrorComponent, ErrorComponent)> {
    let mut rule = Vec::new();
    let mut typo = Vec::new();
    for doc in docs {
        doc.annotations.validate(master)?;
        let al = align(doc);
        if al.true_entities == 0 {
            log::warn!("{}: no annotated entities; excluded", doc.annotations.doc_id);
            continue;
        }
        rule.push(al.rule_misses as f64 / al.true_entities as f64);
        typo.push(al.typo_misses as f64 / al.true_entities as f64);
    }
    Ok((
        ErrorComponent::from_samples(&rule)?,
        ErrorComponent::from_samples(&typo)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimates {
    pub alpha1: ErrorComponent,
    pub beta1: ErrorComponent,
    pub beta2: ErrorComponent,
    pub beta3: ErrorComponent,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_std: Option<f64>,
    /// Square root of the summed component variances, when all are known.
    pub beta_std: Option<f64>,
}

pub fn combine_errors(
    alpha1: ErrorComponent,
    beta1: ErrorComponent,
    beta2: ErrorComponent,
    beta3: ErrorComponent,
) -> Result<ErrorEstimates> {
    for (name, c) in [("alpha1", alpha1), ("beta1", beta1), ("beta2", beta2), ("beta3", beta3)] {
        if !(0.0..=1.0).contains(&c.mean) {
            return Err(Error::Integrity(format!("{name} = {} is not a rate in [0, 1]", c.mean)));
        }
    }
    let beta = beta1.mean + beta2.mean + beta3.mean;
    if beta > 1.0 {
        return Err(Error::Integrity(format!("false-negative rates sum to {beta} > 1")));
    }
    let beta_std = match (beta1.std, beta2.std, beta3.std) {
        (Some(a), Some(b), Some(c)) => Some((a * a + b * b + c * c).sqrt()),
        _ => None,
    };
    Ok(ErrorEstimates {
        alpha1,
        beta1,
        beta2,
        beta3,
        alpha: alpha1.mean,
        beta,
        alpha_std: alpha1.std,
        beta_std,
    })
}

/// Precision (1 - a - b) / (1 - b) and recall (1 - a - b) / (1 - a).
pub fn precision_recall(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0) {
        return Err(Error::Precondition(format!(
            "precision/recall need non-negative alpha and beta with alpha + beta < 1, got {alpha} and {beta}"
        )));
    }
    let tp = 1.0 - alpha - beta;
    Ok((tp / (1.0 - beta), tp / (1.0 - alpha)))
}

/// Counts taken directly from the alignment, without the error model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DirectCounts {
    pub true_entities: usize,
    pub extracted: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub true_relations: usize,
    pub extracted_relations: usize,
    pub correct_relations: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

fn matched_title(doc: &DocumentEvaluation, mention: &EntityMention) -> Option<String> {
    doc.matches
        .iter()
        .find(|m| m.mention.span == mention.span)
        .and_then(|m| m.entry.as_ref())
        .map(|e| e.canonical_title.clone())
}

/// Entity-level precision and recall, plus typed-relation counts.
pub fn direct_counts(docs: &[DocumentEvaluation]) -> DirectCounts {
    let mut c = DirectCounts::default();
    for doc in docs {
        let al = align(doc);
        c.true_entities += al.true_entities;
        c.extracted += al.extracted;
        c.correct += al
            .pairs
            .iter()
            .filter(|&&(a, m)| {
                matched_title(doc, &doc.mentions[m]).as_deref() == Some(doc.annotations.entities[a].canonical.as_str())
            })
            .count();

        let mut truth: HashMap<(RelationType, String), usize> = HashMap::new();
        for r in &doc.annotations.relations {
            *truth.entry((r.rtype, r.target.clone())).or_default() += 1;
        }
        c.true_relations += doc.annotations.relations.len();
        c.extracted_relations += doc.relations.len();
        for r in &doc.relations {
            let Some(title) = matched_title(doc, &r.target) else {
                continue;
            };
            if let Some(left) = truth.get_mut(&(r.rtype, title)) {
                if *left > 0 {
                    *left -= 1;
                    c.correct_relations += 1;
                }
            }
        }
    }
    c.precision = ratio(c.correct, c.extracted);
    c.recall = ratio(c.correct, c.true_entities);
    c
}

/// Labelled matches for every aligned (annotation, mention) pair.
pub fn labelled_matches(docs: &[DocumentEvaluation]) -> Vec<LabelledMatch> {
    let mut out = Vec::new();
    for doc in docs {
        for (a, m) in align(doc).pairs {
            out.push(LabelledMatch {
                predicted: matched_title(doc, &doc.mentions[m]),
                truth: doc.annotations.entities[a].canonical.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub documents: usize,
    pub clusters: usize,
    pub cluster_size: usize,
    pub seed: u64,
    pub estimates: ErrorEstimates,
    pub precision: f64,
    pub recall: f64,
    pub direct: DirectCounts,
}

/// Full evaluation: cluster-sampled match errors, per-document extraction
/// errors, their combination and the resulting precision and recall.
pub fn evaluate(
    docs: &[DocumentEvaluation],
    master: &MasterList,
    clusters: usize,
    cluster_size: usize,
    seed: u64,
) -> Result<EvalReport> {
    let (beta2, beta3) = estimate_extraction_errors(docs, master)?;
    let pool = labelled_matches(docs);
    let (alpha1, beta1) = if pool.is_empty() {
        log::warn!("no extracted entity aligns with an annotation; match errors taken as 0");
        (ErrorComponent::exact(0.0), ErrorComponent::exact(0.0))
    } else {
        estimate_match_errors(&cluster_sample(&pool, clusters, cluster_size, seed))?
    };
    let estimates = combine_errors(alpha1, beta1, beta2, beta3)?;
    let (precision, recall) = precision_recall(estimates.alpha, estimates.beta)?;
    Ok(EvalReport {
        documents: docs.len(),
        clusters,
        cluster_size: cluster_size.min(pool.len()),
        seed,
        estimates,
        precision,
        recall,
        direct: direct_counts(docs),
    })
}

/// Two rows (mean, standard deviation) by component, as in an error table.
pub fn error_table_csv(e: &ErrorEstimates) -> String {
    let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "NA".into());
    let mut out = String::from("measure,alpha1,beta1,beta2,beta3,alpha,beta\n");
    let _ = writeln!(
        out,
        "mu,{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
        e.alpha1.mean, e.beta1.mean, e.beta2.mean, e.beta3.mean, e.alpha, e.beta
    );
    let _ = writeln!(
        out,
        "sigma,{},{},{},{},{},{}",
        f(e.alpha1.std),
        f(e.beta1.std),
        f(e.beta2.std),
        f(e.beta3.std),
        f(e.alpha_std),
        f(e.beta_std)
    );
    out
}

/// Byte offsets of whole-word occurrences of `needle` in `text`, left to
/// right and non-overlapping.
fn word_occurrences(text: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(pos) = text[from..].find(needle) {
        let start = from + pos;
        let end = start + needle.len();
        let before_ok = text[..start].chars().next_back().is_none_or(|c| c == ' ');
        let after_ok = text[end..].chars().next().is_none_or(|c| c == ' ');
        if before_ok && after_ok {
            out.push(start);
            from = end;
        } else {
            from = start + 1;
        }
    }
    out
}

/// Replaces the year of each annotated entity occurrence in canonical text
/// with an OCR-style misreading, independently with probability `rate`.
/// Returns the new text, the updated annotations and the number injected.
pub fn inject_year_typos(
    text: &str,
    ann: &AnnotationSet,
    rate: f64,
    seed: u64,
    stream: u64,
) -> (String, AnnotationSet, usize) {
    use rand::Rng;
    let mut rng = rng_for(seed, stream);
    let mut ann = ann.clone();
    // Occurrence k of a surface in the text belongs to the k-th annotation with it.
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    for e in ann.entities.iter_mut() {
        let k = seen.entry(e.surface.clone()).or_default();
        let occ = word_occurrences(text, &e.surface);
        let Some(&start) = occ.get(*k) else { continue };
        *k += 1;
        if !rng.gen_bool(rate) {
            continue;
        }
        let Some(year_at) = e
            .surface
            .rfind(' ')
            .map(|i| i + 1)
            .filter(|&i| parse_year(&e.surface[i..]).is_some())
        else {
            continue;
        };
        let typo = year_typo(&e.surface[year_at..], &mut rng);
        edits.push((start + year_at, start + e.surface.len(), typo.clone()));
        e.surface = format!("{}{typo}", &e.surface[..year_at]);
    }
    edits.sort();
    let mut out = text.to_string();
    for (s, e, rep) in edits.iter().rev() {
        out.replace_range(*s..*e, rep);
    }
    let n = edits.len();
    (out, ann, n)
}
