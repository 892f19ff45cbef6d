//! Corpus loading: documents, the master title list and ground-truth annotations.
//!
//! Documents are plain post-OCR text files. A document's identity and
//! commencement year come from its filename unless a manifest overrides them.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::RelationType;

/// Earliest year accepted anywhere in the pipeline.
pub const MIN_YEAR: i32 = 1200;
/// Latest year accepted anywhere in the pipeline.
pub const MAX_YEAR: i32 = 2100;

/// Parses a token as a calendar year: exactly four ASCII digits within
/// [`MIN_YEAR`, `MAX_YEAR`].
pub fn parse_year(token: &str) -> Option<i32> {
    if token.len() != 4 || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let year: i32 = token.parse().ok()?;
    (MIN_YEAR..=MAX_YEAR).contains(&year).then_some(year)
}

/// The last year-like token of `text`, splitting on anything that is not alphanumeric.
pub fn last_year(text: &str) -> Option<i32> {
    text.rsplit(|c: char| !c.is_alphanumeric()).find_map(parse_year)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub source_path: PathBuf,
    pub title_hint: String,
    pub year: Option<i32>,
    pub body: String,
}

/// Derives `(title_hint, year)` from a corpus filename.
///
/// The hint is the file stem with `_`/`-` turned into spaces, lowercased and
/// whitespace-collapsed. The year is the last in-range four digit token.
pub fn infer_metadata(filename: &str) -> (String, Option<i32>) {
    let name = Path::new(filename)
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or(filename);
    let stem = match name.rfind('.') {
        Some(dot) if dot > 0 => &name[..dot],
        _ => name,
    };
    let spaced: String = stem
        .chars()
        .map(|c| if c == '_' || c == '-' { ' ' } else { c })
        .collect();
    let hint = spaced.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    let year = last_year(&hint);
    (hint, year)
}

/// Result of loading a corpus directory. Per-file problems become warnings.
#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub documents: Vec<Document>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
struct ManifestEntry {
    doc_id: String,
    year: Option<i32>,
}

fn read_manifest(path: &Path, dir: &Path) -> Result<HashMap<PathBuf, ManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    let mut seen_ids: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Manifest {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let doc_id = fields[0].trim().to_string();
        if doc_id.is_empty() {
            return Err(Error::Manifest {
                line: line_no,
                reason: "empty doc_id".into(),
            });
        }
        if let Some(first) = seen_ids.insert(doc_id.clone(), line_no) {
            return Err(Error::Manifest {
                line: line_no,
                reason: format!("doc_id {doc_id:?} already used on line {first}"),
            });
        }
        let year_field = fields[2].trim();
        let year = match year_field {
            "" | "-" | "unknown" => None,
            y => Some(parse_year(y).ok_or_else(|| Error::Manifest {
                line: line_no,
                reason: format!("year {y:?} is not a year in [{MIN_YEAR}, {MAX_YEAR}]"),
            })?),
        };
        let raw = Path::new(fields[1].trim());
        let full = if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            dir.join(raw)
        };
        out.insert(full, ManifestEntry { doc_id, year });
    }
    Ok(out)
}

/// Loads every `.txt` file directly inside `dir`, sorted by path.
///
/// Unreadable or empty files are skipped with a warning. A manifest, when
/// given, overrides the doc id and year of the files it lists.
pub fn load_corpus(dir: &Path, manifest: Option<&Path>) -> Result<CorpusLoad> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("txt") {
            paths.push(path);
        }
    }
    paths.sort();

    let mut overrides = match manifest {
        Some(m) => read_manifest(m, dir)?,
        None => HashMap::new(),
    };

    let loaded: Vec<std::result::Result<Document, String>> = paths
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| format!("{}: skipped: {e}", path.display()))?;
            let body = String::from_utf8_lossy(&bytes).into_owned();
            if body.trim().is_empty() {
                return Err(format!("{}: skipped: empty body", path.display()));
            }
            let filename = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let (title_hint, year) = infer_metadata(filename);
            let doc_id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(filename)
                .to_string();
            Ok(Document {
                doc_id,
                source_path: path.clone(),
                title_hint,
                year,
                body,
            })
        })
        .collect();

    let mut out = CorpusLoad::default();
    let mut ids: HashMap<String, PathBuf> = HashMap::new();
    for item in loaded {
        match item {
            Ok(mut doc) => {
                if let Some(over) = overrides.remove(&doc.source_path) {
                    doc.doc_id = over.doc_id;
                    doc.year = over.year;
                }
                if let Some(prev) = ids.insert(doc.doc_id.clone(), doc.source_path.clone()) {
                    return Err(Error::Integrity(format!(
                        "doc_id {:?} used by both {} and {}",
                        doc.doc_id,
                        prev.display(),
                        doc.source_path.display()
                    )));
                }
                out.documents.push(doc);
            }
            Err(warning) => {
                log::warn!("{warning}");
                out.warnings.push(warning);
            }
        }
    }
    let mut unused: Vec<_> = overrides.into_keys().collect();
    unused.sort();
    for path in unused {
        let warning = format!("manifest entry {} matches no corpus file", path.display());
        log::warn!("{warning}");
        out.warnings.push(warning);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterEntry {
    pub node_id: usize,
    pub canonical_title: String,
    pub year: Option<i32>,
    /// Distinct whitespace tokens of the title, sorted.
    pub tokens: Vec<String>,
}

/// The authoritative ordered title list. Entry order is file order and is
/// significant for matching.
#[derive(Debug, Clone, Default)]
pub struct MasterList {
    entries: Vec<MasterEntry>,
    by_title: HashMap<String, usize>,
    index: HashMap<String, Vec<usize>>,
}

/// Lowercases and collapses whitespace.
pub fn canonical_title(line: &str) -> String {
    line.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

impl MasterList {
    /// Builds a list from titles in order; blank titles are skipped. Line
    /// numbers in errors are 1-based positions in `titles`.
    pub fn from_titles<I, S>(titles: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list = MasterList::default();
        let mut first_line: HashMap<String, usize> = HashMap::new();
        for (i, raw) in titles.into_iter().enumerate() {
            let title = canonical_title(raw.as_ref());
            if title.is_empty() {
                continue;
            }
            if let Some(&first) = first_line.get(&title) {
                return Err(Error::DuplicateTitle {
                    line: i + 1,
                    first_line: first,
                    title,
                });
            }
            first_line.insert(title.clone(), i + 1);
            let node_id = list.entries.len();
            let mut tokens: Vec<String> = title.split(' ').map(str::to_string).collect();
            tokens.sort();
            tokens.dedup();
            for tok in &tokens {
                list.index.entry(tok.clone()).or_default().push(node_id);
            }
            list.by_title.insert(title.clone(), node_id);
            list.entries.push(MasterEntry {
                node_id,
                year: last_year(&title),
                canonical_title: title,
                tokens,
            });
        }
        Ok(list)
    }

    pub fn entries(&self) -> &[MasterEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node_id: usize) -> Option<&MasterEntry> {
        self.entries.get(node_id)
    }

    /// Exact lookup of an already canonical title.
    pub fn lookup(&self, title: &str) -> Option<&MasterEntry> {
        self.by_title.get(title).map(|&i| &self.entries[i])
    }

    /// Ids of entries containing `token`, ascending.
    pub fn entries_with_token(&self, token: &str) -> &[usize] {
        self.index.get(token).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Reads a master list file, one title per line.
pub fn load_master_list(path: &Path) -> Result<MasterList> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    MasterList::from_titles(text.lines())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrueEntity {
    pub surface: String,
    pub canonical: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrueRelation {
    #[serde(rename = "type")]
    pub rtype: RelationType,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissCause {
    Typo,
    Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Miss {
    pub canonical: String,
    pub cause: MissCause,
}

/// Hand-checked ground truth for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub doc_id: String,
    #[serde(default)]
    pub entities: Vec<TrueEntity>,
    #[serde(default)]
    pub relations: Vec<TrueRelation>,
    #[serde(default)]
    pub misses: Vec<Miss>,
}

impl AnnotationSet {
    /// Every canonical title referenced must exist in `master`.
    pub fn validate(&self, master: &MasterList) -> Result<()> {
        let titles = self
            .entities
            .iter()
            .map(|e| &e.canonical)
            .chain(self.relations.iter().map(|r| &r.target))
            .chain(self.misses.iter().map(|m| &m.canonical));
        for title in titles {
            if master.lookup(title).is_none() {
                return Err(Error::Integrity(format!(
                    "annotation for {:?} references {:?}, which is not in the master list",
                    self.doc_id, title
                )));
            }
        }
        Ok(())
    }
}

/// Loads every `.json` annotation file in `dir`, keyed by doc id.
pub fn load_annotations(dir: &Path) -> Result<BTreeMap<String, AnnotationSet>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut out = BTreeMap::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let set: AnnotationSet = serde_json::from_str(&text).map_err(|e| Error::json(&path, e))?;
        if out.contains_key(&set.doc_id) {
            return Err(Error::Integrity(format!(
                "{}: duplicate annotations for {:?}",
                path.display(),
                set.doc_id
            )));
        }
        out.insert(set.doc_id.clone(), set);
    }
    Ok(out)
}
