//! Assembly of the typed, timestamped legislation network and its
//! cumulative snapshots.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, MasterList, MAX_YEAR, MIN_YEAR};
use crate::error::{Error, Result};
use crate::extract::{RelationMention, RelationType};
use crate::graph::Digraph;
use crate::matching::{hybrid_match, MatchConfig, MatchResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: usize,
    pub title: String,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: usize,
    pub dst: usize,
    pub rtype: RelationType,
    pub ts: i32,
}

/// Nodes keyed by node id; edges sorted by (src, dst, type, ts).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LegislationNetwork {
    nodes: BTreeMap<usize, NodeRecord>,
    edges: Vec<EdgeRecord>,
}

impl LegislationNetwork {
    /// Builds a network from explicit records. Edges with unknown endpoints
    /// are rejected; with `keep_multiedges` false, repeated
    /// (src, dst, type) triples keep their earliest timestamp.
    pub fn from_parts(
        nodes: impl IntoIterator<Item = NodeRecord>,
        edges: impl IntoIterator<Item = EdgeRecord>,
        keep_multiedges: bool,
    ) -> Result<Self> {
        let mut net = LegislationNetwork::default();
        for node in nodes {
            if net.nodes.insert(node.node_id, node.clone()).is_some() {
                return Err(Error::Integrity(format!("duplicate node id {}", node.node_id)));
            }
        }
        let mut edges: Vec<EdgeRecord> = edges.into_iter().collect();
        for e in &edges {
            if !net.nodes.contains_key(&e.src) || !net.nodes.contains_key(&e.dst) {
                return Err(Error::Integrity(format!(
                    "edge {} -> {} references a missing node",
                    e.src, e.dst
                )));
            }
            if !(MIN_YEAR..=MAX_YEAR).contains(&e.ts) {
                return Err(Error::Integrity(format!(
                    "edge {} -> {} has timestamp {} outside [{MIN_YEAR}, {MAX_YEAR}]",
                    e.src, e.dst, e.ts
                )));
            }
        }
        edges.sort();
        if !keep_multiedges {
            edges.dedup_by_key(|e| (e.src, e.dst, e.rtype));
        }
        net.edges = edges;
        Ok(net)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeRecord> {
        self.nodes.values()
    }

    pub fn node(&self, node_id: usize) -> Option<&NodeRecord> {
        self.nodes.get(&node_id)
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_timestamp(&self) -> Option<i32> {
        self.edges.iter().map(|e| e.ts).max()
    }

    /// Out-neighbours per node id, deduplicated across relation types.
    pub fn out_adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.nodes.keys().map(|&k| (k, Vec::new())).collect();
        for e in &self.edges {
            adj.get_mut(&e.src).unwrap().push(e.dst);
        }
        adj.values_mut().for_each(|v| v.dedup());
        adj
    }

    pub fn in_adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.nodes.keys().map(|&k| (k, Vec::new())).collect();
        for e in &self.edges {
            adj.get_mut(&e.dst).unwrap().push(e.src);
        }
        adj.values_mut().for_each(|v| {
            v.sort_unstable();
            v.dedup()
        });
        adj
    }

    /// The untyped simple digraph used by the metrics; vertex `i` is the
    /// `i`-th node in id order and carries its node id.
    pub fn to_digraph(&self) -> Digraph {
        let ids: Vec<usize> = self.nodes.keys().copied().collect();
        let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut g = Digraph::with_ids(ids);
        g.extend_edges(self.edges.iter().map(|e| (index[&e.src], index[&e.dst])));
        g
    }
}

/// Everything extracted from one document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentExtraction {
    pub doc_id: String,
    pub title_hint: String,
    pub year: Option<i32>,
    pub relations: Vec<RelationMention>,
    pub matches: Vec<MatchResult>,
}

impl DocumentExtraction {
    pub fn new(doc: &Document) -> Self {
        DocumentExtraction {
            doc_id: doc.doc_id.clone(),
            title_hint: doc.title_hint.clone(),
            year: doc.year,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub keep_multiedges: bool,
    pub match_config: MatchConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub documents: usize,
    pub skipped_documents: Vec<String>,
    pub unmatched_mentions: usize,
    pub self_loops_dropped: usize,
    pub warnings: Vec<String>,
}

/// Identifies the master entry a document is. The filename-derived title
/// wins when it is an exact master title; otherwise the matched self-title
/// mention, then an approximate match of the filename title.
fn resolve_source(
    doc: &DocumentExtraction,
    master: &MasterList,
    cfg: &MatchConfig,
    by_span: &HashMap<(usize, usize), &MatchResult>,
) -> (Option<usize>, Option<String>) {
    let tit_match = doc
        .relations
        .iter()
        .filter(|r| r.rtype == RelationType::Title)
        .find_map(|r| by_span.get(&r.target.span).and_then(|m| m.entry.as_ref()))
        .map(|e| e.node_id);

    if let Some(exact) = master.lookup(&doc.title_hint) {
        let warning = match tit_match {
            Some(t) if t != exact.node_id => Some(format!(
                "{}: self-title resolves to {:?} but filename says {:?}",
                doc.doc_id,
                master.get(t).map(|e| e.canonical_title.as_str()).unwrap_or("?"),
                exact.canonical_title
            )),
            _ => None,
        };
        return (Some(exact.node_id), warning);
    }
    if tit_match.is_some() {
        return (tit_match, None);
    }
    (hybrid_match(&doc.title_hint, master, cfg).entry, None)
}

/// Assembles the network from per-document extraction results.
pub fn build_network(
    docs: &[DocumentExtraction],
    master: &MasterList,
    opts: &BuildOptions,
) -> Result<(LegislationNetwork, BuildReport)> {
    let mut report = BuildReport {
        documents: docs.len(),
        ..Default::default()
    };
    let mut node_ids = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut source_years: HashMap<usize, i32> = HashMap::new();

    for doc in docs {
        let by_span: HashMap<(usize, usize), &MatchResult> = doc.matches.iter().map(|m| (m.mention.span, m)).collect();
        let (source, warning) = resolve_source(doc, master, &opts.match_config, &by_span);
        if let Some(w) = warning {
            log::warn!("{w}");
            report.warnings.push(w);
        }
        let Some(src) = source else {
            let w = format!("{}: cannot resolve document to a master entry; skipped", doc.doc_id);
            log::warn!("{w}");
            report.warnings.push(w);
            report.skipped_documents.push(doc.doc_id.clone());
            continue;
        };
        node_ids.insert(src);
        let src_entry = &master.entries()[src];
        let doc_year = doc.year.or(src_entry.year);
        if let (None, Some(y)) = (src_entry.year, doc.year) {
            source_years.entry(src).or_insert(y);
        }

        for rel in &doc.relations {
            if rel.rtype == RelationType::Title {
                continue;
            }
            let Some(entry) = by_span.get(&rel.target.span).and_then(|m| m.entry.as_ref()) else {
                report.unmatched_mentions += 1;
                continue;
            };
            node_ids.insert(entry.node_id);
            if entry.node_id == src {
                report.self_loops_dropped += 1;
                continue;
            }
            let Some(ts) = rel.event_year.or(doc_year) else {
                let w = format!(
                    "{}: no timestamp for {} edge to {:?}; edge skipped",
                    doc.doc_id, rel.rtype, entry.canonical_title
                );
                log::warn!("{w}");
                report.warnings.push(w);
                continue;
            };
            edges.push(EdgeRecord {
                src,
                dst: entry.node_id,
                rtype: rel.rtype,
                ts,
            });
        }
    }

    let nodes = node_ids.into_iter().map(|id| {
        let e = &master.entries()[id];
        NodeRecord {
            node_id: id,
            title: e.canonical_title.clone(),
            year: e.year.or_else(|| source_years.get(&id).copied()),
        }
    });
    let net = LegislationNetwork::from_parts(nodes, edges, opts.keep_multiedges)?;
    Ok((net, report))
}

/// Cumulative view: nodes with a known year up to `end_year`, and edges up
/// to `end_year` whose endpoints are both present.
pub fn snapshot_at(net: &LegislationNetwork, end_year: i32) -> LegislationNetwork {
    let nodes: BTreeMap<usize, NodeRecord> = net
        .nodes
        .iter()
        .filter(|(_, n)| n.year.is_some_and(|y| y <= end_year))
        .map(|(&k, n)| (k, n.clone()))
        .collect();
    let edges = net
        .edges
        .iter()
        .filter(|e| e.ts <= end_year && nodes.contains_key(&e.src) && nodes.contains_key(&e.dst))
        .copied()
        .collect();
    LegislationNetwork { nodes, edges }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn nodes_csv(net: &LegislationNetwork) -> String {
    let mut out = String::from("node_id,title,year\n");
    for n in net.nodes() {
        let year = n.year.map(|y| y.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", n.node_id, csv_quote(&n.title), year);
    }
    out
}

pub fn edges_csv(net: &LegislationNetwork) -> String {
    let mut out = String::from("src,dst,type,ts\n");
    for e in net.edges() {
        let _ = writeln!(out, "{},{},{},{}", e.src, e.dst, e.rtype, e.ts);
    }
    out
}

/// GEXF 1.3 document with node start years and edge timestamps.
pub fn gexf(net: &LegislationNetwork) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    out.push_str("  <graph defaultedgetype=\"directed\" mode=\"dynamic\" timeformat=\"double\">\n");
    out.push_str("    <attributes class=\"edge\">\n");
    out.push_str("      <attribute id=\"type\" title=\"type\" type=\"string\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for n in net.nodes() {
        let start = n.year.map(|y| format!(" start=\"{y}\"")).unwrap_or_default();
        let _ = writeln!(
            out,
            "      <node id=\"{}\" label=\"{}\"{start}/>",
            n.node_id,
            xml_escape(&n.title)
        );
    }
    out.push_str("    </nodes>\n");
    out.push_str("    <edges>\n");
    for (i, e) in net.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" start=\"{}\" label=\"{}\"><attvalues><attvalue for=\"type\" value=\"{}\"/></attvalues></edge>",
            e.src, e.dst, e.ts, e.rtype, e.rtype
        );
    }
    out.push_str("    </edges>\n");
    out.push_str("  </graph>\n");
    out.push_str("</gexf>\n");
    out
}

/// Writes `nodes.csv`, `edges.csv` and optionally `network.gexf` into `dir`.
pub fn export_network(net: &LegislationNetwork, dir: &Path, with_gexf: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![
        (dir.join("nodes.csv"), nodes_csv(net)),
        (dir.join("edges.csv"), edges_csv(net)),
    ];
    if with_gexf {
        files.push((dir.join("network.gexf"), gexf(net)));
    }
    let mut written = Vec::new();
    for (path, body) in files {
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Deserialize)]
struct NodeRow {
    node_id: usize,
    title: String,
    year: Option<i32>,
}

#[derive(Deserialize)]
struct EdgeRow {
    src: usize,
    dst: usize,
    #[serde(rename = "type")]
    rtype: String,
    ts: i32,
}

/// Reads a network previously written by [`export_network`].
pub fn read_network(dir: &Path) -> Result<LegislationNetwork> {
    let nodes_path = dir.join("nodes.csv");
    let edges_path = dir.join("edges.csv");
    let mut nodes = Vec::new();
    let mut rdr = csv::Reader::from_path(&nodes_path).map_err(|e| Error::csv(&nodes_path, e))?;
    for row in rdr.deserialize::<NodeRow>() {
        let row = row.map_err(|e| Error::csv(&nodes_path, e))?;
        nodes.push(NodeRecord {
            node_id: row.node_id,
            title: row.title,
            year: row.year,
        });
    }
    let mut edges = Vec::new();
    let mut rdr = csv::Reader::from_path(&edges_path).map_err(|e| Error::csv(&edges_path, e))?;
    for row in rdr.deserialize::<EdgeRow>() {
        let row = row.map_err(|e| Error::csv(&edges_path, e))?;
        let rtype = row
            .rtype
            .parse()
            .map_err(|reason: String| Error::Integrity(format!("{}: {reason}", edges_path.display())))?;
        edges.push(EdgeRecord {
            src: row.src,
            dst: row.dst,
            rtype,
            ts: row.ts,
        });
    }
    LegislationNetwork::from_parts(nodes, edges, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::EntityMention;
    use crate::matching::MatchMethod;

    fn master() -> MasterList {
        MasterList::from_titles([
            "Companies Act 1993",
            "Trade Marks Act 2002",
            "Land Act 1924",
            "Fencing Act 1978",
        ])
        .unwrap()
    }

    fn relation(
        doc: &str,
        rtype: RelationType,
        surface: &str,
        start: usize,
        event_year: Option<i32>,
    ) -> RelationMention {
        RelationMention {
            doc_id: doc.into(),
            rtype,
            target: EntityMention {
                doc_id: doc.into(),
                surface: surface.into(),
                span: (start, start + surface.len()),
                year: None,
                rule_id: "t".into(),
            },
            event_year,
            rule_id: "t".into(),
        }
    }

    fn doc(title: &str, year: i32, rels: Vec<RelationMention>, m: &MasterList) -> DocumentExtraction {
        let matches = rels
            .iter()
            .map(|r| {
                let entry = m.lookup(&r.target.surface).cloned();
                MatchResult {
                    mention: r.target.clone(),
                    method: if entry.is_some() {
                        MatchMethod::ExactEdit
                    } else {
                        MatchMethod::None
                    },
                    entry,
                    edit_dist: 0,
                    jaccard: 1.0,
                    early_exit: true,
                }
            })
            .collect();
        DocumentExtraction {
            doc_id: title.replace(' ', "_"),
            title_hint: title.into(),
            year: Some(year),
            relations: rels,
            matches,
        }
    }

    #[test]
    fn single_citation() {
        let m = master();
        let d = doc(
            "trade marks act 2002",
            2002,
            vec![relation("t", RelationType::Citation, "companies act 1993", 10, None)],
            &m,
        );
        let (net, report) = build_network(&[d], &m, &BuildOptions::default()).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(
            net.edges(),
            &[EdgeRecord {
                src: 1,
                dst: 0,
                rtype: RelationType::Citation,
                ts: 2002
            }]
        );
        assert_eq!(report.unmatched_mentions, 0);
    }

    #[test]
    fn self_citation_is_dropped() {
        let m = master();
        let d = doc(
            "companies act 1993",
            1993,
            vec![relation("c", RelationType::Citation, "companies act 1993", 0, None)],
            &m,
        );
        let (net, report) = build_network(&[d], &m, &BuildOptions::default()).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (1, 0));
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn two_documents_citing_same_act() {
        let m = master();
        let a = doc(
            "trade marks act 2002",
            2002,
            vec![relation("t", RelationType::Citation, "companies act 1993", 0, None)],
            &m,
        );
        let b = doc(
            "fencing act 1978",
            1978,
            vec![relation("f", RelationType::Citation, "companies act 1993", 0, None)],
            &m,
        );
        let (net, _) = build_network(&[a, b], &m, &BuildOptions::default()).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (3, 2));
        assert!((net.edge_count() as f64 / net.node_count() as f64 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn amendment_uses_event_year_and_duplicates_collapse() {
        let m = master();
        let d = doc(
            "land act 1924",
            1924,
            vec![
                relation("l", RelationType::Amendment, "fencing act 1978", 0, Some(1978)),
                relation("l", RelationType::Amendment, "fencing act 1978", 40, Some(1978)),
                relation("l", RelationType::Citation, "fencing act 1978", 80, None),
                relation("l", RelationType::Citation, "unknown act 1900", 120, None),
            ],
            &m,
        );
        let (net, report) = build_network(std::slice::from_ref(&d), &m, &BuildOptions::default()).unwrap();
        let got: Vec<_> = net.edges().iter().map(|e| (e.rtype, e.ts)).collect();
        assert_eq!(
            got,
            vec![(RelationType::Citation, 1924), (RelationType::Amendment, 1978)]
                .into_iter()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect::<Vec<_>>()
        );
        assert_eq!(report.unmatched_mentions, 1);

        let keep = BuildOptions {
            keep_multiedges: true,
            ..Default::default()
        };
        let (multi, _) = build_network(&[d], &m, &keep).unwrap();
        assert_eq!(multi.edge_count(), 3);
    }

    #[test]
    fn unresolvable_document_is_skipped() {
        let m = master();
        let d = doc("zzzz qqqq", 1950, vec![], &m);
        let (net, report) = build_network(&[d], &m, &BuildOptions::default()).unwrap();
        assert_eq!(net.node_count(), 0);
        assert_eq!(report.skipped_documents, vec!["zzzz_qqqq".to_string()]);
    }

    fn two_node_net() -> LegislationNetwork {
        LegislationNetwork::from_parts(
            [
                NodeRecord {
                    node_id: 0,
                    title: "a act 1850".into(),
                    year: Some(1850),
                },
                NodeRecord {
                    node_id: 1,
                    title: "b \"quoted\" act 1860".into(),
                    year: Some(1860),
                },
            ],
            [EdgeRecord {
                src: 1,
                dst: 0,
                rtype: RelationType::Citation,
                ts: 1860,
            }],
            false,
        )
        .unwrap()
    }

    #[test]
    fn snapshot_restricts_nodes_and_edges() {
        let net = two_node_net();
        let s = snapshot_at(&net, 1855);
        assert_eq!((s.node_count(), s.edge_count()), (1, 0));
        assert_eq!(snapshot_at(&net, 1800).node_count(), 0);
        assert_eq!(snapshot_at(&net, net.max_timestamp().unwrap()), net);
    }

    #[test]
    fn export_is_stable_and_readable() {
        let net = two_node_net();
        let dir = tempfile::tempdir().unwrap();
        export_network(&net, dir.path(), true).unwrap();
        let first = fs::read(dir.path().join("nodes.csv")).unwrap();
        export_network(&net, dir.path(), true).unwrap();
        assert_eq!(first, fs::read(dir.path().join("nodes.csv")).unwrap());
        let nodes = String::from_utf8(first).unwrap();
        assert_eq!(nodes.lines().count(), 3);
        assert_eq!(edges_csv(&net).lines().count(), 2);
        assert_eq!(read_network(dir.path()).unwrap(), net);
        assert!(gexf(&net).contains("&quot;quoted&quot;"));
    }

    #[test]
    fn empty_network_exports_headers() {
        let net = LegislationNetwork::default();
        assert_eq!(nodes_csv(&net), "node_id,title,year\n");
        assert_eq!(edges_csv(&net), "src,dst,type,ts\n");
    }

    #[test]
    fn rejects_dangling_edges() {
        let err = LegislationNetwork::from_parts(
            [],
            [EdgeRecord {
                src: 0,
                dst: 1,
                rtype: RelationType::Citation,
                ts: 1900,
            }],
            false,
        );
        assert!(err.is_err());
    }
}
