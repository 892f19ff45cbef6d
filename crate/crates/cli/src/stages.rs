use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use leginet::canonicalize::{CanonConfig, CanonicalText, Canonicalizer};
use leginet::corpus::{load_annotations, load_corpus, load_master_list, MasterList};
use leginet::eval::{error_table_csv, evaluate};
use leginet::extract::{compile_rules, RuleSet};
use leginet::matching::{MatchConfig, MatchSummary};
use leginet::metrics::{
    centrality, centrality_csv, frequent_terms, metrics_report, snapshot_csv, Measure, DEFAULT_STOPWORDS,
};
use leginet::network::{build_network, export_network, read_network, BuildOptions, DocumentExtraction};
use leginet::pipeline::{canonicalize_all, evaluation_inputs, extract_all, match_all, DocMeta, Extracted};
use leginet::robustness::{
    edge_deletion_experiment, node_removal_experiment, removal_csv, removal_long_csv, stability_csv,
    stability_long_csv, RemovalMode, RemovalPlan,
};

use crate::{Opts, Stage};

const CANONICAL_DIR: &str = "canonical";
const CANONICAL_INDEX: &str = "canonical/documents.json";
const EXTRACTED: &str = "extract/extracted.json";
const MATCHES: &str = "match/matches.json";
const NETWORK_DIR: &str = "network";

pub fn run(stage: Stage, opts: &Opts) -> Result<()> {
    match stage {
        Stage::Canonicalize => canonicalize(opts),
        Stage::Extract => extract(opts),
        Stage::Match => match_stage(opts),
        Stage::Build => build(opts),
        Stage::Metrics => metrics(opts),
        Stage::Robustness => robustness(opts),
        Stage::Evaluate => evaluate_stage(opts),
        Stage::Pipeline => {
            canonicalize(opts)?;
            extract(opts)?;
            match_stage(opts)?;
            build(opts)?;
            metrics(opts)?;
            robustness(opts)?;
            if opts.annotations.is_some() {
                evaluate_stage(opts)?;
            } else {
                log::info!("no --annotations given; skipping evaluate");
            }
            Ok(())
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CanonicalEntry {
    #[serde(flatten)]
    meta: DocMeta,
    applied_steps: Vec<String>,
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str, stage: &str) -> Result<&'a Path> {
    value.as_deref().ok_or_else(|| anyhow!("{stage} needs --{flag}"))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

/// Reads an artifact produced by `producer`, pointing there when it is missing.
fn read_artifact<T: DeserializeOwned>(out: &Path, rel: &str, producer: &str) -> Result<T> {
    let path = out.join(rel);
    if !path.exists() {
        bail!("{} not found; run `leginet {producer}` first", path.display());
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn master(opts: &Opts, stage: &str) -> Result<MasterList> {
    Ok(load_master_list(required(&opts.master, "master", stage)?)?)
}

fn match_config(opts: &Opts) -> Result<MatchConfig> {
    let cfg = MatchConfig {
        edit_threshold: opts.edit_threshold,
        jaccard_exit: opts.jaccard_exit,
        jaccard_floor: opts.jaccard_floor,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn canonicalize(opts: &Opts) -> Result<()> {
    let corpus_dir = required(&opts.corpus, "corpus", "canonicalize")?;
    let cfg = match &opts.canon_config {
        Some(p) => CanonConfig::load(p)?,
        None => CanonConfig::default(),
    };
    let canon = Canonicalizer::new(cfg)?;
    let corpus = load_corpus(corpus_dir, opts.manifest.as_deref())?;
    for w in &corpus.warnings {
        log::warn!("{w}");
    }
    if corpus.documents.is_empty() {
        bail!("no documents found in {}", corpus_dir.display());
    }
    let texts = canonicalize_all(&corpus.documents, &canon);
    let dir = opts.out.join(CANONICAL_DIR);
    if dir.exists() {
        fs::remove_dir_all(&dir).with_context(|| format!("clearing {}", dir.display()))?;
    }
    let mut index = Vec::with_capacity(texts.len());
    for (doc, ct) in corpus.documents.iter().zip(&texts) {
        write(&dir.join(format!("{}.txt", doc.doc_id)), format!("{}\n", ct.text))?;
        index.push(CanonicalEntry {
            meta: DocMeta::from(doc),
            applied_steps: ct.applied_steps.clone(),
        });
    }
    write_json(&opts.out.join(CANONICAL_INDEX), &index)?;
    log::info!("canonicalized {} documents", index.len());
    Ok(())
}

fn extract(opts: &Opts) -> Result<()> {
    let rules = match &opts.rules {
        Some(p) => compile_rules(p)?,
        None => RuleSet::bundled(),
    };
    let index: Vec<CanonicalEntry> = read_artifact(&opts.out, CANONICAL_INDEX, "canonicalize")?;
    let mut metas = Vec::with_capacity(index.len());
    let mut texts = Vec::with_capacity(index.len());
    for entry in index {
        let path = opts.out.join(CANONICAL_DIR).join(format!("{}.txt", entry.meta.doc_id));
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}; run `leginet canonicalize` first", path.display()))?;
        texts.push(CanonicalText {
            doc_id: entry.meta.doc_id.clone(),
            text: text.trim_end_matches('\n').to_string(),
            applied_steps: entry.applied_steps,
        });
        metas.push(entry.meta);
    }
    let extracted = extract_all(&metas, &texts, &rules);
    write_json(&opts.out.join(EXTRACTED), &extracted)?;

    let mut mentions = String::from("doc_id,start,end,surface,year,rule_id\n");
    let mut relations = String::from("doc_id,type,start,end,surface,event_year,rule_id\n");
    for e in &extracted {
        for m in &e.mentions {
            mentions.push_str(&csv_row(&[
                &m.doc_id,
                &m.span.0.to_string(),
                &m.span.1.to_string(),
                &m.surface,
                &opt_year(m.year),
                &m.rule_id,
            ]));
        }
        for r in &e.relations {
            relations.push_str(&csv_row(&[
                &r.doc_id,
                r.rtype.code(),
                &r.target.span.0.to_string(),
                &r.target.span.1.to_string(),
                &r.target.surface,
                &opt_year(r.event_year),
                &r.rule_id,
            ]));
        }
    }
    write(&opts.out.join("extract/mentions.csv"), mentions)?;
    write(&opts.out.join("extract/relations.csv"), relations)?;
    log::info!(
        "extracted {} mentions and {} relations",
        extracted.iter().map(|e| e.mentions.len()).sum::<usize>(),
        extracted.iter().map(|e| e.relations.len()).sum::<usize>()
    );
    Ok(())
}

fn opt_year(y: Option<i32>) -> String {
    y.map(|y| y.to_string()).unwrap_or_default()
}

fn csv_row(fields: &[&str]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect();
    format!("{}\n", quoted.join(","))
}

fn match_stage(opts: &Opts) -> Result<()> {
    let master = master(opts, "match")?;
    let cfg = match_config(opts)?;
    let extracted: Vec<Extracted> = read_artifact(&opts.out, EXTRACTED, "extract")?;
    let matched = match_all(&extracted, &master, &cfg);
    let mut summary = MatchSummary::default();
    let mut table = String::from("doc_id,start,end,surface,method,node_id,title,edit_dist,jaccard,early_exit\n");
    for r in matched.iter().flat_map(|d| &d.matches) {
        summary.total += 1;
        match &r.entry {
            Some(_) => summary.matched += 1,
            None => summary.unmatched += 1,
        }
        *summary.by_method.entry(r.method).or_default() += 1;
        table.push_str(&csv_row(&[
            &r.mention.doc_id,
            &r.mention.span.0.to_string(),
            &r.mention.span.1.to_string(),
            &r.mention.surface,
            r.method.as_str(),
            &r.entry.as_ref().map(|e| e.node_id.to_string()).unwrap_or_default(),
            r.entry.as_ref().map(|e| e.canonical_title.as_str()).unwrap_or(""),
            &r.edit_dist.to_string(),
            &format!("{:.6}", r.jaccard),
            &r.early_exit.to_string(),
        ]));
    }
    write_json(&opts.out.join(MATCHES), &matched)?;
    write_json(&opts.out.join("match/summary.json"), &summary)?;
    write(&opts.out.join("match/matches.csv"), table)?;
    log::info!("matched {}/{} mentions", summary.matched, summary.total);
    Ok(())
}

fn build(opts: &Opts) -> Result<()> {
    let master = master(opts, "build")?;
    let matched: Vec<DocumentExtraction> = read_artifact(&opts.out, MATCHES, "match")?;
    let build_opts = BuildOptions {
        keep_multiedges: opts.keep_multiedges,
        match_config: match_config(opts)?,
    };
    let (net, report) = build_network(&matched, &master, &build_opts)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let dir = opts.out.join(NETWORK_DIR);
    let gexf = dir.join("network.gexf");
    if !opts.gexf && gexf.exists() {
        fs::remove_file(&gexf).with_context(|| format!("removing stale {}", gexf.display()))?;
    }
    export_network(&net, &dir, opts.gexf)?;
    write_json(&dir.join("build_report.json"), &report)?;
    log::info!("network has {} nodes and {} edges", net.node_count(), net.edge_count());
    Ok(())
}

fn load_network(opts: &Opts) -> Result<leginet::network::LegislationNetwork> {
    let dir = opts.out.join(NETWORK_DIR);
    if !dir.join("nodes.csv").exists() || !dir.join("edges.csv").exists() {
        bail!(
            "{} has no nodes.csv/edges.csv; run `leginet build` first",
            dir.display()
        );
    }
    Ok(read_network(&dir)?)
}

fn metrics(opts: &Opts) -> Result<()> {
    let net = load_network(opts)?;
    let report = metrics_report(&net, &opts.snapshots, opts.n_random, opts.seed)?;
    let g = net.to_digraph();
    let vectors = Measure::ALL
        .iter()
        .map(|&m| centrality(&g, m, None))
        .collect::<leginet::Result<Vec<_>>>()?;
    let mut terms = String::from("term,count\n");
    for (term, count) in frequent_terms(&net, &vectors[0], 10, DEFAULT_STOPWORDS) {
        terms.push_str(&csv_row(&[&term, &count.to_string()]));
    }
    let dir = opts.out.join("metrics");
    write_json(&dir.join("report.json"), &report)?;
    write(&dir.join("snapshots.csv"), snapshot_csv(&report))?;
    write(&dir.join("centrality.csv"), centrality_csv(&vectors))?;
    write(&dir.join("terms.csv"), terms)?;
    Ok(())
}

fn robustness(opts: &Opts) -> Result<()> {
    let g = load_network(opts)?.to_digraph();
    let results = [RemovalMode::Failure, RemovalMode::Attack]
        .into_iter()
        .map(|mode| {
            let plan = RemovalPlan::new(mode, opts.removal_fractions.clone(), opts.removal_reps, opts.seed)?;
            node_removal_experiment(&g, &plan)
        })
        .collect::<leginet::Result<Vec<_>>>()?;
    let deletion = edge_deletion_experiment(&g, &opts.edge_levels, opts.edge_reps, &Measure::ALL, opts.seed)?;
    let dir = opts.out.join("robustness");
    write(&dir.join("removal.csv"), removal_csv(&results))?;
    write(&dir.join("removal_samples.csv"), removal_long_csv(&results))?;
    write(&dir.join("stability.csv"), stability_csv(&deletion.reports))?;
    write(
        &dir.join("stability_samples.csv"),
        stability_long_csv(&deletion.samples),
    )?;
    log::info!("katz attenuation for edge deletion: {}", deletion.katz_attenuation);
    Ok(())
}

fn evaluate_stage(opts: &Opts) -> Result<()> {
    let master = master(opts, "evaluate")?;
    let ann_dir = required(&opts.annotations, "annotations", "evaluate")?;
    let annotations = load_annotations(ann_dir)?;
    let extracted: Vec<Extracted> = read_artifact(&opts.out, EXTRACTED, "extract")?;
    let matched: Vec<DocumentExtraction> = read_artifact(&opts.out, MATCHES, "match")?;
    let by_id: BTreeMap<&str, &DocumentExtraction> = matched.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let aligned: Vec<DocumentExtraction> = extracted
        .iter()
        .map(|e| {
            by_id
                .get(e.doc_id.as_str())
                .map(|d| (*d).clone())
                .ok_or_else(|| anyhow!("{} has no matches; run `leginet match` first", e.doc_id))
        })
        .collect::<Result<_>>()?;
    for id in annotations.keys() {
        if !extracted.iter().any(|e| &e.doc_id == id) {
            log::warn!("annotations for {id} have no matching document");
        }
    }
    let docs = evaluation_inputs(&extracted, &aligned, &annotations);
    if docs.is_empty() {
        bail!("no annotated documents among the extracted ones");
    }
    let report = evaluate(&docs, &master, opts.clusters, opts.cluster_size, opts.seed)?;
    let dir = opts.out.join("evaluation");
    write_json(&dir.join("report.json"), &report)?;
    write(&dir.join("error_table.csv"), error_table_csv(&report.estimates))?;
    log::info!("precision {:.4} recall {:.4}", report.precision, report.recall);
    Ok(())
}
