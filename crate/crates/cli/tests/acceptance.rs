//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs as a plain binary so the lines are always printed. The process
//! fails if any criterion fails, except those listed in `KNOWN_GAPS`, whose
//! failure is reported but expected (see README).

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use leginet::canonicalize::{CanonConfig, CanonicalText, Canonicalizer};
use leginet::corpus::{load_annotations, load_corpus, load_master_list, MasterList};
use leginet::eval::{estimate_extraction_errors, evaluate, inject_year_typos, precision_recall, DocumentEvaluation};
use leginet::extract::RuleSet;
use leginet::matching::{batch_match, edit_distance, edit_only_match, hybrid_match, jaccard_only_match, MatchConfig};
use leginet::metrics::{
    average_degree_counts, betweenness, directed_clustering, local_directed_clustering, path_stats, Measure,
};
use leginet::pipeline::{canonicalize_all, evaluation_inputs, extract_all, extract_one, match_all, DocMeta};
use leginet::robustness::{edge_deletion_experiment, node_removal_experiment, RemovalMode, RemovalPlan};
use leginet::synth::{corrupt, preferential_attachment, rng_for, stream_id, synthetic_titles};

/// Criteria that cannot be met as stated; their analysis is in the README.
const KNOWN_GAPS: &[u32] = &[4];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn golden() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/golden")
}

fn c1_precision_recall() -> Outcome {
    let (p, r) = precision_recall(0.0160, 0.0179).unwrap();
    let (p, r) = (100.0 * p, 100.0 * r);
    let pass = (p - 98.37).abs() <= 0.005 && (r - 98.18).abs() <= 0.005;
    outcome(pass, format!("precision {p:.4}% recall {r:.4}%"))
}

fn c2_average_degree() -> Outcome {
    let a = average_degree_counts(16385, 137751);
    let b = average_degree_counts(16199, 130969);
    let pass = format!("{a:.3}") == "8.407" && format!("{b:.3}") == "8.085";
    outcome(pass, format!("{a:.3}, {b:.3}"))
}

fn c3_worked_example() -> Outcome {
    let master = MasterList::from_titles([
        "Marriage Act 1908",
        "Married Women Property Act 1884",
        "Married Women Property Protection Act 1860",
        "Matrimonial Property Act 1963",
    ])
    .unwrap();
    let r = hybrid_match(
        "married vomens propertyprotectio act 1860",
        &master,
        &MatchConfig::default(),
    );
    let got = r.entry.and_then(|i| master.get(i)).map(|e| e.canonical_title.clone());
    let pass = got.as_deref() == Some("married women property protection act 1860");
    outcome(
        pass,
        format!("{got:?} via {} (edit distance {})", r.method.as_str(), r.edit_dist),
    )
}

#[derive(Default)]
struct Tally {
    matched: usize,
    correct: usize,
}

impl Tally {
    fn add(&mut self, got: Option<usize>, truth: usize) {
        if let Some(g) = got {
            self.matched += 1;
            self.correct += usize::from(g == truth);
        }
    }

    fn precision(&self) -> f64 {
        self.correct as f64 / self.matched.max(1) as f64
    }

    fn recall(&self, n: usize) -> f64 {
        self.correct as f64 / n as f64
    }
}

fn c4_hybrid_vs_baselines() -> Outcome {
    let n = 500;
    let mut rng = rng_for(2024, 0);
    let titles = synthetic_titles(n, &mut rng);
    let master = MasterList::from_titles(&titles).unwrap();
    let cfg = MatchConfig::default();
    let (mut hybrid, mut edit, mut nearest, mut jac) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default());
    for (i, entry) in master.entries().iter().enumerate() {
        let rate = 0.05 + 0.10 * i as f64 / (n - 1) as f64;
        let q = corrupt(&entry.canonical_title, rate, &mut rng);
        hybrid.add(hybrid_match(&q, &master, &cfg).entry, i);
        edit.add(edit_only_match(&q, &master, cfg.edit_threshold), i);
        nearest.add(edit_only_match(&q, &master, usize::MAX), i);
        jac.add(jaccard_only_match(&q, &master, cfg.jaccard_floor), i);
    }
    let (hp, hr) = (hybrid.precision(), hybrid.recall(n));
    let (ep, er) = (edit.precision(), edit.recall(n));
    let (np, nr) = (nearest.precision(), nearest.recall(n));
    let (jp, jr) = (jac.precision(), jac.recall(n));
    let pass = hp >= ep && hp >= jp && hr >= er && hr >= jr && hp >= 0.95;
    outcome(
        pass,
        format!(
            "P/R hybrid {hp:.3}/{hr:.3}, edit-only (<= {}) {ep:.3}/{er:.3}, nearest by edit {np:.3}/{nr:.3}, \
             jaccard-only {jp:.3}/{jr:.3}",
            cfg.edit_threshold
        ),
    )
}

fn c5_oracles() -> Outcome {
    let mut rng = rng_for(2024, 0);
    let mut edit_bad = 0;
    for _ in 0..10_000 {
        let (a, b) = (support::random_string(&mut rng), support::random_string(&mut rng));
        edit_bad += usize::from(edit_distance(&a, &b) != support::dp_edit(&a, &b));
    }
    let (mut bc_bad, mut ps_bad, mut cc_bad) = (0, 0, 0);
    for i in 0..200 {
        let g = support::random_graph(i);
        let bc = betweenness(&g).scores;
        let want = support::betweenness_by_enumeration(&g);
        bc_bad += usize::from(bc.iter().zip(&want).any(|(a, b)| (a - b).abs() > 1e-9 * b.max(1.0)));
        let ps = path_stats(&g);
        let (pairs, diam, mean) = support::path_stats_by_floyd_warshall(&g);
        ps_bad +=
            usize::from(ps.reachable_pairs != pairs || ps.diameter != diam || (ps.avg_path_length - mean).abs() > 1e-9);
        let cc = local_directed_clustering(&g);
        let want = support::clustering_by_matrix_cube(&g);
        let mean_want = want.iter().sum::<f64>() / want.len() as f64;
        cc_bad += usize::from(
            cc.iter().zip(&want).any(|(a, b)| (a - b).abs() > 1e-9)
                || (directed_clustering(&g) - mean_want).abs() > 1e-9,
        );
    }
    let pass = edit_bad + bc_bad + ps_bad + cc_bad == 0;
    outcome(
        pass,
        format!("mismatches: edit {edit_bad}/10000, betweenness {bc_bad}/200, path stats {ps_bad}/200, clustering {cc_bad}/200"),
    )
}

fn c6_attack_vs_failure() -> Outcome {
    let g = preferential_attachment(2000, 3, &mut rng_for(2024, 0));
    let fractions = vec![0.01, 0.03, 0.05];
    let run = |mode| {
        let plan = RemovalPlan::new(mode, fractions.clone(), 20, 7).unwrap();
        node_removal_experiment(&g, &plan).unwrap()
    };
    let (failure, attack) = (run(RemovalMode::Failure), run(RemovalMode::Attack));
    let (a, f) = (attack.points[2].mean_diameter, failure.points[2].mean_diameter);
    let curve: Vec<String> = attack
        .points
        .iter()
        .zip(&failure.points)
        .map(|(a, f)| format!("f={}: {} vs {}", a.fraction, a.mean_diameter, f.mean_diameter))
        .collect();
    outcome(
        a > f,
        format!(
            "{} edges; attack vs failure mean diameter {}",
            g.edge_count(),
            curve.join(", ")
        ),
    )
}

fn c7_edge_deletion() -> Outcome {
    let g = preferential_attachment(1000, 3, &mut rng_for(2025, 0));
    let levels = [0.0, 0.01, 0.05, 0.10, 0.20];
    let r = edge_deletion_experiment(&g, &levels, 100, &Measure::ALL, 9).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for m in Measure::ALL {
        let rows: Vec<_> = r.reports.iter().filter(|s| s.measure == m).collect();
        let at_zero = rows[0];
        let exact = at_zero.top1_retention == 1.0
            && at_zero.top3_overlap == 1.0
            && at_zero.top10pct_overlap == 1.0
            && at_zero.pearson == Some(1.0)
            && at_zero.top1_in_top10pct == 1.0;
        let pearsons: Vec<f64> = rows[1..].iter().map(|s| s.pearson.unwrap_or(f64::NAN)).collect();
        let monotone = pearsons.windows(2).all(|w| w[1] <= w[0]);
        pass &= exact && monotone;
        let shown: Vec<String> = pearsons.iter().map(|p| format!("{p:.3}")).collect();
        notes.push(format!(
            "{} pearson [{}]{}",
            m.as_str(),
            shown.join(" "),
            if exact { "" } else { " (f=0 not exact)" }
        ));
    }
    let katz20 = r
        .reports
        .iter()
        .find(|s| s.measure == Measure::Katz && s.fraction == 0.20)
        .unwrap()
        .top1_in_top10pct;
    pass &= katz20 > 0.9;
    notes.push(format!("katz top1-in-top10% at 20%: {katz20:.2}"));
    outcome(pass, notes.join("; "))
}

fn c8_golden_pipeline() -> Outcome {
    let dir = golden();
    let corpus = load_corpus(&dir.join("corpus"), None).unwrap();
    let master = load_master_list(&dir.join("master.txt")).unwrap();
    let ann = load_annotations(&dir.join("annotations")).unwrap();
    let rules = RuleSet::bundled();
    let canon = Canonicalizer::new(CanonConfig::default()).unwrap();
    let cfg = MatchConfig::default();
    let meta: Vec<DocMeta> = corpus.documents.iter().map(DocMeta::from).collect();
    let texts = canonicalize_all(&corpus.documents, &canon);
    let extracted = extract_all(&meta, &texts, &rules);
    let matched = match_all(&extracted, &master, &cfg);
    let clean = evaluate(&evaluation_inputs(&extracted, &matched, &ann), &master, 10, 30, 7).unwrap();
    let clean_ok =
        clean.precision == 1.0 && clean.recall == 1.0 && clean.direct.precision == 1.0 && clean.direct.recall == 1.0;

    const RATE: f64 = 0.02;
    const REPLICATES: usize = 50;
    let mut noisy = Vec::new();
    let mut injected = 0;
    for rep in 0..REPLICATES {
        for (i, (m, ct)) in meta.iter().zip(&texts).enumerate() {
            let (text, truth, n) = inject_year_typos(&ct.text, &ann[&m.doc_id], RATE, 2024, stream_id(i, rep));
            injected += n;
            let ct = CanonicalText { text, ..ct.clone() };
            let ex = extract_one(m, &ct, &rules);
            let matches = batch_match(&ex.mentions, &master, &cfg).0;
            noisy.push(DocumentEvaluation {
                annotations: truth,
                mentions: ex.mentions,
                matches,
                relations: ex.relations,
            });
        }
    }
    let (beta2, beta3) = estimate_extraction_errors(&noisy, &master).unwrap();
    let se = beta3.std_error().unwrap_or(0.0);
    let within = (beta3.mean - RATE).abs() <= 2.0 * se;
    outcome(
        clean_ok && within,
        format!(
            "clean P={} R={}; typo rate {RATE}: beta3 {:.4} (SE {:.4}, {} doc samples, {injected} typos), beta2 {:.4}",
            clean.precision, clean.recall, beta3.mean, se, beta3.n_samples, beta2.mean
        ),
    )
}

fn files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn c9_determinism() -> Outcome {
    let g = golden();
    let run = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_leginet"))
            .arg("pipeline")
            .arg("--corpus")
            .arg(g.join("corpus"))
            .arg("--master")
            .arg(g.join("master.txt"))
            .arg("--annotations")
            .arg(g.join("annotations"))
            .arg("--out")
            .arg(out)
            .args(["--snapshots", "1850,1900,1950,2018", "--seed", "11", "--gexf"])
            .env("LEGINET_LOG", "error")
            .status()
            .unwrap();
        assert!(status.success());
        files(out)
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (fa, fb) = (run(a.path()), run(b.path()));
    let differing: Vec<String> = fa
        .keys()
        .chain(fb.keys())
        .filter(|k| fa.get(*k) != fb.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    outcome(
        differing.is_empty() && !fa.is_empty(),
        format!("{} artifacts compared, differing: {differing:?}", fa.len()),
    )
}

fn main() {
    let criteria: [(u32, &str, Check); 9] = [
        (1, "precision/recall formula", c1_precision_recall),
        (2, "average degree", c2_average_degree),
        (3, "worked OCR match", c3_worked_example),
        (4, "hybrid vs single-measure baselines", c4_hybrid_vs_baselines),
        (5, "oracle suites", c5_oracles),
        (6, "attack vs failure divergence", c6_attack_vs_failure),
        (7, "edge-deletion stability", c7_edge_deletion),
        (8, "golden pipeline and typo rate", c8_golden_pipeline),
        (9, "deterministic artifacts", c9_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let t = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_GAPS.contains(&id) {
            " [known gap]"
        } else {
            ""
        };
        println!(
            "criterion {id} {verdict}: {name}: {} ({:.1}s){note}",
            o.detail,
            t.elapsed().as_secs_f64()
        );
        if !o.pass && !KNOWN_GAPS.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
