//! Failure/attack node removal and random edge deletion experiments.

use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::metrics::{centrality, default_katz_attenuation, path_stats, CentralityVector, Measure};
use crate::synth::{rng_for, stream_id};

pub const DEFAULT_EDGE_LEVELS: [f64; 4] = [0.01, 0.05, 0.10, 0.20];
pub const DEFAULT_EDGE_REPS: usize = 100;
pub const MIN_EDGES_FOR_DELETION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalMode {
    /// Uniformly random nodes.
    Failure,
    /// Highest total degree first.
    Attack,
}

impl RemovalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalMode::Failure => "failure",
            RemovalMode::Attack => "attack",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalPlan {
    pub mode: RemovalMode,
    pub fractions: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl RemovalPlan {
    pub fn new(mode: RemovalMode, fractions: Vec<f64>, reps: usize, seed: u64) -> Result<Self> {
        if fractions.iter().any(|f| !(0.0..1.0).contains(f)) {
            return Err(Error::Config(format!(
                "removal fractions must lie in [0, 1): {fractions:?}"
            )));
        }
        if fractions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config(format!(
                "removal fractions must be ascending: {fractions:?}"
            )));
        }
        if reps == 0 {
            return Err(Error::Config("removal plan needs at least one repetition".into()));
        }
        let reps = match mode {
            RemovalMode::Attack => 1,
            RemovalMode::Failure => reps,
        };
        Ok(RemovalPlan {
            mode,
            fractions,
            reps,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalSample {
    pub fraction: f64,
    pub rep: usize,
    pub removed: usize,
    pub diameter: usize,
    pub avg_path_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalPoint {
    pub fraction: f64,
    pub mean_diameter: f64,
    pub mean_avg_path_length: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalResult {
    pub mode: RemovalMode,
    pub points: Vec<RemovalPoint>,
    pub samples: Vec<RemovalSample>,
}

/// Stream reserved for attack tie-breaking, disjoint from `stream_id` values.
const TIE_STREAM: u64 = u64::MAX;

/// Vertices in attack order: total degree descending, equal degrees in a
/// seeded random order.
pub fn attack_order(g: &Digraph, seed: u64) -> Vec<usize> {
    let n = g.node_count();
    let mut tie: Vec<usize> = (0..n).collect();
    tie.shuffle(&mut rng_for(seed, TIE_STREAM));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(g.total_degree(u)), tie[u]));
    order
}

/// Removes ceil(f * |V|) vertices per fraction and repetition and measures
/// the diameter and average path length of what remains.
pub fn node_removal_experiment(g: &Digraph, plan: &RemovalPlan) -> Result<RemovalResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Precondition("node removal needs a non-empty graph".into()));
    }
    let counts: Vec<usize> = plan.fractions.iter().map(|f| (f * n as f64).ceil() as usize).collect();
    if let Some(pos) = counts.iter().position(|&k| k >= n) {
        return Err(Error::Precondition(format!(
            "fraction {} removes all {n} nodes",
            plan.fractions[pos]
        )));
    }
    let attack = attack_order(g, plan.seed);
    let jobs: Vec<(usize, usize)> = (0..counts.len())
        .flat_map(|level| (0..plan.reps).map(move |rep| (level, rep)))
        .collect();
    let samples: Vec<RemovalSample> = jobs
        .par_iter()
        .map(|&(level, rep)| {
            let k = counts[level];
            let mut keep = vec![true; n];
            match plan.mode {
                RemovalMode::Attack => attack[..k].iter().for_each(|&u| keep[u] = false),
                RemovalMode::Failure => {
                    let mut rng = rng_for(plan.seed, stream_id(level, rep));
                    index::sample(&mut rng, n, k).into_iter().for_each(|u| keep[u] = false);
                }
            }
            let ps = path_stats(&g.induced(&keep));
            RemovalSample {
                fraction: plan.fractions[level],
                rep,
                removed: k,
                diameter: ps.diameter,
                avg_path_length: ps.avg_path_length,
            }
        })
        .collect();
    let points = samples
        .chunks(plan.reps)
        .map(|chunk| RemovalPoint {
            fraction: chunk[0].fraction,
            mean_diameter: chunk.iter().map(|s| s.diameter as f64).sum::<f64>() / chunk.len() as f64,
            mean_avg_path_length: chunk.iter().map(|s| s.avg_path_length).sum::<f64>() / chunk.len() as f64,
            reps: chunk.len(),
        })
        .collect();
    Ok(RemovalResult {
        mode: plan.mode,
        points,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub top1: f64,
    pub top3: f64,
    pub top10pct: f64,
    /// Missing when either vector has zero variance.
    pub pearson: Option<f64>,
    /// Whether the perturbed top node is in the original top 10 percent.
    pub top1_in_top10pct: bool,
}

/// Indices sorted by score descending, ties by node id ascending.
fn ranking(v: &CentralityVector) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.scores.len()).collect();
    idx.sort_by(|&a, &b| {
        v.scores[b]
            .total_cmp(&v.scores[a])
            .then(v.node_ids[a].cmp(&v.node_ids[b]))
    });
    idx
}

fn overlap(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    a.iter().filter(|x| b.contains(x)).count() as f64 / a.len() as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Top-1, top-3 and top-10% agreement plus Pearson correlation between two
/// centrality vectors over the same nodes.
pub fn centrality_agreement(orig: &CentralityVector, pert: &CentralityVector) -> Result<Agreement> {
    if orig.node_ids != pert.node_ids {
        return Err(Error::Precondition(
            "centrality vectors cover different node sets".into(),
        ));
    }
    let n = orig.scores.len();
    if n == 0 {
        return Err(Error::Precondition("centrality vectors are empty".into()));
    }
    let (ro, rp) = (ranking(orig), ranking(pert));
    let max_orig = orig.scores[ro[0]];
    let top1 = if orig.scores[rp[0]] == max_orig { 1.0 } else { 0.0 };
    let k3 = n.min(3);
    let k10 = ((0.1 * n as f64).ceil() as usize).max(1);
    Ok(Agreement {
        top1,
        top3: overlap(&ro[..k3], &rp[..k3]),
        top10pct: overlap(&ro[..k10], &rp[..k10]),
        pearson: pearson(&orig.scores, &pert.scores),
        top1_in_top10pct: ro[..k10].contains(&rp[0]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementSample {
    pub level: f64,
    pub rep: usize,
    pub measure: Measure,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub measure: Measure,
    pub fraction: f64,
    pub top1_retention: f64,
    pub top3_overlap: f64,
    pub top10pct_overlap: f64,
    /// Mean over repetitions with a defined correlation.
    pub pearson: Option<f64>,
    pub top1_in_top10pct: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDeletionResult {
    pub katz_attenuation: f64,
    pub reports: Vec<StabilityReport>,
    pub samples: Vec<AgreementSample>,
}

/// Deletes ceil(f * |E|) random edges per level and repetition and compares
/// each centrality with the original. Katz uses the attenuation chosen for
/// the original graph throughout.
pub fn edge_deletion_experiment(
    g: &Digraph,
    levels: &[f64],
    reps: usize,
    measures: &[Measure],
    seed: u64,
) -> Result<EdgeDeletionResult> {
    let m = g.edge_count();
    if m < MIN_EDGES_FOR_DELETION {
        return Err(Error::Precondition(format!(
            "edge deletion needs at least {MIN_EDGES_FOR_DELETION} edges, graph has {m}"
        )));
    }
    if levels.iter().any(|f| !(0.0..1.0).contains(f)) {
        return Err(Error::Config(format!("deletion levels must lie in [0, 1): {levels:?}")));
    }
    if reps == 0 {
        return Err(Error::Config("edge deletion needs at least one repetition".into()));
    }
    let alpha = default_katz_attenuation(g);
    let originals: Vec<CentralityVector> = measures
        .iter()
        .map(|&ms| centrality(g, ms, Some(alpha)))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..levels.len())
        .flat_map(|level| (0..reps).map(move |rep| (level, rep)))
        .collect();
    let per_job: Vec<Vec<AgreementSample>> = jobs
        .par_iter()
        .map(|&(level, rep)| {
            let k = (levels[level] * m as f64).ceil() as usize;
            let mut keep = vec![true; m];
            let mut rng = rng_for(seed, stream_id(level, rep));
            index::sample(&mut rng, m, k).into_iter().for_each(|e| keep[e] = false);
            let h = g.filter_edges(&keep);
            measures
                .iter()
                .zip(&originals)
                .map(|(&ms, orig)| {
                    let pert = centrality(&h, ms, Some(alpha))?;
                    Ok(AgreementSample {
                        level: levels[level],
                        rep,
                        measure: ms,
                        agreement: centrality_agreement(orig, &pert)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let samples: Vec<AgreementSample> = per_job.into_iter().flatten().collect();

    let mut reports = Vec::new();
    for &level in levels {
        for &ms in measures {
            let group: Vec<&Agreement> = samples
                .iter()
                .filter(|s| s.level == level && s.measure == ms)
                .map(|s| &s.agreement)
                .collect();
            let mean = |f: &dyn Fn(&Agreement) -> f64| group.iter().map(|a| f(a)).sum::<f64>() / group.len() as f64;
            let pearsons: Vec<f64> = group.iter().filter_map(|a| a.pearson).collect();
            reports.push(StabilityReport {
                measure: ms,
                fraction: level,
                top1_retention: mean(&|a| a.top1),
                top3_overlap: mean(&|a| a.top3),
                top10pct_overlap: mean(&|a| a.top10pct),
                pearson: (!pearsons.is_empty()).then(|| pearsons.iter().sum::<f64>() / pearsons.len() as f64),
                top1_in_top10pct: mean(&|a| if a.top1_in_top10pct { 1.0 } else { 0.0 }),
                reps: group.len(),
            });
        }
    }
    Ok(EdgeDeletionResult {
        katz_attenuation: alpha,
        reports,
        samples,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into())
}

pub fn stability_csv(reports: &[StabilityReport]) -> String {
    let mut out = String::from("level,measure,top1,top3,top10pct,pearson,top1_in_top10pct,reps\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{},{:.6},{}",
            r.fraction,
            r.measure.as_str(),
            r.top1_retention,
            r.top3_overlap,
            r.top10pct_overlap,
            opt(r.pearson),
            r.top1_in_top10pct,
            r.reps
        );
    }
    out
}

/// One row per repetition, measure and statistic.
pub fn stability_long_csv(samples: &[AgreementSample]) -> String {
    let mut out = String::from("level,rep,measure,statistic,value\n");
    for s in samples {
        let a = &s.agreement;
        let rows = [
            ("top1", Some(a.top1)),
            ("top3", Some(a.top3)),
            ("top10pct", Some(a.top10pct)),
            ("pearson", a.pearson),
        ];
        for (stat, value) in rows {
            let _ = writeln!(
                out,
                "{},{},{},{stat},{}",
                s.level,
                s.rep,
                s.measure.as_str(),
                opt(value)
            );
        }
    }
    out
}

pub fn removal_csv(results: &[RemovalResult]) -> String {
    let mut out = String::from("mode,fraction,mean_diameter,mean_avg_path_length,reps\n");
    for r in results {
        for p in &r.points {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                r.mode.as_str(),
                p.fraction,
                p.mean_diameter,
                p.mean_avg_path_length,
                p.reps
            );
        }
    }
    out
}

pub fn removal_long_csv(results: &[RemovalResult]) -> String {
    let mut out = String::from("mode,fraction,rep,removed,diameter,avg_path_length\n");
    for r in results {
        for s in &r.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                r.mode.as_str(),
                s.fraction,
                s.rep,
                s.removed,
                s.diameter,
                s.avg_path_length
            );
        }
    }
    out
}
