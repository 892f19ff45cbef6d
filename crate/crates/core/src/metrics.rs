//! Structural measures over directed graphs: degree, clustering, path
//! statistics, centralities and small-world sigma.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::network::{snapshot_at, LegislationNetwork};
use crate::synth::{gnm_random, rng_for};

/// Sources per accumulation chunk. Fixed so floating-point sums do not
/// depend on the thread count.
const CHUNK: usize = 64;

pub const DEFAULT_KATZ_TOL: f64 = 1e-10;
pub const DEFAULT_KATZ_MAX_ITER: usize = 10_000;
pub const DEFAULT_SIGMA_RANDOM: usize = 50;
/// Attenuation used as a fraction of 1/spectral radius.
pub const KATZ_RADIUS_FRACTION: f64 = 0.85;

pub fn average_degree(g: &Digraph) -> f64 {
    average_degree_counts(g.node_count(), g.edge_count())
}

pub fn average_degree_counts(nodes: usize, edges: usize) -> f64 {
    if nodes == 0 {
        0.0
    } else {
        edges as f64 / nodes as f64
    }
}

/// Mean directed clustering coefficient over all vertices, counting every
/// triangle motif regardless of edge orientation.
pub fn directed_clustering(g: &Digraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    local_directed_clustering(g).iter().sum::<f64>() / n as f64
}

/// Symmetrised neighbourhood: each neighbour with weight 1 or 2 (reciprocal).
fn sym_neighbors(g: &Digraph, u: usize) -> Vec<(usize, u32)> {
    let (out, inn) = (g.out_neighbors(u), g.in_neighbors(u));
    let mut merged = Vec::with_capacity(out.len() + inn.len());
    let (mut i, mut j) = (0, 0);
    while i < out.len() || j < inn.len() {
        match (out.get(i), inn.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                merged.push((a, 2));
                i += 1;
                j += 1;
            }
            (Some(&a), Some(&b)) if a < b => {
                merged.push((a, 1));
                i += 1;
            }
            (Some(&a), None) => {
                merged.push((a, 1));
                i += 1;
            }
            (_, Some(&b)) => {
                merged.push((b, 1));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    merged
}

pub fn local_directed_clustering(g: &Digraph) -> Vec<f64> {
    let n = g.node_count();
    let sym: Vec<Vec<(usize, u32)>> = (0..n).map(|u| sym_neighbors(g, u)).collect();
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![0u32; n],
            |weight, i| {
                let d = g.total_degree(i) as u64;
                let b = sym[i].iter().filter(|&&(_, w)| w == 2).count() as u64;
                let denom = d * d.saturating_sub(1) - 2 * b;
                if denom == 0 {
                    return 0.0;
                }
                for &(j, w) in &sym[i] {
                    weight[j] = w;
                }
                let mut closed = 0u64;
                for &(j, wij) in &sym[i] {
                    for &(k, wjk) in &sym[j] {
                        closed += (wij * wjk * weight[k]) as u64;
                    }
                }
                for &(j, _) in &sym[i] {
                    weight[j] = 0;
                }
                closed as f64 / (2 * denom) as f64
            },
        )
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub avg_path_length: f64,
    pub diameter: usize,
    pub reachable_pairs: u64,
}

fn bfs_distances(g: &Digraph, s: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) -> (u64, u64, usize) {
    dist.iter_mut().for_each(|d| *d = usize::MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    let (mut sum, mut count, mut max) = (0u64, 0u64, 0usize);
    while let Some(u) = queue.pop_front() {
        for &v in g.out_neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                sum += dist[v] as u64;
                count += 1;
                max = max.max(dist[v]);
                queue.push_back(v);
            }
        }
    }
    (sum, count, max)
}

/// Average shortest-path length and diameter over ordered pairs (u, v),
/// u != v, with v reachable from u.
pub fn path_stats(g: &Digraph) -> PathStats {
    let n = g.node_count();
    let (sum, count, max) = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], VecDeque::new()),
            |(dist, queue), s| bfs_distances(g, s, dist, queue),
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)));
    PathStats {
        avg_path_length: if count == 0 { 0.0 } else { sum as f64 / count as f64 },
        diameter: max,
        reachable_pairs: count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Katz,
    Betweenness,
    InDegree,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Katz, Measure::Betweenness, Measure::InDegree];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Katz => "katz",
            Measure::Betweenness => "betweenness",
            Measure::InDegree => "in_degree",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown centrality measure {s:?}"))
    }
}

/// Scores aligned with `node_ids` (the graph's vertex ids).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub measure: Measure,
    pub node_ids: Vec<usize>,
    pub scores: Vec<f64>,
    pub params: BTreeMap<String, f64>,
}

impl CentralityVector {
    pub fn score_of(&self, node_id: usize) -> Option<f64> {
        self.node_ids
            .iter()
            .position(|&id| id == node_id)
            .map(|i| self.scores[i])
    }
}

pub fn in_degree_centrality(g: &Digraph) -> CentralityVector {
    CentralityVector {
        measure: Measure::InDegree,
        node_ids: g.ids().to_vec(),
        scores: (0..g.node_count()).map(|u| g.in_degree(u) as f64).collect(),
        params: BTreeMap::new(),
    }
}

fn is_acyclic(g: &Digraph) -> bool {
    let n = g.node_count();
    let mut indeg: Vec<usize> = (0..n).map(|u| g.in_degree(u)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&u| indeg[u] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in g.out_neighbors(u) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    seen == n
}

/// Upper estimate of the spectral radius of the adjacency matrix. Exactly 0
/// for acyclic graphs; otherwise a Collatz-Wielandt bound from power
/// iteration on A + I, which never underestimates.
pub fn spectral_radius(g: &Digraph) -> f64 {
    let n = g.node_count();
    if n == 0 || is_acyclic(g) {
        return 0.0;
    }
    let mut x = vec![1.0f64; n];
    let mut upper = f64::INFINITY;
    for _ in 0..1000 {
        let y: Vec<f64> = (0..n)
            .map(|u| x[u] + g.in_neighbors(u).iter().map(|&v| x[v]).sum::<f64>())
            .collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in y.iter().zip(&x) {
            let r = a / b;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        upper = upper.min(hi);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo < 1e-9 * hi {
            break;
        }
    }
    upper - 1.0
}

/// Default attenuation: a fixed fraction of 1/spectral radius, or that
/// fraction itself when the radius is zero.
pub fn default_katz_attenuation(g: &Digraph) -> f64 {
    let rho = spectral_radius(g);
    if rho < 1e-12 {
        KATZ_RADIUS_FRACTION
    } else {
        KATZ_RADIUS_FRACTION / rho
    }
}

/// Katz prestige: x = attenuation * A^T x + 1, solved by fixed-point
/// iteration until the max-norm change drops below `tol`.
pub fn katz_prestige(g: &Digraph, attenuation: Option<f64>, tol: f64, max_iter: usize) -> Result<CentralityVector> {
    let alpha = attenuation.unwrap_or_else(|| default_katz_attenuation(g));
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Config(format!(
            "katz attenuation must be finite and non-negative, got {alpha}"
        )));
    }
    let n = g.node_count();
    let mut x = vec![1.0f64; n];
    let mut converged = n == 0;
    for _ in 0..max_iter {
        let next: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|v| 1.0 + alpha * g.in_neighbors(v).iter().map(|&u| x[u]).sum::<f64>())
            .collect();
        let delta = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if !delta.is_finite() {
            break;
        }
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::KatzDivergence {
            attenuation: alpha,
            max_iter,
        });
    }
    let mut params = BTreeMap::new();
    params.insert("attenuation".to_string(), alpha);
    params.insert("tol".to_string(), tol);
    Ok(CentralityVector {
        measure: Measure::Katz,
        node_ids: g.ids().to_vec(),
        scores: x,
        params,
    })
}

fn brandes_from(g: &Digraph, s: usize, ws: &mut BrandesWork, acc: &mut [f64]) {
    let BrandesWork {
        sigma,
        dist,
        delta,
        order,
        queue,
    } = ws;
    sigma.iter_mut().for_each(|v| *v = 0.0);
    dist.iter_mut().for_each(|v| *v = usize::MAX);
    delta.iter_mut().for_each(|v| *v = 0.0);
    order.clear();
    queue.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.out_neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
            if dist[v] == dist[u] + 1 {
                sigma[v] += sigma[u];
            }
        }
    }
    for &w in order.iter().rev() {
        for &v in g.in_neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

struct BrandesWork {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesWork {
    fn new(n: usize) -> Self {
        BrandesWork {
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}

/// Unnormalized directed shortest-path betweenness.
pub fn betweenness(g: &Digraph) -> CentralityVector {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ws = BrandesWork::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                brandes_from(g, s, &mut ws, &mut acc);
            }
            acc
        })
        .collect();
    let mut scores = vec![0.0; n];
    for part in partials {
        for (s, p) in scores.iter_mut().zip(part) {
            *s += p;
        }
    }
    CentralityVector {
        measure: Measure::Betweenness,
        node_ids: g.ids().to_vec(),
        scores,
        params: BTreeMap::new(),
    }
}

pub fn centrality(g: &Digraph, measure: Measure, katz_attenuation: Option<f64>) -> Result<CentralityVector> {
    match measure {
        Measure::Katz => katz_prestige(g, katz_attenuation, DEFAULT_KATZ_TOL, DEFAULT_KATZ_MAX_ITER),
        Measure::Betweenness => Ok(betweenness(g)),
        Measure::InDegree => Ok(in_degree_centrality(g)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallWorld {
    pub sigma: f64,
    pub clustering: f64,
    pub path_length: f64,
    pub random_clustering: f64,
    pub random_path_length: f64,
    /// True when the random graphs had no triangles and the density stood
    /// in for their clustering.
    pub density_fallback: bool,
}

/// Sigma against `n_random` uniform random digraphs with the same vertex
/// and edge counts. Random graph `i` draws from stream `i` of `seed`.
pub fn small_world(g: &Digraph, n_random: usize, seed: u64) -> Result<SmallWorld> {
    let (n, m) = (g.node_count(), g.edge_count());
    if m == 0 {
        return Err(Error::Precondition("small-world sigma needs at least one edge".into()));
    }
    if n_random == 0 {
        return Err(Error::Config(
            "small-world sigma needs at least one random graph".into(),
        ));
    }
    let samples: Vec<(f64, f64)> = (0..n_random)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let r = gnm_random(n, m, &mut rng);
            (directed_clustering(&r), path_stats(&r).avg_path_length)
        })
        .collect();
    let c_rand_raw = samples.iter().map(|s| s.0).sum::<f64>() / n_random as f64;
    let l_rand = samples.iter().map(|s| s.1).sum::<f64>() / n_random as f64;
    let density_fallback = c_rand_raw == 0.0;
    let c_rand = if density_fallback {
        m as f64 / (n as f64 * (n as f64 - 1.0))
    } else {
        c_rand_raw
    };
    let c = directed_clustering(g);
    let l = path_stats(g).avg_path_length;
    Ok(SmallWorld {
        sigma: (c / c_rand) / (l / l_rand),
        clustering: c,
        path_length: l,
        random_clustering: c_rand,
        random_path_length: l_rand,
        density_fallback,
    })
}

pub fn small_world_sigma(g: &Digraph, n_random: usize, seed: u64) -> Result<f64> {
    small_world(g, n_random, seed).map(|s| s.sigma)
}

pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "and", "as", "at", "by", "for", "from", "in", "into", "no", "of", "on", "or", "the", "to", "with",
];

/// Term counts over the titles of the `top_k` highest-scoring nodes.
/// Stopwords, "act" and four-digit years are dropped. Sorted by count
/// descending, then term.
pub fn frequent_terms(
    net: &LegislationNetwork,
    cent: &CentralityVector,
    top_k: usize,
    stopwords: &[&str],
) -> Vec<(String, usize)> {
    let mut ranked: Vec<(usize, f64)> = cent.node_ids.iter().copied().zip(cent.scores.iter().copied()).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (id, _) in ranked.into_iter().take(top_k) {
        let Some(node) = net.node(id) else { continue };
        for term in node.title.split(|c: char| c.is_whitespace() || c == '(' || c == ')') {
            let is_year = term.len() == 4 && term.bytes().all(|b| b.is_ascii_digit());
            if term.is_empty() || term == "act" || is_year || stopwords.contains(&term) {
                continue;
            }
            *counts.entry(term.to_string()).or_default() += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    pub end_year: i32,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_degree: f64,
    pub avg_path_length: f64,
    pub directed_cc: f64,
    pub diameter: usize,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_degree: f64,
    pub avg_path_length: f64,
    pub directed_cc: f64,
    pub diameter: usize,
    pub sigma: Option<f64>,
    pub seed: u64,
    pub n_random: usize,
    pub snapshots: Vec<SnapshotMetrics>,
}

fn measure_graph(g: &Digraph, end_year: i32, n_random: usize, seed: u64) -> SnapshotMetrics {
    let ps = path_stats(g);
    SnapshotMetrics {
        end_year,
        n_nodes: g.node_count(),
        n_edges: g.edge_count(),
        avg_degree: average_degree(g),
        avg_path_length: ps.avg_path_length,
        directed_cc: directed_clustering(g),
        diameter: ps.diameter,
        sigma: small_world_sigma(g, n_random, seed).ok(),
    }
}

/// Measures the whole network and each cumulative snapshot. Snapshot years
/// must be strictly ascending.
pub fn metrics_report(
    net: &LegislationNetwork,
    snapshot_years: &[i32],
    n_random: usize,
    seed: u64,
) -> Result<MetricsReport> {
    if snapshot_years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "snapshot years must be strictly ascending: {snapshot_years:?}"
        )));
    }
    let whole = measure_graph(&net.to_digraph(), net.max_timestamp().unwrap_or(0), n_random, seed);
    let snapshots = snapshot_years
        .iter()
        .map(|&y| measure_graph(&snapshot_at(net, y).to_digraph(), y, n_random, seed))
        .collect();
    Ok(MetricsReport {
        n_nodes: whole.n_nodes,
        n_edges: whole.n_edges,
        avg_degree: whole.avg_degree,
        avg_path_length: whole.avg_path_length,
        directed_cc: whole.directed_cc,
        diameter: whole.diameter,
        sigma: whole.sigma,
        seed,
        n_random,
        snapshots,
    })
}

/// One row per snapshot; an undefined sigma is written as `NA`.
pub fn snapshot_csv(report: &MetricsReport) -> String {
    let mut out = String::from("end_year,n_nodes,n_edges,avg_degree,avg_path_length,directed_cc,diameter,sigma\n");
    for s in &report.snapshots {
        let sigma = s.sigma.map(|v| format!("{v:.6}")).unwrap_or_else(|| "NA".into());
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{},{}",
            s.end_year, s.n_nodes, s.n_edges, s.avg_degree, s.avg_path_length, s.directed_cc, s.diameter, sigma
        );
    }
    out
}

pub fn centrality_csv(vectors: &[CentralityVector]) -> String {
    let mut out = String::from("node_id");
    for v in vectors {
        out.push(',');
        out.push_str(v.measure.as_str());
    }
    out.push('\n');
    let Some(first) = vectors.first() else { return out };
    for (i, id) in first.node_ids.iter().enumerate() {
        let _ = write!(out, "{id}");
        for v in vectors {
            let _ = write!(out, ",{:.9}", v.scores[i]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Digraph {
        Digraph::from_edges(n, (0..n).flat_map(|u| (0..n).map(move |v| (u, v))))
    }

    #[test]
    fn average_degree_values() {
        assert_eq!(average_degree(&Digraph::new(0)), 0.0);
        assert_eq!(format!("{:.3}", average_degree_counts(16385, 137751)), "8.407");
        assert_eq!(format!("{:.3}", average_degree_counts(16199, 130969)), "8.085");
    }

    #[test]
    fn clustering_examples() {
        assert!((directed_clustering(&complete(4)) - 1.0).abs() < 1e-12);
        let cycle = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert!((directed_clustering(&cycle) - 0.5).abs() < 1e-12);
        assert_eq!(directed_clustering(&Digraph::new(5)), 0.0);
    }

    #[test]
    fn path_examples() {
        let p = path_stats(&Digraph::from_edges(3, [(0, 1), (1, 2)]));
        assert!((p.avg_path_length - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.diameter, 2);
        let e = path_stats(&Digraph::from_edges(2, [(0, 1)]));
        assert_eq!((e.avg_path_length, e.diameter), (1.0, 1));
        let z = path_stats(&Digraph::new(4));
        assert_eq!((z.avg_path_length, z.diameter), (0.0, 0));
    }

    #[test]
    fn katz_examples() {
        let k = katz_prestige(&Digraph::new(3), None, 1e-12, 100).unwrap();
        assert_eq!(k.scores, vec![1.0; 3]);
        let k = katz_prestige(&Digraph::from_edges(2, [(0, 1)]), Some(0.1), 1e-12, 100).unwrap();
        assert!((k.scores[0] - 1.0).abs() < 1e-12 && (k.scores[1] - 1.1).abs() < 1e-12);
        let star = Digraph::from_edges(6, (1..6).map(|s| (s, 0)));
        let k = katz_prestige(&star, None, 1e-12, 100).unwrap();
        assert!(k.scores[1..].iter().all(|&s| s < k.scores[0]));
    }

    #[test]
    fn katz_divergence_names_attenuation() {
        let cycle = Digraph::from_edges(2, [(0, 1), (1, 0)]);
        let err = katz_prestige(&cycle, Some(2.0), 1e-9, 50).unwrap_err();
        assert!(err.to_string().contains('2'), "{err}");
    }

    #[test]
    fn spectral_radius_of_cycle_is_one() {
        let cycle = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!((spectral_radius(&cycle) - 1.0).abs() < 1e-6);
        let k4 = complete(4);
        assert!((spectral_radius(&k4) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn betweenness_examples() {
        let b = betweenness(&Digraph::from_edges(3, [(0, 1), (1, 2)]));
        assert_eq!(b.scores, vec![0.0, 1.0, 0.0]);
        assert!(betweenness(&complete(5)).scores.iter().all(|&s| s == 0.0));
        assert!(betweenness(&Digraph::new(3)).scores.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn in_degree_example() {
        let g = Digraph::from_edges(3, [(0, 1), (2, 1)]);
        assert_eq!(in_degree_centrality(&g).scores, vec![0.0, 2.0, 0.0]);
    }

    #[test]
    fn sigma_needs_edges() {
        assert!(small_world_sigma(&Digraph::new(3), 5, 1).is_err());
    }

    #[test]
    fn sigma_is_reproducible() {
        let g = Digraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)]);
        let a = small_world_sigma(&g, 10, 42).unwrap();
        let b = small_world_sigma(&g, 10, 42).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    fn titled(titles: &[&str]) -> LegislationNetwork {
        use crate::network::NodeRecord;
        LegislationNetwork::from_parts(
            titles.iter().enumerate().map(|(i, t)| NodeRecord {
                node_id: i,
                title: t.to_string(),
                year: Some(1900),
            }),
            [],
            false,
        )
        .unwrap()
    }

    #[test]
    fn frequent_terms_rules() {
        let net = titled(&[
            "land act 1900",
            "native land act 1909",
            "the land transfer act 1885",
            "fencing act 1978",
        ]);
        let cent = CentralityVector {
            measure: Measure::InDegree,
            node_ids: vec![0, 1, 2, 3],
            scores: vec![3.0, 2.0, 1.0, 0.0],
            params: BTreeMap::new(),
        };
        let terms = frequent_terms(&net, &cent, 3, DEFAULT_STOPWORDS);
        assert_eq!(terms[0], ("land".to_string(), 3));
        assert_eq!(terms[1..], [("native".to_string(), 1), ("transfer".to_string(), 1)]);
        assert!(frequent_terms(&net, &cent, 0, DEFAULT_STOPWORDS).is_empty());
    }

    #[test]
    fn snapshot_csv_has_one_row_per_year() {
        let net = titled(&["a act 1900"]);
        let report = metrics_report(&net, &[1850, 1900, 2018], 2, 1).unwrap();
        let csv = snapshot_csv(&report);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().ends_with(",NA"));
        assert!(metrics_report(&net, &[1900, 1850], 2, 1).is_err());
    }
}
