//! Slow reference implementations used as test oracles.
#![allow(dead_code)]

use leginet::graph::Digraph;
use leginet::synth::rng_for;
use rand::Rng;

pub const INF: usize = usize::MAX / 4;

pub fn dp_edit(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn random_graph(i: u64) -> Digraph {
    let mut rng = rng_for(77, i);
    let n = rng.gen_range(1..=20);
    let p = rng.gen_range(0.05..0.6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Digraph::from_edges(n, edges)
}

pub fn adjacency(g: &Digraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut a = vec![vec![0; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1;
    }
    a
}

pub fn floyd_warshall(g: &Digraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut d = vec![vec![INF; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every shortest s-t path, found by depth-first search along edges that
/// stay on a geodesic.
pub fn shortest_paths(g: &Digraph, d: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(g: &Digraph, d: &[Vec<usize>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for &v in g.out_neighbors(u) {
            if d[v][t] < INF && d[v][t] + 1 == d[u][t] {
                path.push(v);
                go(g, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t] < INF {
        go(g, d, t, &mut vec![s], &mut out);
    }
    out
}

pub fn mat_mul(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = a.len();
    let mut c = vec![vec![0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Betweenness by enumerating every shortest path between every pair.
pub fn betweenness_by_enumeration(g: &Digraph) -> Vec<f64> {
    let n = g.node_count();
    let d = floyd_warshall(g);
    let mut out = vec![0.0f64; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let paths = shortest_paths(g, &d, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for (v, b) in out.iter_mut().enumerate() {
                if v != s && v != t {
                    *b += paths.iter().filter(|p| p.contains(&v)).count() as f64 / total;
                }
            }
        }
    }
    out
}

/// Local clustering from the diagonal of the cubed symmetrised adjacency matrix.
pub fn clustering_by_matrix_cube(g: &Digraph) -> Vec<f64> {
    let n = g.node_count();
    let a = adjacency(g);
    let s: Vec<Vec<usize>> = (0..n).map(|u| (0..n).map(|v| a[u][v] + a[v][u]).collect()).collect();
    let cube = mat_mul(&mat_mul(&s, &s), &s);
    (0..n)
        .map(|u| {
            let d: usize = (0..n).map(|v| a[u][v] + a[v][u]).sum();
            let b: usize = (0..n).map(|v| a[u][v] * a[v][u]).sum();
            let denom = d * d.saturating_sub(1) - 2 * b;
            if denom == 0 {
                0.0
            } else {
                cube[u][u] as f64 / (2 * denom) as f64
            }
        })
        .collect()
}

/// (reachable ordered pairs, diameter, mean distance) from Floyd-Warshall.
pub fn path_stats_by_floyd_warshall(g: &Digraph) -> (u64, usize, f64) {
    let n = g.node_count();
    let d = floyd_warshall(g);
    let finite: Vec<usize> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .map(|(u, v)| d[u][v])
        .filter(|&x| x < INF)
        .collect();
    let mean = if finite.is_empty() {
        0.0
    } else {
        finite.iter().sum::<usize>() as f64 / finite.len() as f64
    };
    (finite.len() as u64, finite.iter().copied().max().unwrap_or(0), mean)
}

pub fn random_string<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: &[char] = &['a', 'c', 't', 'e', ' ', '1', '9', 'é', '£', 'o'];
    let len = rng.gen_range(0..=24);
    (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}
