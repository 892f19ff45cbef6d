//! Seeded generators for synthetic graphs, act titles and OCR-style noise.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Digraph;

/// Independent RNG stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for repetition `rep` at level index `level`.
pub fn stream_id(level: usize, rep: usize) -> u64 {
    ((level as u64) << 32) | rep as u64
}

/// Uniform random digraph with exactly `m` distinct non-loop edges.
pub fn gnm_random<R: Rng>(n: usize, m: usize, rng: &mut R) -> Digraph {
    let slots = n * n.saturating_sub(1);
    assert!(m <= slots, "cannot place {m} edges on {n} vertices");
    let edges: Vec<(usize, usize)> = index::sample(rng, slots, m)
        .into_iter()
        .map(|idx| {
            let u = idx / (n - 1);
            let r = idx % (n - 1);
            (u, if r >= u { r + 1 } else { r })
        })
        .collect();
    Digraph::from_edges(n, edges)
}

/// Preferential attachment: each new vertex links to `m` distinct existing
/// vertices picked with probability proportional to degree. Each edge is
/// oriented either way with equal probability, so hubs carry paths in both
/// directions. Starts from a directed cycle on `m + 1` vertices.
pub fn preferential_attachment<R: Rng>(n: usize, m: usize, rng: &mut R) -> Digraph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut edges = Vec::with_capacity(n * m);
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n * m);
    for u in 0..=m {
        let v = (u + 1) % (m + 1);
        edges.push((u, v));
        ends.extend([u, v]);
    }
    let mut picked = BTreeSet::new();
    for new in m + 1..n {
        picked.clear();
        while picked.len() < m {
            picked.insert(ends[rng.gen_range(0..ends.len())]);
        }
        for &old in &picked {
            if rng.gen_bool(0.5) {
                edges.push((new, old));
            } else {
                edges.push((old, new));
            }
            ends.extend([new, old]);
        }
    }
    Digraph::from_edges(n, edges)
}

/// Each vertex linked in both directions to its `k` nearest neighbours on
/// each side of a ring.
pub fn ring_lattice(n: usize, k: usize) -> Digraph {
    assert!(2 * k < n, "ring lattice needs n > 2k");
    Digraph::from_edges(
        n,
        (0..n).flat_map(|u| (1..=k).flat_map(move |d| [(u, (u + d) % n), ((u + d) % n, u)])),
    )
}

/// Ring lattice with each edge's target rewired uniformly with probability `p`.
pub fn watts_strogatz<R: Rng>(n: usize, k: usize, p: f64, rng: &mut R) -> Digraph {
    let lattice = ring_lattice(n, k);
    let mut g = Digraph::new(n);
    for (u, v) in lattice.edges() {
        let mut target = v;
        if rng.gen_bool(p) {
            for _ in 0..n {
                let t = rng.gen_range(0..n);
                if t != u && !g.has_edge(u, t) {
                    target = t;
                    break;
                }
            }
        }
        g.add_edge(u, target);
    }
    g
}

const SUBJECTS: &[&str] = &[
    "land",
    "native",
    "mining",
    "education",
    "health",
    "harbour",
    "harbours",
    "railways",
    "public",
    "works",
    "customs",
    "tariff",
    "dairy",
    "industry",
    "fisheries",
    "shipping",
    "transport",
    "crimes",
    "evidence",
    "justice",
    "police",
    "local",
    "government",
    "electoral",
    "marriage",
    "divorce",
    "companies",
    "trade",
    "marks",
    "patents",
    "copyright",
    "banking",
    "reserve",
    "bank",
    "income",
    "tax",
    "stamp",
    "duties",
    "wildlife",
    "forests",
    "water",
    "soil",
    "conservation",
    "town",
    "planning",
    "housing",
    "rating",
    "valuation",
    "municipal",
    "corporations",
    "counties",
    "roads",
    "bridges",
    "postal",
    "telegraph",
    "defence",
    "military",
    "pensions",
    "social",
    "security",
    "family",
    "benefits",
    "war",
    "maori",
    "affairs",
    "rivers",
    "board",
    "trust",
    "licensing",
    "sale",
    "liquor",
    "gaming",
    "lotteries",
    "animals",
    "protection",
    "births",
    "deaths",
    "registration",
    "property",
    "law",
    "reform",
    "trustee",
    "administration",
    "wills",
    "succession",
    "immigration",
    "restriction",
    "workers",
    "compensation",
    "factories",
    "shops",
    "offices",
    "apprentices",
    "wages",
    "arbitration",
    "conciliation",
    "coal",
    "gold",
    "fields",
];

const SUFFIXES: &[&str] = &["amendment", "validation", "empowering", "extension", "repeal"];

/// `n` distinct lowercase act titles shaped like "<subject words>
/// [suffix] act <year>", sorted alphabetically.
pub fn synthetic_titles<R: Rng>(n: usize, rng: &mut R) -> Vec<String> {
    let mut titles = BTreeSet::new();
    while titles.len() < n {
        let words = rng.gen_range(1..=3);
        let mut t: Vec<&str> = (0..words).map(|_| SUBJECTS[rng.gen_range(0..SUBJECTS.len())]).collect();
        t.dedup();
        if rng.gen_bool(0.3) {
            t.push(SUFFIXES[rng.gen_range(0..SUFFIXES.len())]);
        }
        let year = rng.gen_range(1841..=2018);
        titles.insert(format!("{} act {year}", t.join(" ")));
    }
    titles.into_iter().collect()
}

const LOOKALIKES: &[(char, char)] = &[
    ('e', 'c'),
    ('c', 'e'),
    ('o', '0'),
    ('0', 'o'),
    ('l', '1'),
    ('1', 'l'),
    ('i', 'l'),
    ('l', 'i'),
    ('t', 'l'),
    ('n', 'h'),
    ('h', 'b'),
    ('a', 'o'),
    ('u', 'v'),
    ('v', 'y'),
    ('w', 'v'),
    ('m', 'n'),
    ('5', 's'),
    ('s', '5'),
    ('8', '3'),
    ('3', '8'),
    ('9', 'g'),
    ('r', 'f'),
    ('f', 'r'),
];

fn lookalike<R: Rng>(c: char, rng: &mut R) -> char {
    let options: Vec<char> = LOOKALIKES.iter().filter(|(a, _)| *a == c).map(|&(_, b)| b).collect();
    if options.is_empty() || rng.gen_bool(0.3) {
        let alphabet = b"abcdefghijklmnopqrstuvwxyz0123456789";
        alphabet[rng.gen_range(0..alphabet.len())] as char
    } else {
        options[rng.gen_range(0..options.len())]
    }
}

/// OCR-style noise: each character is independently corrupted with
/// probability `rate` by a substitution (usually a look-alike), deletion,
/// or insertion. Spaces can be dropped, merging words.
pub fn corrupt<R: Rng>(text: &str, rate: f64, rng: &mut R) -> String {
    let mut out = String::with_capacity(text.len() + 4);
    for c in text.chars() {
        if !rng.gen_bool(rate) {
            out.push(c);
            continue;
        }
        match rng.gen_range(0..10) {
            0..=5 if c != ' ' => out.push(lookalike(c, rng)),
            0..=5 => {}
            6 | 7 => {}
            _ => {
                out.push(c);
                out.push(lookalike(c, rng));
            }
        }
    }
    crate::canonicalize::collapse_whitespace(&out)
}

/// Four-digit years that OCR commonly misreads.
pub fn year_typo<R: Rng>(year: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = year.chars().collect();
    let confusions = [('1', 'l'), ('0', 'o'), ('9', 'g'), ('5', 's'), ('8', 'b')];
    let candidates: Vec<usize> = (0..chars.len())
        .filter(|&i| confusions.iter().any(|&(d, _)| d == chars[i]))
        .collect();
    let i = if candidates.is_empty() {
        rng.gen_range(0..chars.len())
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    };
    chars[i] = confusions
        .iter()
        .find(|&&(d, _)| d == chars[i])
        .map(|&(_, l)| l)
        .unwrap_or('l');
    chars.into_iter().collect()
}
