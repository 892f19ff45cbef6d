//! Simple directed graph with sorted adjacency lists.
//!
//! No self-loops and no parallel edges. Each vertex carries an external id
//! (the master-list node id for legislation networks) that survives
//! subgraph extraction, so centrality vectors can be compared across
//! perturbed copies.

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    ids: Vec<usize>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    edges: usize,
}

impl Digraph {
    /// `n` isolated vertices with ids `0..n`.
    pub fn new(n: usize) -> Self {
        Self::with_ids((0..n).collect())
    }

    pub fn with_ids(ids: Vec<usize>) -> Self {
        let n = ids.len();
        Digraph {
            ids,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds from vertex-index pairs; self-loops and repeats are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n);
        g.extend_edges(edges);
        g
    }

    pub fn extend_edges<I>(&mut self, edges: I)
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        for (u, v) in edges {
            assert!(u < self.ids.len() && v < self.ids.len(), "edge ({u}, {v}) out of range");
            if u != v {
                self.out[u].push(v);
                self.inn[v].push(u);
            }
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        for list in self.out.iter_mut().chain(self.inn.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        self.edges = self.out.iter().map(Vec::len).sum();
    }

    /// Returns true if the edge was new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        let pos = self.out[u].binary_search(&v).unwrap_err();
        self.out[u].insert(pos, v);
        let pos = self.inn[v].binary_search(&u).unwrap_err();
        self.inn[v].insert(pos, u);
        self.edges += 1;
        true
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.inn[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.inn[u].len()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].len()
    }

    pub fn total_degree(&self, u: usize) -> usize {
        self.inn[u].len() + self.out[u].len()
    }

    /// All edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced by the vertices with `keep[v]`; vertex order and
    /// ids are preserved.
    pub fn induced(&self, keep: &[bool]) -> Digraph {
        assert_eq!(keep.len(), self.node_count());
        let mut index = vec![usize::MAX; keep.len()];
        let mut ids = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                index[v] = ids.len();
                ids.push(self.ids[v]);
            }
        }
        let mut g = Digraph::with_ids(ids);
        for (u, v) in self.edges() {
            if keep[u] && keep[v] {
                g.out[index[u]].push(index[v]);
                g.inn[index[v]].push(index[u]);
            }
        }
        g.normalize();
        g
    }

    /// Same vertices with only the edges for which `keep` is true, in
    /// [`Digraph::edges`] order.
    pub fn filter_edges(&self, keep: &[bool]) -> Digraph {
        assert_eq!(keep.len(), self.edge_count());
        let mut g = Digraph::with_ids(self.ids.clone());
        for ((u, v), &k) in self.edges().zip(keep) {
            if k {
                g.out[u].push(v);
                g.inn[v].push(u);
            }
        }
        g.normalize();
        g
    }
}
