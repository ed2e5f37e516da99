//! Undirected weighted graph, edge-list ingestion and structural queries.
//!
//! Graphs are stored in compressed sparse row form with both directions of
//! every edge present and each adjacency list sorted by neighbor index.
//! External node ids are arbitrary tokens remapped to dense indices in order
//! of first appearance.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Graph<T> {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<T>,
    strengths: Vec<T>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    n_edges: usize,
    total_strength: T,
}

impl<T: Scalar> Graph<T> {
    /// Builds a graph over nodes labelled `"0".."n-1"` from an edge list.
    ///
    /// Reciprocal and duplicate pairs are merged by summing weights, self
    /// loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut b = GraphBuilder::with_nodes(n);
        for &(u, v, w) in edges {
            b.add_edge(u, v, w)?;
        }
        Ok(b.build())
    }

    /// Unit-weight convenience wrapper around [`Graph::from_edges`].
    pub fn from_unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let edges: Vec<_> = edges.iter().map(|&(u, v)| (u, v, T::one())).collect();
        Self::from_edges(n, &edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct undirected edges.
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Sum of all node strengths, twice the total edge weight.
    pub fn total_strength(&self) -> T {
        self.total_strength
    }

    pub fn total_weight(&self) -> T {
        self.total_strength / T::of(2.0)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn neighbor_weights(&self, i: usize) -> &[T] {
        &self.weights[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `(neighbor, weight)` pairs of node `i`, ascending by neighbor.
    pub fn adjacency(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.neighbors(i)
            .iter()
            .copied()
            .zip(self.neighbor_weights(i).iter().copied())
    }

    /// Each undirected edge once as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_nodes()).flat_map(move |u| {
            self.adjacency(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Strength `k_i = sum_j a_ij`.
    pub fn degree(&self, i: usize) -> Result<T> {
        self.check_node(i)?;
        Ok(self.strengths[i])
    }

    pub(crate) fn strength(&self, i: usize) -> T {
        self.strengths[i]
    }

    /// Number of distinct neighbors, ignoring weights.
    pub fn unweighted_degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == T::one())
    }

    /// Copy of the graph with every edge weight set to one.
    pub fn binarized(&self) -> Self {
        let mut g = self.clone();
        g.weights.iter_mut().for_each(|w| *w = T::one());
        for i in 0..g.n_nodes() {
            g.strengths[i] = T::of_count(g.unweighted_degree(i));
        }
        g.total_strength = T::of_count(2 * g.n_edges);
        g
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i < self.n_nodes() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                index: i,
                n_nodes: self.n_nodes(),
            })
        }
    }

    /// Subgraph induced by `nodes`, relabelled densely in the given order.
    /// External labels carry over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        let mut local = vec![usize::MAX; self.n_nodes()];
        let mut b = GraphBuilder::new();
        for &i in nodes {
            self.check_node(i)?;
            local[i] = b.add_node(&self.labels[i]);
        }
        for &u in nodes {
            for (v, w) in self.adjacency(u) {
                if u < v && local[v] != usize::MAX {
                    b.add_edge(local[u], local[v], w)?;
                }
            }
        }
        Ok(b.build())
    }

    /// Serializes as `u v w` lines using external labels.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "{} {} {}", self.labels[u], self.labels[v], w);
        }
        out
    }
}

/// Accumulates nodes and edges, then freezes them into a [`Graph`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder<T> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, T)>,
}

impl<T: Scalar> GraphBuilder<T> {
    pub fn new() -> Self {
        Self {
            labels: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
        }
    }

    /// Builder pre-populated with nodes labelled by their index.
    pub fn with_nodes(n: usize) -> Self {
        let mut b = Self::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        b
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    /// Returns the dense index for `label`, allocating one on first sight.
    pub fn add_node(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        i
    }

    /// Adds an undirected edge; self loops are silently dropped.
    pub fn add_edge(&mut self, u: usize, v: usize, w: T) -> Result<()> {
        let n = self.n_nodes();
        for x in [u, v] {
            if x >= n {
                return Err(Error::NodeOutOfRange { index: x, n_nodes: n });
            }
        }
        if !(w > T::zero() && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge weight must be positive and finite, got {w}"
            )));
        }
        if u != v {
            self.edges.push((u.min(v), u.max(v), w));
        }
        Ok(())
    }

    pub fn build(mut self) -> Graph<T> {
        let n = self.labels.len();
        self.edges.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(self.edges.len());
        for (u, v, w) in self.edges {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 = last.2 + w,
                _ => merged.push((u, v, w)),
            }
        }

        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in &merged {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; 2 * merged.len()];
        let mut weights = vec![T::zero(); 2 * merged.len()];
        // Edges are sorted by (u, v) with u < v: filling the lower-index
        // direction first leaves every adjacency list sorted.
        for &(u, v, w) in &merged {
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        for &(u, v, w) in &merged {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
        }
        debug_assert!((0..n).all(|i| targets[offsets[i]..offsets[i + 1]]
            .windows(2)
            .all(|p| p[0] < p[1])));

        let strengths: Vec<T> = (0..n)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().copied().sum())
            .collect();
        let total_strength = strengths.iter().copied().sum();
        Graph {
            offsets,
            targets,
            weights,
            strengths,
            labels: self.labels,
            index: self.index,
            n_edges: merged.len(),
            total_strength,
        }
    }
}

/// Ordered, duplicate-free collection of node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeSet {
    nodes: Vec<usize>,
}

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `i` unless already present. Returns whether it was added.
    pub fn insert(&mut self, i: usize) -> bool {
        if self.nodes.contains(&i) {
            false
        } else {
            self.nodes.push(i);
            true
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.nodes.contains(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().copied()
    }

    /// Sorted copy of the members.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.nodes.clone();
        v.sort_unstable();
        v
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.nodes
    }

    // Callers guarantee uniqueness.
    pub(crate) fn from_unique(nodes: Vec<usize>) -> Self {
        Self { nodes }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut seen = std::collections::HashSet::new();
        Self {
            nodes: iter.into_iter().filter(|&i| seen.insert(i)).collect(),
        }
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` are comments. Data lines hold `u v` or `u v w`.
/// Reciprocal or repeated pairs are summed, self loops dropped, and a
/// missing weight defaults to one.
pub fn parse_edge_list<T: Scalar, R: BufRead>(reader: R) -> Result<Graph<T>> {
    let mut b = GraphBuilder::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(c)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: "expected at least two tokens".into(),
            });
        };
        let w = match tokens.next() {
            None => T::one(),
            Some(tok) => {
                let w: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight {tok:?}"),
                })?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("weight must be positive, got {tok}"),
                    });
                }
                T::of(w)
            }
        };
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "too many tokens".into(),
            });
        }
        let u = b.add_node(a);
        let v = b.add_node(c);
        b.add_edge(u, v, w)?;
    }
    let g = b.build();
    if g.n_edges() == 0 {
        return Err(Error::NoEdges);
    }
    Ok(g)
}

pub fn parse_edge_list_str<T: Scalar>(text: &str) -> Result<Graph<T>> {
    parse_edge_list(text.as_bytes())
}

/// k-core by recursive pruning of nodes with fewer than `k` neighbors,
/// restricted to nodes flagged in `alive`. Degrees ignore weights.
pub fn k_core_within<T: Scalar>(g: &Graph<T>, k: usize, alive: &[bool]) -> Vec<bool> {
    let n = g.n_nodes();
    let mut in_core = alive.to_vec();
    let mut deg: Vec<usize> = (0..n)
        .map(|i| {
            if in_core[i] {
                g.neighbors(i).iter().filter(|&&j| in_core[j]).count()
            } else {
                0
            }
        })
        .collect();
    let mut queue: Vec<usize> = (0..n).filter(|&i| in_core[i] && deg[i] < k).collect();
    for &i in &queue {
        in_core[i] = false;
    }
    while let Some(i) = queue.pop() {
        for &j in g.neighbors(i) {
            if in_core[j] {
                deg[j] -= 1;
                if deg[j] < k {
                    in_core[j] = false;
                    queue.push(j);
                }
            }
        }
    }
    in_core
}

/// Nodes of the `k`-core in ascending index order.
pub fn k_core<T: Scalar>(g: &Graph<T>, k: usize) -> Result<NodeSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mask = k_core_within(g, k, &vec![true; g.n_nodes()]);
    Ok(NodeSet::from_unique(
        (0..g.n_nodes()).filter(|&i| mask[i]).collect(),
    ))
}

/// Nodes within `order` hops of `i` (excluding `i`), in BFS order.
pub fn neighborhood<T: Scalar>(g: &Graph<T>, i: usize, order: usize) -> Result<NodeSet> {
    g.check_node(i)?;
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let mut bfs = Bfs::new(g.n_nodes());
    let mut out = Vec::new();
    bfs.run(g, i, order, |j, _| out.push(j));
    Ok(NodeSet::from_unique(out))
}

/// Reusable bounded breadth-first search.
pub(crate) struct Bfs {
    dist: Vec<usize>,
    touched: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            dist: vec![usize::MAX; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Calls `visit(node, distance)` for each node at distance `1..=max_depth`.
    pub(crate) fn run<T: Scalar>(
        &mut self,
        g: &Graph<T>,
        source: usize,
        max_depth: usize,
        mut visit: impl FnMut(usize, usize),
    ) {
        for &t in &self.touched {
            self.dist[t] = usize::MAX;
        }
        self.touched.clear();
        self.queue.clear();
        self.dist[source] = 0;
        self.touched.push(source);
        self.queue.push_back(source);
        while let Some(u) = self.queue.pop_front() {
            let d = self.dist[u];
            if d == max_depth {
                continue;
            }
            for &v in g.neighbors(u) {
                if self.dist[v] == usize::MAX {
                    self.dist[v] = d + 1;
                    self.touched.push(v);
                    self.queue.push_back(v);
                    visit(v, d + 1);
                }
            }
        }
    }
}

/// Induced subgraph on the nodes of degree at least two, their neighbors,
/// and their neighbors' neighbors.
pub fn extract_core_subgraph<T: Scalar>(g: &Graph<T>) -> Result<Graph<T>> {
    let n = g.n_nodes();
    let mut dist = vec![usize::MAX; n];
    let mut frontier: Vec<usize> = (0..n).filter(|&i| g.unweighted_degree(i) >= 2).collect();
    if frontier.is_empty() {
        return Err(Error::DegenerateGraph);
    }
    for &i in &frontier {
        dist[i] = 0;
    }
    for d in 1..=2 {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = d;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| dist[i] != usize::MAX).collect();
    g.induced_subgraph(&keep)
}
