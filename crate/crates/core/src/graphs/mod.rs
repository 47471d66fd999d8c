//! Simple undirected graphs: ingestion, connectivity predicates and the
//! combinatorial oracles used to cross-validate spectral outcomes.
//!
//! Nodes are 0-based internally. Every text format (edge lists, certificates)
//! uses 1-based node labels.

pub mod canon;
pub mod enumerate;
pub mod minor;

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

pub use minor::{has_minor, outerplanar_oracle, OracleError, DEFAULT_ORACLE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one node")]
    Empty,
    #[error("node {node} out of range for a graph on {n} nodes")]
    OutOfRange { node: usize, n: usize },
    #[error("loop at node {0}")]
    Loop(usize),
    #[error("duplicate edge {0}-{1}")]
    Duplicate(usize, usize),
}

/// Errors of the edge-list reader. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing header line \"n m\"")]
    MissingHeader,
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: malformed edge: {reason}")]
    Edge { line: usize, reason: String },
    #[error("header announces {expected} edges but {found} were given")]
    EdgeCount { expected: usize, found: usize },
    #[error("line {line}: node {node} out of range 1..={n}")]
    OutOfRange { line: usize, node: usize, n: usize },
    #[error("line {line}: loop at node {node}")]
    Loop { line: usize, node: usize },
    #[error("line {line}: duplicate edge {i}-{j}")]
    Duplicate { line: usize, i: usize, j: usize },
}

/// A simple undirected graph on nodes `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically;
/// the edge index used throughout the crate is the position in that list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    // sorted (neighbor, edge index) pairs
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(GraphError::OutOfRange { node, n });
                }
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::Duplicate(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for (k, &(i, j)) in list.iter().enumerate() {
            adj[i].push((j, k));
            adj[j].push((i, k));
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Self { n, edges: list, adj })
    }

    /// `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("edgeless graph is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three nodes");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j)));
        Self::new(a + b, edges).expect("complete bipartite graph is simple")
    }

    pub fn star(leaves: usize) -> Self {
        Self::complete_bipartite(1, leaves)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn neighbors(&self, i: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.adj[i].iter().map(|&(j, _)| j)
    }

    /// Neighbors of `i` paired with the index of the connecting edge.
    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let row = self.adj.get(i)?;
        row.binary_search_by(|&(nb, _)| nb.cmp(&j))
            .ok()
            .map(|pos| row[pos].1)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    /// Adjacency bitmasks, one `u32` per node. Panics for `n > 32`.
    pub fn masks(&self) -> Vec<u32> {
        assert!(self.n <= 32, "bitmask view supports at most 32 nodes");
        let mut masks = vec![0u32; self.n];
        for &(i, j) in &self.edges {
            masks[i] |= 1 << j;
            masks[j] |= 1 << i;
        }
        masks
    }

    pub fn from_masks(masks: &[u32]) -> Self {
        let n = masks.len();
        let edges = (0..n).flat_map(|i| {
            (i + 1..n)
                .filter(move |&j| masks[i] >> j & 1 == 1)
                .map(move |j| (i, j))
        });
        Self::new(n, edges).expect("bitmasks describe a simple graph")
    }

    /// Canonical edge-list rendering (1-based, edges sorted, LF endings).
    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
        out
    }

    /// Graph with node `v` removed; nodes above `v` shift down by one.
    pub fn remove_node(&self, v: usize) -> Option<Self> {
        if self.n <= 1 {
            return None;
        }
        let relabel = |x: usize| if x > v { x - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j)| i != v && j != v)
            .map(|&(i, j)| (relabel(i), relabel(j)));
        Some(Self::new(self.n - 1, edges).expect("subgraph of a simple graph is simple"))
    }
}

/// Reads the edge-list format: a header line `n m`, then `m` lines `i j`
/// with 1-based node labels. Blank lines are ignored; an edge may be given
/// in either orientation.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let (n, m) = parse_pair(header).map_err(|reason| ParseError::Header { line: hline, reason })?;
    if n == 0 {
        return Err(ParseError::Header {
            line: hline,
            reason: "node count must be at least 1".into(),
        });
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for (line, body) in lines {
        let (i, j) = parse_pair(body).map_err(|reason| ParseError::Edge { line, reason })?;
        for node in [i, j] {
            if node == 0 || node > n {
                return Err(ParseError::OutOfRange { line, node, n });
            }
        }
        if i == j {
            return Err(ParseError::Loop { line, node: i });
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(ParseError::Duplicate { line, i: key.0, j: key.1 });
        }
        edges.push((key.0 - 1, key.1 - 1));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount { expected: m, found: edges.len() });
    }
    Ok(Graph::new(n, edges).expect("validated above"))
}

fn parse_pair(line: &str) -> Result<(usize, usize), String> {
    let mut tokens = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize, String> {
        let tok = tokens.next().ok_or_else(|| format!("missing {what}"))?;
        tok.parse::<usize>()
            .map_err(|_| format!("{what} {tok:?} is not a nonnegative integer"))
    };
    let a = next("first value")?;
    let b = next("second value")?;
    if let Some(extra) = tokens.next() {
        return Err(format!("unexpected trailing token {extra:?}"));
    }
    Ok((a, b))
}

/// Connected components as sorted node lists, ordered by smallest node.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    components(g).len() == 1
}

/// Smallest node whose removal disconnects a connected graph.
pub fn cut_node(g: &Graph) -> Option<usize> {
    if g.n() < 3 || !is_connected(g) {
        return None;
    }
    (0..g.n()).find(|&v| {
        let h = g.remove_node(v).expect("n >= 3");
        !is_connected(&h)
    })
}

/// Connected, at least three nodes, and no cut node.
pub fn is_biconnected(g: &Graph) -> bool {
    g.n() >= 3 && is_connected(g) && cut_node(g).is_none()
}

/// Node order of `g` if it is a simple path, starting from the smaller
/// endpoint.
pub fn path_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    if n == 1 {
        return Some(vec![0]);
    }
    if g.edge_count() != n - 1 || (0..n).any(|v| g.degree(v) > 2) || !is_connected(g) {
        return None;
    }
    let start = (0..n).find(|&v| g.degree(v) == 1)?;
    let mut order = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        order.push(cur);
        match g.neighbors(cur).find(|&w| w != prev) {
            Some(next) if order.len() < n => {
                prev = cur;
                cur = next;
            }
            _ => break,
        }
    }
    (order.len() == n).then_some(order)
}
