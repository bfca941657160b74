//! Graph ingestion, validation, and regularity classification.
//!
//! Everything downstream assumes a finite, simple, connected graph, so those
//! invariants are enforced once, at construction. Vertex ids are compacted to
//! dense 0-based integers; the original labels are retained for reporting.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },
    #[error("line {line}: duplicate undirected edge {u} {v}")]
    DuplicateEdge { line: usize, u: u64, v: u64 },
    #[error("graph is disconnected: vertex {witness} unreachable from vertex {root} (component of size {component_size} out of {n} vertices)")]
    Disconnected {
        root: u64,
        witness: u64,
        component_size: usize,
        n: usize,
    },
    #[error("empty input: no edges found")]
    EmptyInput,
    #[error("line {line}: expected two vertex ids, got {content:?}")]
    MalformedLine { line: usize, content: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("n*d must be even (got n={n}, d={d})")]
    OddStubCount { n: usize, d: usize },
    #[error("need d >= 3 and n > d (got n={n}, d={d})")]
    BadParameters { n: usize, d: usize },
    #[error(
        "no simple connected {d}-regular graph found on {n} vertices after {attempts} attempts"
    )]
    GenerationFailed { n: usize, d: usize, attempts: usize },
}

/// Finite simple connected graph with sorted neighbor lists.
#[derive(Clone, Debug)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    m: usize,
    labels: Vec<u64>,
}

/// Degree-regularity classification.
///
/// Degrees are recorded through the branching parameters: a `Regular` graph
/// is `q+1`-regular, a `Biregular` one has type-`i` vertices of degree
/// `q_i + 1` with `q1 > q0 >= 1`. 2-regular graphs (`q = 1`) and bipartite
/// graphs with equal side degrees do not support the tree theory used here
/// and classify as `Regular` only from degree 3 up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityClass {
    Regular {
        q: usize,
    },
    Biregular {
        q0: usize,
        q1: usize,
        types: Vec<u8>,
    },
    Neither,
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityClass::Regular { q } => write!(f, "regular (q = {q}, degree {})", q + 1),
            RegularityClass::Biregular { q0, q1, .. } => {
                write!(f, "biregular (q0 = {q0}, q1 = {q1})")
            }
            RegularityClass::Neither => write!(f, "neither"),
        }
    }
}

impl Graph {
    /// Build a graph from undirected edges given as label pairs.
    ///
    /// The slice index (0-based) stands in for the input line number in
    /// error reports.
    pub fn from_edges(edges: &[(u64, u64)]) -> Result<Graph, GraphError> {
        let numbered: Vec<(usize, u64, u64)> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (i + 1, u, v))
            .collect();
        Graph::from_numbered_edges(&numbered)
    }

    fn from_numbered_edges(edges: &[(usize, u64, u64)]) -> Result<Graph, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::EmptyInput);
        }
        let mut ids = BTreeMap::new();
        for &(line, u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: u });
            }
            let next = ids.len();
            ids.entry(u).or_insert(next);
            let next = ids.len();
            ids.entry(v).or_insert(next);
        }
        // Dense ids in label order keeps the numbering independent of the
        // edge order in the input.
        let labels: Vec<u64> = ids.keys().copied().collect();
        for (rank, label) in labels.iter().enumerate() {
            ids.insert(*label, rank);
        }
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(line, u, v) in edges {
            let (a, b) = (ids[&u], ids[&v]);
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Graph {
            adjacency,
            m: edges.len(),
            labels,
        };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != n {
            let witness = seen.iter().position(|s| !s).unwrap();
            return Err(GraphError::Disconnected {
                root: self.labels[0],
                witness: self.labels[witness],
                component_size: count,
                n,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Undirected edge count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// Undirected edges as dense-id pairs `(u, v)` with `u < v`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            for &v in &self.adjacency[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Two-coloring if the graph is bipartite: `types[v]` in `{0, 1}`, with
    /// vertex 0 assigned color 0.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.n();
        let mut color = vec![u8::MAX; n];
        color[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
        Some(color)
    }

    /// Edge list rendered back in the canonical text format.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.undirected_edges() {
            out.push_str(&format!("{} {}\n", self.labels[u], self.labels[v]));
        }
        out
    }
}

/// Canonical JSON echo of a graph for reports:
/// `{"n": .., "edges": [[u, v], ..], "class": {..}}` in dense ids.
pub fn graph_echo_json(g: &Graph) -> serde_json::Value {
    let class = match classify(g) {
        RegularityClass::Regular { q } => serde_json::json!({"kind": "regular", "q": q}),
        RegularityClass::Biregular { q0, q1, types } => {
            serde_json::json!({"kind": "biregular", "q0": q0, "q1": q1, "types": types})
        }
        RegularityClass::Neither => serde_json::json!({"kind": "neither"}),
    };
    serde_json::json!({
        "n": g.n(),
        "edges": g.undirected_edges().iter().map(|&(u, v)| serde_json::json!([u, v])).collect::<Vec<_>>(),
        "class": class,
    })
}

/// Parse the line-oriented edge-list format: `u v` per line, `#` starts a
/// comment, blank lines are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let mut it = content.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => {
                let parse = |s: &str| {
                    s.parse::<u64>().map_err(|_| GraphError::MalformedLine {
                        line,
                        content: content.to_string(),
                    })
                };
                (parse(a)?, parse(b)?)
            }
            _ => {
                return Err(GraphError::MalformedLine {
                    line,
                    content: content.to_string(),
                })
            }
        };
        edges.push((line, u, v));
    }
    Graph::from_numbered_edges(&edges)
}

/// Classify by degrees: `Regular` needs a constant degree of at least 3,
/// `Biregular` needs a bipartite graph with side-constant degrees
/// `q1 + 1 > q0 + 1 >= 2`. Bipartite graphs with equal side degrees route
/// to `Regular`.
pub fn classify(g: &Graph) -> RegularityClass {
    let degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let d0 = degrees[0];
    if degrees.iter().all(|&d| d == d0) && d0 >= 3 {
        return RegularityClass::Regular { q: d0 - 1 };
    }
    let Some(colors) = g.bipartition() else {
        return RegularityClass::Neither;
    };
    let mut side_degree = [None, None];
    for v in 0..g.n() {
        let side = colors[v] as usize;
        match side_degree[side] {
            None => side_degree[side] = Some(degrees[v]),
            Some(d) if d == degrees[v] => {}
            Some(_) => return RegularityClass::Neither,
        }
    }
    let (da, db) = match (side_degree[0], side_degree[1]) {
        (Some(a), Some(b)) => (a, b),
        // A single-vertex "side" cannot happen in a connected graph with
        // at least one edge except for n = 1, which has no edges at all.
        _ => return RegularityClass::Neither,
    };
    if da == db || da.min(db) < 2 {
        return RegularityClass::Neither;
    }
    // Type 0 is the smaller-degree side.
    let types: Vec<u8> = if da < db {
        colors
    } else {
        colors.iter().map(|&c| 1 - c).collect()
    };
    RegularityClass::Biregular {
        q0: da.min(db) - 1,
        q1: da.max(db) - 1,
        types,
    }
}

/// Canonical indexing of the `2m` directed edges, lexicographic by
/// `(origin, terminus)`, with the reversal involution.
#[derive(Clone, Debug)]
pub struct DirectedEdgeIndex {
    edges: Vec<(usize, usize)>,
    reversal: Vec<usize>,
    out_start: Vec<usize>,
}

impl DirectedEdgeIndex {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn origin(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn terminus(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn reversal(&self, e: usize) -> usize {
        self.reversal[e]
    }

    /// Ids of the directed edges with origin `v`.
    pub fn out_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.out_start[v]..self.out_start[v + 1]
    }

    /// Number of vertices the index was built over.
    pub fn vertex_count(&self) -> usize {
        self.out_start.len() - 1
    }

    /// Id of the directed edge `(u, v)`.
    pub fn id(&self, u: usize, v: usize) -> Option<usize> {
        let range = self.out_edges(u);
        self.edges[range.clone()]
            .binary_search_by_key(&v, |&(_, t)| t)
            .ok()
            .map(|off| range.start + off)
    }
}

/// Deterministic directed-edge index of a graph.
pub fn directed_edges(g: &Graph) -> DirectedEdgeIndex {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.m());
    let mut out_start = Vec::with_capacity(n + 1);
    for u in 0..n {
        out_start.push(edges.len());
        for &v in g.neighbors(u) {
            edges.push((u, v));
        }
    }
    out_start.push(edges.len());
    let mut index = DirectedEdgeIndex {
        edges,
        reversal: Vec::new(),
        out_start,
    };
    index.reversal = (0..index.len())
        .map(|e| {
            let (u, v) = index.edge(e);
            index.id(v, u).expect("symmetric adjacency")
        })
        .collect();
    index
}

/// For a biregular graph: the `m` undirected edges oriented type-0 to
/// type-1, lexicographic by `(type-0 endpoint, type-1 endpoint)`.
pub fn oriented_edges(g: &Graph, types: &[u8]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(g.m());
    for x in 0..g.n() {
        if types[x] != 0 {
            continue;
        }
        for &y in g.neighbors(x) {
            debug_assert_eq!(types[y], 1);
            out.push((x, y));
        }
    }
    out
}

/// Random simple connected `d`-regular graph on `n` vertices via the
/// configuration model with full rejection of loops, multi-edges, and
/// disconnected outcomes. Deterministic per seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if d < 3 || n <= d {
        return Err(GenError::BadParameters { n, d });
    }
    if !(n * d).is_multiple_of(2) {
        return Err(GenError::OddStubCount { n, d });
    }
    const MAX_ATTEMPTS: usize = 10_000;
    let mut rng = SplitMix64::new(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..MAX_ATTEMPTS {
        rng.shuffle(&mut stubs);
        let mut edges: Vec<(u64, u64)> = Vec::with_capacity(n * d / 2);
        let mut ok = true;
        let mut seen = std::collections::HashSet::new();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                ok = false;
                break;
            }
            edges.push((u as u64, v as u64));
        }
        if !ok {
            continue;
        }
        match Graph::from_edges(&edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected { .. }) => continue,
            Err(e) => unreachable!("rejected earlier: {e}"),
        }
    }
    Err(GenError::GenerationFailed {
        n,
        d,
        attempts: MAX_ATTEMPTS,
    })
}
