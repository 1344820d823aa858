//! Simple undirected graphs with stable vertex and edge indices.
//!
//! Vertices are `0..n`, edges are numbered in insertion order and stored with
//! their endpoints normalized so that `u < v`. Most structural queries accept an
//! [`EdgeSubset`] so they can run on a colour class or any other spanning
//! subgraph without materializing it.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::io::{data_lines, FormatError};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} has degree {degree} > 2 in the subgraph")]
    DegreeExceedsTwo { vertex: VertexId, degree: usize },
}

/// Length of a shortest cycle; forests have infinite girth.
///
/// `Finite(_)` orders below `Infinite`, so `girth >= Girth::Finite(q)` reads
/// naturally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn is_finite(self) -> bool {
        matches!(self, Girth::Finite(_))
    }

    pub fn at_least(self, len: usize) -> bool {
        self >= Girth::Finite(len)
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    /// Builds a simple graph. Pairs may be given in either orientation.
    pub fn new(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut adjacency: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            let (small, other) = if adjacency[u].len() <= adjacency[v].len() { (u, v) } else { (v, u) };
            if adjacency[small].iter().any(|&(w, _)| w == other) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            let id = edges.len();
            edges.push((u, v));
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        Ok(Self { n, edges, adjacency })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new(), adjacency: vec![Vec::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    /// `(neighbor, edge)` pairs incident with `v`.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adjacency[u].iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    pub fn all_edges(&self) -> EdgeSubset {
        EdgeSubset::full(self)
    }

    pub fn girth(&self) -> Girth {
        girth(self, &self.all_edges())
    }

    pub fn is_linear_forest(&self) -> bool {
        is_linear_forest(self, &self.all_edges())
    }

    /// Spanning subgraph on the same vertex set keeping only `subset`.
    ///
    /// Returns the subgraph and, for each of its edges, the parent edge id.
    pub fn spanning_subgraph(&self, subset: &EdgeSubset) -> (Graph, Vec<EdgeId>) {
        let ids: Vec<EdgeId> = subset.iter().collect();
        let pairs: Vec<_> = ids.iter().map(|&e| self.edges[e]).collect();
        let sub = Graph::new(self.n, &pairs).expect("subgraph of a simple graph is simple");
        (sub, ids)
    }

    /// Serializes to the `n m` / `u v` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the text format. `#` lines and blank lines are ignored; every
    /// edge line must satisfy `0 <= u < v < n`.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = data_lines(text);
        let (lineno, header) = lines.next().ok_or_else(|| FormatError::new(0, "missing `n m` header"))?;
        let head = parse_usizes(lineno, header, 2)?;
        let (n, m) = (head[0], head[1]);
        let mut pairs = Vec::with_capacity(m);
        for (lineno, line) in lines {
            if pairs.len() == m {
                return Err(FormatError::new(lineno, format!("more than the declared {m} edges")));
            }
            let uv = parse_usizes(lineno, line, 2)?;
            if !(uv[0] < uv[1] && uv[1] < n) {
                return Err(FormatError::new(lineno, format!("edge `{line}` must satisfy 0 <= u < v < {n}")));
            }
            pairs.push((uv[0], uv[1]));
        }
        if pairs.len() != m {
            return Err(FormatError::new(0, format!("declared {m} edges, found {}", pairs.len())));
        }
        Graph::new(n, &pairs).map_err(|e| FormatError::new(0, e.to_string()))
    }
}

fn parse_usizes(lineno: usize, line: &str, expected: usize) -> Result<Vec<usize>, FormatError> {
    let values: Vec<usize> = line
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| FormatError::new(lineno, format!("`{line}`: {e}")))?;
    if values.len() != expected {
        return Err(FormatError::new(lineno, format!("expected {expected} integers in `{line}`")));
    }
    Ok(values)
}

/// A set of edges of some parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSubset {
    bits: FixedBitSet,
}

impl EdgeSubset {
    pub fn empty(g: &Graph) -> Self {
        Self { bits: FixedBitSet::with_capacity(g.edge_count()) }
    }

    pub fn full(g: &Graph) -> Self {
        let mut bits = FixedBitSet::with_capacity(g.edge_count());
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_edges(g: &Graph, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut s = Self::empty(g);
        for e in edges {
            s.insert(e);
        }
        s
    }

    /// Panics if `e` is not an edge of the parent graph.
    pub fn insert(&mut self, e: EdgeId) {
        assert!(e < self.bits.len(), "edge {e} outside parent graph");
        self.bits.insert(e);
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.bits.contains(e)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits.ones()
    }
}

fn view_degree(g: &Graph, view: &EdgeSubset, v: VertexId) -> usize {
    g.neighbors(v).iter().filter(|&&(_, e)| view.contains(e)).count()
}

/// Shortest cycle length in the subgraph, by BFS from every vertex.
pub fn girth(g: &Graph, view: &EdgeSubset) -> Girth {
    let n = g.vertex_count();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.fill(usize::MAX);
        dist[root] = 0;
        via[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            // Any cycle closed from depth `dist[x]` has length at least `2 * dist[x]`.
            if 2 * dist[x] >= best {
                break;
            }
            for &(y, e) in g.neighbors(x) {
                if !view.contains(e) || e == via[x] {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    via[y] = e;
                    queue.push_back(y);
                } else {
                    best = best.min(dist[x] + dist[y] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

/// Max degree at most two and no cycle.
pub fn is_linear_forest(g: &Graph, view: &EdgeSubset) -> bool {
    (0..g.vertex_count()).all(|v| view_degree(g, view, v) <= 2) && !girth(g, view).is_finite()
}

/// Every cycle of a subgraph whose degrees are all at most two.
///
/// Each cycle is reported once, as its edges in traversal order starting
/// from the cycle's smallest edge id. Cycles are sorted by that edge id.
pub fn cycles_of_degree2_subgraph(g: &Graph, view: &EdgeSubset) -> Result<Vec<Vec<EdgeId>>, GraphError> {
    for v in 0..g.vertex_count() {
        let degree = view_degree(g, view, v);
        if degree > 2 {
            return Err(GraphError::DegreeExceedsTwo { vertex: v, degree });
        }
    }
    let mut seen = vec![false; g.edge_count()];
    let mut cycles = Vec::new();
    for start in view.iter() {
        if seen[start] {
            continue;
        }
        // Walk from one endpoint of `start` until we either return to it or
        // fall off the end of a path.
        let (origin, mut at) = g.endpoints(start);
        let mut walk = vec![start];
        seen[start] = true;
        let mut prev = start;
        let closed = loop {
            if at == origin {
                break true;
            }
            let next = g.neighbors(at).iter().find(|&&(_, e)| e != prev && view.contains(e));
            match next {
                Some(&(w, e)) => {
                    seen[e] = true;
                    walk.push(e);
                    prev = e;
                    at = w;
                }
                None => break false,
            }
        };
        if closed {
            cycles.push(walk);
        } else {
            // Mark the rest of the path component going the other way.
            let mut prev = start;
            let mut at = origin;
            while let Some(&(w, e)) = g.neighbors(at).iter().find(|&&(_, e)| e != prev && view.contains(e)) {
                seen[e] = true;
                prev = e;
                at = w;
            }
        }
    }
    Ok(cycles)
}

/// Some cycle of the subgraph, as a closed edge walk, if one exists.
pub fn find_cycle(g: &Graph, view: &EdgeSubset) -> Option<Vec<EdgeId>> {
    let n = g.vertex_count();
    let mut parent_edge = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, e) in g.neighbors(x) {
                if !view.contains(e) || e == parent_edge[x] {
                    continue;
                }
                if visited[y] {
                    return Some(close_cycle(&parent, &parent_edge, x, y, e));
                }
                visited[y] = true;
                parent[y] = x;
                parent_edge[y] = e;
                stack.push(y);
            }
        }
    }
    None
}

fn close_cycle(parent: &[usize], parent_edge: &[usize], x: VertexId, y: VertexId, closing: EdgeId) -> Vec<EdgeId> {
    let ancestors = |mut v: VertexId| {
        let mut chain = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            chain.push(v);
        }
        chain
    };
    let from_x = ancestors(x);
    let from_y = ancestors(y);
    let lca = *from_x.iter().find(|v| from_y.contains(v)).expect("same DFS tree");
    let mut cycle = Vec::new();
    for &v in from_x.iter().take_while(|&&v| v != lca) {
        cycle.push(parent_edge[v]);
    }
    cycle.reverse();
    cycle.push(closing);
    for &v in from_y.iter().take_while(|&&v| v != lca) {
        cycle.push(parent_edge[v]);
    }
    cycle
}

/// All simple cycles with at most `max_len` edges, each reported once as a
/// closed edge sequence.
pub fn short_cycles(g: &Graph, max_len: usize) -> Vec<Vec<EdgeId>> {
    let mut found = Vec::new();
    if max_len < 3 {
        return found;
    }
    let mut on_path = vec![false; g.vertex_count()];
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for start in 0..g.vertex_count() {
        on_path[start] = true;
        vertices.push(start);
        extend_cycles(g, start, max_len, &mut on_path, &mut vertices, &mut edges, &mut found);
        vertices.pop();
        on_path[start] = false;
    }
    found
}

// Cycles are rooted at their smallest vertex and traversed in the direction
// whose second vertex is smaller than its last, so each is emitted once.
fn extend_cycles(
    g: &Graph,
    start: VertexId,
    max_len: usize,
    on_path: &mut [bool],
    vertices: &mut Vec<VertexId>,
    edges: &mut Vec<EdgeId>,
    found: &mut Vec<Vec<EdgeId>>,
) {
    let at = *vertices.last().unwrap();
    for &(w, e) in g.neighbors(at) {
        if w == start && edges.len() >= 2 && vertices[1] < at {
            let mut cycle = edges.clone();
            cycle.push(e);
            found.push(cycle);
        } else if w > start && !on_path[w] && edges.len() + 1 < max_len {
            on_path[w] = true;
            vertices.push(w);
            edges.push(e);
            extend_cycles(g, start, max_len, on_path, vertices, edges, found);
            edges.pop();
            vertices.pop();
            on_path[w] = false;
        }
    }
}
