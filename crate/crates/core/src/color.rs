//! List assignments, edge colorings, color degree and color copying.
//!
//! Colors are opaque non-negative integers. A list assignment stores one
//! sorted, duplicate-free color set per edge of a particular graph; an edge
//! coloring stores an optional color per edge.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::io::{data_lines, FormatError};

pub type Color = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("the graph has no edges")]
    EmptyGraph,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge {0} is uncolored")]
    PartialColoring(EdgeId),
    #[error("assignment covers {found} edges but the graph has {expected}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("copy count must be at least 1")]
    ZeroCopies,
    #[error("color {color} times {t} copies overflows the color space")]
    CopyOverflow { color: Color, t: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
}

impl ListAssignment {
    /// Sorts and deduplicates each list.
    pub fn new(lists: Vec<Vec<Color>>) -> Self {
        let lists = lists
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        Self { lists }
    }

    /// Checks that there is one list per edge of `g`.
    pub fn for_graph(g: &Graph, lists: Vec<Vec<Color>>) -> Result<Self, ColorError> {
        if lists.len() != g.edge_count() {
            return Err(ColorError::EdgeCountMismatch { expected: g.edge_count(), found: lists.len() });
        }
        Ok(Self::new(lists))
    }

    /// Every edge gets the same list.
    pub fn uniform(g: &Graph, colors: impl IntoIterator<Item = Color>) -> Self {
        let list: Vec<Color> = colors.into_iter().collect();
        Self::new(vec![list; g.edge_count()])
    }

    pub fn edge_count(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, e: EdgeId) -> &[Color] {
        &self.lists[e]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn contains(&self, e: EdgeId, c: Color) -> bool {
        self.lists[e].binary_search(&c).is_ok()
    }

    /// Minimum list size over all edges.
    pub fn list_size(&self) -> Result<usize, ColorError> {
        self.lists.iter().map(Vec::len).min().ok_or(ColorError::EmptyGraph)
    }

    /// Union of the lists of the edges at `v`.
    pub fn vertex_list(&self, g: &Graph, v: VertexId) -> Result<Vec<Color>, ColorError> {
        if v >= g.vertex_count() {
            return Err(ColorError::VertexOutOfRange { vertex: v, n: g.vertex_count() });
        }
        let set: BTreeSet<Color> = g.neighbors(v).iter().flat_map(|&(_, e)| self.lists[e].iter().copied()).collect();
        Ok(set.into_iter().collect())
    }

    /// Number of edges at `v` whose list contains `c`.
    pub fn color_degree(&self, g: &Graph, v: VertexId, c: Color) -> usize {
        g.neighbors(v).iter().filter(|&&(_, e)| self.contains(e, c)).count()
    }

    /// Maximum color degree over all vertices and colors; 0 if every list is empty.
    pub fn max_color_degree(&self, g: &Graph) -> usize {
        let mut counts: HashMap<Color, usize> = HashMap::new();
        let mut best = 0;
        for v in 0..g.vertex_count() {
            counts.clear();
            for &(_, e) in g.neighbors(v) {
                for &c in &self.lists[e] {
                    let n = counts.entry(c).or_insert(0);
                    *n += 1;
                    best = best.max(*n);
                }
            }
        }
        best
    }

    /// Sorted union of all lists.
    pub fn palette(&self) -> Vec<Color> {
        let set: BTreeSet<Color> = self.lists.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// The lists of the edges in `ids`, in that order.
    pub fn restrict(&self, ids: &[EdgeId]) -> ListAssignment {
        Self { lists: ids.iter().map(|&e| self.lists[e].clone()).collect() }
    }

    /// Replaces every color `c` with the `t` copies `(c, 1..=t)`.
    pub fn copy_colors(&self, t: u64) -> Result<CopiedLists, ColorError> {
        if t == 0 {
            return Err(ColorError::ZeroCopies);
        }
        let mut lists = Vec::with_capacity(self.lists.len());
        for list in &self.lists {
            let mut copied = Vec::with_capacity(list.len() * t as usize);
            for &c in list {
                for copy in 1..=t {
                    copied.push(CopiedColor { base: c, copy }.encode(t)?);
                }
            }
            lists.push(copied);
        }
        Ok(CopiedLists { lists: ListAssignment::new(lists), copies: t })
    }

    /// Text form: one `u v : c1 c2 ...` line per edge, in edge order.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            write!(out, "{u} {v} :").unwrap();
            for c in &self.lists[e] {
                write!(out, " {c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the list format. Lines may come in any order but must cover
    /// each edge of `g` exactly once.
    pub fn parse(g: &Graph, text: &str) -> Result<Self, FormatError> {
        let mut lists: Vec<Option<Vec<Color>>> = vec![None; g.edge_count()];
        for (lineno, line) in data_lines(text) {
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| FormatError::new(lineno, "expected `u v : colors...`"))?;
            let e = parse_edge(g, lineno, head)?;
            if lists[e].is_some() {
                return Err(FormatError::new(lineno, format!("edge `{}` listed twice", head.trim())));
            }
            let colors: Vec<Color> = tail
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|err| FormatError::new(lineno, format!("bad color: {err}")))?;
            lists[e] = Some(colors);
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(e, l)| l.ok_or_else(|| missing_edge(g, e)))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(lists))
    }
}

fn parse_edge(g: &Graph, lineno: usize, text: &str) -> Result<EdgeId, FormatError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [a, b] = parts[..] else {
        return Err(FormatError::new(lineno, format!("expected two endpoints in `{}`", text.trim())));
    };
    let parse = |s: &str| s.parse::<usize>().map_err(|err| FormatError::new(lineno, format!("bad vertex `{s}`: {err}")));
    let (u, v) = (parse(a)?, parse(b)?);
    if u >= g.vertex_count() || v >= g.vertex_count() {
        return Err(FormatError::new(lineno, format!("vertex out of range in `{u} {v}`")));
    }
    g.edge_between(u, v).ok_or_else(|| FormatError::new(lineno, format!("`{u} {v}` is not an edge of the graph")))
}

fn missing_edge(g: &Graph, e: EdgeId) -> FormatError {
    let (u, v) = g.endpoints(e);
    FormatError::new(0, format!("no entry for edge `{u} {v}`"))
}

/// A copy `(base, copy)` of a color, `copy` in `1..=t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopiedColor {
    pub base: Color,
    pub copy: u64,
}

impl CopiedColor {
    /// Single-integer token `base * t + (copy - 1)`.
    pub fn encode(self, t: u64) -> Result<Color, ColorError> {
        debug_assert!((1..=t).contains(&self.copy));
        self.base
            .checked_mul(t)
            .and_then(|x| x.checked_add(self.copy - 1))
            .ok_or(ColorError::CopyOverflow { color: self.base, t })
    }

    pub fn decode(token: Color, t: u64) -> Self {
        Self { base: token / t, copy: token % t + 1 }
    }
}

/// A list assignment over encoded [`CopiedColor`] tokens with its copy count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopiedLists {
    pub lists: ListAssignment,
    pub copies: u64,
}

impl CopiedLists {
    /// Drops the copy index from every token.
    pub fn strip(&self) -> ListAssignment {
        ListAssignment::new(
            self.lists
                .lists()
                .iter()
                .map(|l| l.iter().map(|&tok| CopiedColor::decode(tok, self.copies).base).collect())
                .collect(),
        )
    }

    /// Maps each copied color back to its base color.
    pub fn merge_colors(&self, phi: &EdgeColoring) -> Result<EdgeColoring, ColorError> {
        let mut merged = Vec::with_capacity(phi.edge_count());
        for e in 0..phi.edge_count() {
            let tok = phi.get(e).ok_or(ColorError::PartialColoring(e))?;
            merged.push(Some(CopiedColor::decode(tok, self.copies).base));
        }
        Ok(EdgeColoring::from_options(merged))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    colors: Vec<Option<Color>>,
}

impl EdgeColoring {
    pub fn uncolored(m: usize) -> Self {
        Self { colors: vec![None; m] }
    }

    pub fn total(colors: Vec<Color>) -> Self {
        Self { colors: colors.into_iter().map(Some).collect() }
    }

    pub fn from_options(colors: Vec<Option<Color>>) -> Self {
        Self { colors }
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn get(&self, e: EdgeId) -> Option<Color> {
        self.colors[e]
    }

    pub fn set(&mut self, e: EdgeId, c: Option<Color>) {
        self.colors[e] = c;
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn first_uncolored(&self) -> Option<EdgeId> {
        self.colors.iter().position(Option::is_none)
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    /// Text form: one `u v c` line per colored edge, in edge order.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if let Some(c) = self.colors[e] {
                writeln!(out, "{u} {v} {c}").unwrap();
            }
        }
        out
    }

    /// Parses `u v c` lines in any order. Edges without a line stay uncolored.
    pub fn parse(g: &Graph, text: &str) -> Result<Self, FormatError> {
        let mut colors = vec![None; g.edge_count()];
        for (lineno, line) in data_lines(text) {
            let (head, c) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| FormatError::new(lineno, "expected `u v c`"))?;
            let e = parse_edge(g, lineno, head)?;
            let c: Color = c.parse().map_err(|err| FormatError::new(lineno, format!("bad color `{c}`: {err}")))?;
            if colors[e].replace(c).is_some() {
                return Err(FormatError::new(lineno, format!("edge `{}` colored twice", head.trim())));
            }
        }
        Ok(Self { colors })
    }
}
