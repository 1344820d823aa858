//! Certifying checks for list, proper, degree-`t` and linear colorings.
//!
//! Every check returns a [`VerifyReport`]; a failing report always carries at
//! least one violation with a concrete witness.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::color::{Color, EdgeColoring, ListAssignment};
use crate::graph::{cycles_of_degree2_subgraph, find_cycle, EdgeId, EdgeSubset, Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Uncolored { edge: EdgeId },
    NotInList { edge: EdgeId, color: Color },
    /// `count` edges at `vertex` carry `color`, more than `limit`.
    DegreeExceeded { vertex: VertexId, color: Color, count: usize, limit: usize },
    MonochromaticCycle { color: Color, edges: Vec<EdgeId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncolored { edge } => write!(f, "uncolored edge={edge}"),
            Violation::NotInList { edge, color } => write!(f, "not-in-list edge={edge} color={color}"),
            Violation::DegreeExceeded { vertex, color, count, limit } => {
                write!(f, "degree vertex={vertex} color={color} count={count} limit={limit}")
            }
            Violation::MonochromaticCycle { color, edges } => {
                write!(f, "cycle color={color} edges=")?;
                for (i, e) in edges.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("vertex {vertex} has {count} edges of color {color}; not a degree-2 coloring")]
    NotDegreeTwo { vertex: VertexId, color: Color, count: usize },
    #[error("edge {0} is uncolored")]
    Uncolored(EdgeId),
}

/// Every edge is colored from its own list.
pub fn check_from_lists(g: &Graph, lists: &ListAssignment, phi: &EdgeColoring) -> VerifyReport {
    let mut report = VerifyReport::default();
    for e in 0..g.edge_count() {
        match phi.get(e) {
            None => report.violations.push(Violation::Uncolored { edge: e }),
            Some(c) if !lists.contains(e, c) => report.violations.push(Violation::NotInList { edge: e, color: c }),
            Some(_) => {}
        }
    }
    report
}

/// Every color class is a matching.
pub fn check_proper(g: &Graph, phi: &EdgeColoring) -> VerifyReport {
    check_degree_t(g, phi, 1)
}

/// Every color class has maximum degree at most `t`.
pub fn check_degree_t(g: &Graph, phi: &EdgeColoring, t: usize) -> VerifyReport {
    let mut report = uncolored(g, phi);
    let mut counts: BTreeMap<Color, usize> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        counts.clear();
        for &(_, e) in g.neighbors(v) {
            if let Some(c) = phi.get(e) {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        for (&color, &count) in &counts {
            if count > t {
                report.violations.push(Violation::DegreeExceeded { vertex: v, color, count, limit: t });
            }
        }
    }
    report
}

/// Every color class is a linear forest, and optionally every edge is
/// colored from its list.
pub fn check_linear(g: &Graph, lists: Option<&ListAssignment>, phi: &EdgeColoring) -> VerifyReport {
    let mut report = match lists {
        Some(l) => check_from_lists(g, l, phi),
        None => VerifyReport::default(),
    };
    let degree = check_degree_t(g, phi, 2);
    // Uncolored edges are already reported by the list check.
    report.violations.extend(
        degree
            .violations
            .into_iter()
            .filter(|v| lists.is_none() || !matches!(v, Violation::Uncolored { .. })),
    );
    for (color, class) in color_classes(g, phi) {
        match cycles_of_degree2_subgraph(g, &class) {
            Ok(cycles) => report
                .violations
                .extend(cycles.into_iter().map(|edges| Violation::MonochromaticCycle { color, edges })),
            Err(_) => {
                if let Some(edges) = find_cycle(g, &class) {
                    report.violations.push(Violation::MonochromaticCycle { color, edges });
                }
            }
        }
    }
    report
}

/// All monochromatic cycles of a degree-2 coloring, grouped by ascending color.
pub fn monochromatic_cycles(g: &Graph, phi: &EdgeColoring) -> Result<Vec<(Color, Vec<EdgeId>)>, VerifyError> {
    if let Some(e) = phi.first_uncolored() {
        return Err(VerifyError::Uncolored(e));
    }
    if let Some(Violation::DegreeExceeded { vertex, color, count, .. }) = check_degree_t(g, phi, 2).violations.first() {
        return Err(VerifyError::NotDegreeTwo { vertex: *vertex, color: *color, count: *count });
    }
    let mut out = Vec::new();
    for (color, class) in color_classes(g, phi) {
        let cycles = cycles_of_degree2_subgraph(g, &class).expect("degree checked above");
        out.extend(cycles.into_iter().map(|c| (color, c)));
    }
    Ok(out)
}

fn uncolored(g: &Graph, phi: &EdgeColoring) -> VerifyReport {
    let mut report = VerifyReport::default();
    for e in 0..g.edge_count() {
        if phi.get(e).is_none() {
            report.violations.push(Violation::Uncolored { edge: e });
        }
    }
    report
}

fn color_classes(g: &Graph, phi: &EdgeColoring) -> BTreeMap<Color, EdgeSubset> {
    let mut classes: BTreeMap<Color, EdgeSubset> = BTreeMap::new();
    for e in 0..g.edge_count() {
        if let Some(c) = phi.get(e) {
            classes.entry(c).or_insert_with(|| EdgeSubset::empty(g)).insert(e);
        }
    }
    classes
}
