use std::collections::BTreeMap;

use rand::Rng;

use super::{above, resample, PipelineConfig, PipelineError};
use crate::color::{Color, ListAssignment};
use crate::graph::{EdgeId, EdgeSubset, Graph, VertexId};
use crate::lll::{BadEvent, ResampleStats, UniformChoiceSpace};

/// The hitting edges chosen from a family of disjoint cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBreakPlan {
    /// `S(C)`: the first `min(q_eff, |C|)` edges of each cycle.
    pub windows: Vec<Vec<EdgeId>>,
    /// `e_C`, one per cycle, drawn from its window.
    pub chosen: Vec<EdgeId>,
    /// `H`, the set of chosen edges.
    pub hitting: EdgeSubset,
    pub stats: ResampleStats,
}

/// Reserve color degree of `H` at `v` for `c`: edges of `H` at `v` whose
/// reserve list contains `c`.
pub fn hitting_color_degree(g: &Graph, reserve: &ListAssignment, hitting: &EdgeSubset, v: VertexId, c: Color) -> usize {
    g.neighbors(v).iter().filter(|&&(_, e)| hitting.contains(e) && reserve.contains(e, c)).count()
}

/// Picks one edge from the window of every cycle, resampling until no
/// vertex `v` and color `c` has more than `cfg.theta_hitting` picked edges at
/// `v` with `c` in their reserve list.
pub fn break_cycles<R: Rng + ?Sized>(
    g: &Graph,
    reserve: &ListAssignment,
    cycles: &[Vec<EdgeId>],
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<CycleBreakPlan, PipelineError> {
    let mut seen = EdgeSubset::empty(g);
    for (k, cycle) in cycles.iter().enumerate() {
        if cycle.len() < 3 {
            return Err(PipelineError::PreconditionViolated(format!("cycle {k} has {} edges", cycle.len())));
        }
        for &e in cycle {
            if e >= g.edge_count() {
                return Err(PipelineError::PreconditionViolated(format!("cycle {k}: no edge {e}")));
            }
            if seen.contains(e) {
                return Err(PipelineError::PreconditionViolated(format!("cycles share edge {e}")));
            }
            seen.insert(e);
        }
    }
    let windows: Vec<Vec<EdgeId>> = cycles.iter().map(|c| c[..cfg.q_eff.min(c.len())].to_vec()).collect();

    // For every (v, c): the cycles whose window touches v with c in the
    // reserve list, and the window positions that do so.
    let mut touching: BTreeMap<(VertexId, Color), Vec<(usize, Vec<usize>)>> = BTreeMap::new();
    for (k, window) in windows.iter().enumerate() {
        for (pos, &e) in window.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            for &c in reserve.list(e) {
                for v in [a, b] {
                    let entry = touching.entry((v, c)).or_default();
                    match entry.last_mut() {
                        Some((last, positions)) if *last == k => positions.push(pos),
                        _ => entry.push((k, vec![pos])),
                    }
                }
            }
        }
    }
    let theta = cfg.theta_hitting;
    let events: Vec<BadEvent<'_, usize>> = touching
        .iter()
        .map(|(&(v, c), members)| {
            let scope = members.iter().map(|(k, _)| *k).collect();
            BadEvent::new(format!("A_{v},{c}"), scope, move |x: &[usize]| {
                above(members.iter().filter(|(k, positions)| positions.contains(&x[*k])).count(), theta)
            })
        })
        .collect();
    let space = UniformChoiceSpace::new(windows.iter().map(Vec::len).collect());
    let (choice, stats) = resample(&space, &events, cfg.max_rounds, rng)?;
    let chosen: Vec<EdgeId> = windows.iter().zip(&choice).map(|(w, &i)| w[i]).collect();
    let hitting = EdgeSubset::from_edges(g, chosen.iter().copied());
    for &(v, c) in touching.keys() {
        let degree = hitting_color_degree(g, reserve, &hitting, v, c);
        if above(degree, theta) {
            return Err(PipelineError::VerificationFailed(format!(
                "vertex {v} color {c}: hitting degree {degree} above {theta}"
            )));
        }
    }
    Ok(CycleBreakPlan { windows, chosen, hitting, stats })
}
