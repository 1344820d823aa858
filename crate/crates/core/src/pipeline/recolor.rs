use rand::Rng;

use super::{list_edge_color, PipelineConfig, PipelineError, ReserveSplit};
use crate::color::{EdgeColoring, ListAssignment};
use crate::graph::{EdgeSubset, Graph};
use crate::verify::{check_from_lists, check_linear, monochromatic_cycles};

/// Properly recolors the hitting edges `hitting` from their reserve lists
/// and keeps `phi` everywhere else.
///
/// Requires a consistent `split`, `phi` colored from the residual lists with
/// max degree two, and `hitting` meeting every monochromatic cycle of `phi`.
/// The result is verified to be a linear coloring from `lists`.
pub fn recolor_and_merge<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    phi: &EdgeColoring,
    hitting: &EdgeSubset,
    split: &ReserveSplit,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<EdgeColoring, PipelineError> {
    split.check(g, lists).map_err(PipelineError::PreconditionViolated)?;
    let report = check_from_lists(g, &split.residual_lists, phi);
    if !report.passed() {
        return Err(PipelineError::PreconditionViolated(format!("coloring not from residual lists: {report}")));
    }
    let cycles = monochromatic_cycles(g, phi).map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
    if let Some((c, cycle)) = cycles.iter().find(|(_, cycle)| !cycle.iter().any(|&e| hitting.contains(e))) {
        return Err(PipelineError::PreconditionViolated(format!("cycle of color {c} through edge {} is not hit", cycle[0])));
    }

    let (sub, ids) = g.spanning_subgraph(hitting);
    let reserve = split.reserve_lists.restrict(&ids);
    let recolored = list_edge_color(&sub, &reserve, cfg, rng)?;
    let mut psi = phi.clone();
    for (i, &e) in ids.iter().enumerate() {
        psi.set(e, recolored.get(i));
    }
    let report = check_linear(g, Some(lists), &psi);
    if !report.passed() {
        return Err(PipelineError::VerificationFailed(report.to_string()));
    }
    Ok(psi)
}
