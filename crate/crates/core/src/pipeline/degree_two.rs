use rand::Rng;

use super::{list_edge_color, PipelineConfig, PipelineError};
use crate::color::{EdgeColoring, ListAssignment};
use crate::graph::Graph;
use crate::verify::{check_degree_t, check_from_lists, monochromatic_cycles};

/// A coloring from `lists` in which every color class has max degree two.
///
/// Each color is split into two copies, the copied lists are properly
/// edge colored, and the copies are merged back. Fails verification if a
/// monochromatic cycle shorter than `cfg.q_eff` appears, which cannot happen
/// when every color's support already has girth at least `q_eff`.
pub fn degree_two_coloring<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<EdgeColoring, PipelineError> {
    let copied = lists.copy_colors(2).map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
    let proper = list_edge_color(g, &copied.lists, cfg, rng)?;
    let phi = copied.merge_colors(&proper).map_err(|e| PipelineError::VerificationFailed(e.to_string()))?;
    for report in [check_from_lists(g, lists, &phi), check_degree_t(g, &phi, 2)] {
        if !report.passed() {
            return Err(PipelineError::VerificationFailed(report.to_string()));
        }
    }
    let cycles = monochromatic_cycles(g, &phi).map_err(|e| PipelineError::VerificationFailed(e.to_string()))?;
    if let Some((c, cycle)) = cycles.iter().find(|(_, cycle)| cycle.len() < cfg.q_eff) {
        return Err(PipelineError::VerificationFailed(format!(
            "color {c} has a cycle of length {} < {}",
            cycle.len(),
            cfg.q_eff
        )));
    }
    Ok(phi)
}
