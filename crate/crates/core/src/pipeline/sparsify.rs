use rand::Rng;

use super::{above, below, resample, PipelineConfig, PipelineError};
use crate::color::{Color, ListAssignment};
use crate::graph::{girth, short_cycles, EdgeId, EdgeSubset, Graph};
use crate::lll::{sample, BadEvent, BernoulliSpace, ResampleStats};

/// One Bernoulli trial per edge `e` and color `c ∈ L'(e)`: is `c` kept?
#[derive(Debug, Clone)]
pub struct SparsifyTrials {
    lists: ListAssignment,
    offsets: Vec<usize>,
}

impl SparsifyTrials {
    pub fn new(lists: &ListAssignment) -> Self {
        let mut offsets = Vec::with_capacity(lists.edge_count() + 1);
        let mut total = 0;
        for list in lists.lists() {
            offsets.push(total);
            total += list.len();
        }
        offsets.push(total);
        Self { lists: lists.clone(), offsets }
    }

    fn index(&self, e: EdgeId, c: Color) -> Option<usize> {
        self.lists.list(e).binary_search(&c).ok().map(|pos| self.offsets[e] + pos)
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self, p: f64) -> Result<BernoulliSpace, PipelineError> {
        Ok(BernoulliSpace::uniform(self.len(), p)?)
    }

    /// In order: `A(e)`, too few colors kept on `e`; `B(v, c)`, too many
    /// edges at `v` keep `c`; `D(C, c)`, every edge of a cycle `C` shorter
    /// than `q_eff` keeps `c`.
    pub fn events(&self, g: &Graph, cfg: &PipelineConfig) -> Vec<BadEvent<'static, bool>> {
        let (theta_list, theta_degree) = (cfg.theta_sparse_list, cfg.theta_color_degree);
        let mut events = Vec::new();
        for e in 0..self.lists.edge_count() {
            let scope: Vec<usize> = (self.offsets[e]..self.offsets[e + 1]).collect();
            let reads = scope.clone();
            events.push(BadEvent::new(format!("A_{e}"), scope, move |x: &[bool]| {
                below(reads.iter().filter(|&&i| x[i]).count(), theta_list)
            }));
        }
        for v in 0..g.vertex_count() {
            for c in self.lists.vertex_list(g, v).unwrap_or_default() {
                let scope: Vec<usize> = g.neighbors(v).iter().filter_map(|&(_, e)| self.index(e, c)).collect();
                let reads = scope.clone();
                events.push(BadEvent::new(format!("B_{v},{c}"), scope, move |x: &[bool]| {
                    above(reads.iter().filter(|&&i| x[i]).count(), theta_degree)
                }));
            }
        }
        for (k, cycle) in short_cycles(g, cfg.q_eff - 1).iter().enumerate() {
            for &c in self.lists.list(cycle[0]) {
                let scope: Option<Vec<usize>> = cycle.iter().map(|&f| self.index(f, c)).collect();
                if let Some(scope) = scope {
                    let reads = scope.clone();
                    events.push(BadEvent::new(format!("D_{k},{c}"), scope, move |x: &[bool]| {
                        reads.iter().all(|&i| x[i])
                    }));
                }
            }
        }
        events
    }

    pub fn kept(&self, assignment: &[bool]) -> ListAssignment {
        ListAssignment::new(
            (0..self.lists.edge_count())
                .map(|e| {
                    let base = self.offsets[e];
                    self.lists.list(e).iter().enumerate().filter(|&(i, _)| assignment[base + i]).map(|(_, &c)| c).collect()
                })
                .collect(),
        )
    }

    /// One round of sampling with no resampling.
    pub fn sample<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<ListAssignment, PipelineError> {
        let x = sample(&self.space(p)?, rng);
        Ok(self.kept(&x))
    }
}

/// Every color whose support (the edges listing it) has a cycle shorter
/// than `q`, with that support's girth.
pub fn low_girth_colors(g: &Graph, lists: &ListAssignment, q: usize) -> Vec<(Color, usize)> {
    let mut bad = Vec::new();
    for c in lists.palette() {
        let support = EdgeSubset::from_edges(g, (0..g.edge_count()).filter(|&e| lists.contains(e, c)));
        if let crate::graph::Girth::Finite(len) = girth(g, &support) {
            if len < q {
                bad.push((c, len));
            }
        }
    }
    bad
}

/// Keeps each residual color of each edge with probability `p_sparsify`,
/// resampling until lists stay long, color degrees stay low, and no color's
/// support has a cycle shorter than `q_eff`.
pub fn sparsify_high_girth<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<(ListAssignment, ResampleStats), PipelineError> {
    let trials = SparsifyTrials::new(lists);
    let space = trials.space(cfg.p_sparsify)?;
    let events = trials.events(g, cfg);
    let (x, stats) = resample(&space, &events, cfg.max_rounds, rng)?;
    let kept = trials.kept(&x);
    if let Some(&(c, len)) = low_girth_colors(g, &kept, cfg.q_eff).first() {
        return Err(PipelineError::VerificationFailed(format!(
            "color {c} keeps a cycle of length {len} < {}",
            cfg.q_eff
        )));
    }
    Ok((kept, stats))
}
