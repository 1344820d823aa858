use rand::Rng;

use super::{below, resample, PipelineConfig, PipelineError};
use crate::color::{Color, ListAssignment};
use crate::graph::{Graph, VertexId};
use crate::lll::{sample, BadEvent, BernoulliSpace, ResampleStats};

/// Reserve sets `R(v)` and the two lists they induce on every edge `uv`:
/// `R(e) = L(e) ∩ R(u) ∩ R(v)` and `L'(e) = L(e) \ (R(u) ∪ R(v))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReserveSplit {
    /// Sorted `R(v)` for every vertex.
    pub reserve: Vec<Vec<Color>>,
    pub reserve_lists: ListAssignment,
    pub residual_lists: ListAssignment,
}

impl ReserveSplit {
    /// Derives both edge lists from the reserve sets.
    pub fn from_reserve(g: &Graph, lists: &ListAssignment, mut reserve: Vec<Vec<Color>>) -> Self {
        for r in &mut reserve {
            r.sort_unstable();
            r.dedup();
        }
        let mut reserved = Vec::with_capacity(g.edge_count());
        let mut residual = Vec::with_capacity(g.edge_count());
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let (ru, rv) = (&reserve[u], &reserve[v]);
            let (mut both, mut neither) = (Vec::new(), Vec::new());
            for &c in lists.list(e) {
                match (ru.binary_search(&c).is_ok(), rv.binary_search(&c).is_ok()) {
                    (true, true) => both.push(c),
                    (false, false) => neither.push(c),
                    _ => {}
                }
            }
            reserved.push(both);
            residual.push(neither);
        }
        Self {
            reserve,
            reserve_lists: ListAssignment::new(reserved),
            residual_lists: ListAssignment::new(residual),
        }
    }

    /// Checks that the split is exactly the one induced by `reserve`, which
    /// in particular makes `R(v)` and `L'(v)` disjoint at every vertex.
    pub fn check(&self, g: &Graph, lists: &ListAssignment) -> Result<(), String> {
        if self.reserve.len() != g.vertex_count() {
            return Err(format!("{} reserve sets for {} vertices", self.reserve.len(), g.vertex_count()));
        }
        if self.reserve_lists.edge_count() != g.edge_count() || self.residual_lists.edge_count() != g.edge_count() {
            return Err("split lists do not match the edge count".into());
        }
        let derived = Self::from_reserve(g, lists, self.reserve.clone());
        for v in 0..g.vertex_count() {
            let residual = self.residual_lists.vertex_list(g, v).unwrap_or_default();
            if let Some(c) = residual.iter().find(|c| self.reserve[v].contains(c)) {
                return Err(format!("vertex {v}: color {c} is both reserved and residual"));
            }
        }
        for e in 0..g.edge_count() {
            if self.reserve_lists.list(e) != derived.reserve_lists.list(e) {
                return Err(format!("edge {e}: reserve list is not L(e) ∩ R(u) ∩ R(v)"));
            }
            if self.residual_lists.list(e) != derived.residual_lists.list(e) {
                return Err(format!("edge {e}: residual list is not L(e) \\ (R(u) ∪ R(v))"));
            }
        }
        Ok(())
    }
}

/// One Bernoulli trial per vertex `v` and color `c ∈ L(v)`: is `c ∈ R(v)`?
#[derive(Debug, Clone)]
pub struct ReserveTrials {
    vertex_colors: Vec<Vec<Color>>,
    offsets: Vec<usize>,
    /// For every edge and every `c ∈ L(e)`, the trials of `c` at both ends.
    edge_trials: Vec<Vec<(usize, usize)>>,
}

impl ReserveTrials {
    pub fn new(g: &Graph, lists: &ListAssignment) -> Self {
        let vertex_colors: Vec<Vec<Color>> =
            (0..g.vertex_count()).map(|v| lists.vertex_list(g, v).unwrap_or_default()).collect();
        let mut offsets = Vec::with_capacity(g.vertex_count() + 1);
        let mut total = 0;
        for colors in &vertex_colors {
            offsets.push(total);
            total += colors.len();
        }
        offsets.push(total);
        let mut trials = Self { vertex_colors, offsets, edge_trials: Vec::new() };
        trials.edge_trials = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| lists.list(e).iter().map(|&c| (trials.index(u, c), trials.index(v, c))).collect())
            .collect();
        trials
    }

    fn index(&self, v: VertexId, c: Color) -> usize {
        let pos = self.vertex_colors[v].binary_search(&c).expect("color of an incident edge");
        self.offsets[v] + pos
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

    /// `A_e`: `|R(e)| < theta_reserve` and `B_e`: `|L'(e)| < theta_residual`,
    /// interleaved by edge.
    pub fn events(&self, theta_reserve: f64, theta_residual: f64) -> Vec<BadEvent<'_, bool>> {
        let mut events = Vec::with_capacity(2 * self.edge_trials.len());
        for (e, pairs) in self.edge_trials.iter().enumerate() {
            let scope: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            events.push(BadEvent::new(format!("A_{e}"), scope.clone(), move |x: &[bool]| {
                below(pairs.iter().filter(|&&(a, b)| x[a] && x[b]).count(), theta_reserve)
            }));
            events.push(BadEvent::new(format!("B_{e}"), scope, move |x: &[bool]| {
                below(pairs.iter().filter(|&&(a, b)| !x[a] && !x[b]).count(), theta_residual)
            }));
        }
        events
    }

    pub fn split(&self, g: &Graph, lists: &ListAssignment, assignment: &[bool]) -> ReserveSplit {
        let reserve = (0..g.vertex_count())
            .map(|v| {
                let base = self.offsets[v];
                let colors = &self.vertex_colors[v];
                colors.iter().enumerate().filter(|&(i, _)| assignment[base + i]).map(|(_, &c)| c).collect()
            })
            .collect();
        ReserveSplit::from_reserve(g, lists, reserve)
    }

    /// One round of sampling with no resampling.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        g: &Graph,
        lists: &ListAssignment,
        p: f64,
        rng: &mut R,
    ) -> Result<ReserveSplit, PipelineError> {
        let x = sample(&self.space(p)?, rng);
        Ok(self.split(g, lists, &x))
    }
}

/// Samples reserve sets with probability `p_reserve` per vertex and color,
/// resampling until every edge keeps enough reserve and residual colors.
pub fn reserve_colors<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<(ReserveSplit, ResampleStats), PipelineError> {
    let trials = ReserveTrials::new(g, lists);
    let space = trials.space(cfg.p_reserve)?;
    let events = trials.events(cfg.theta_reserve, cfg.theta_residual);
    let (x, stats) = resample(&space, &events, cfg.max_rounds, rng)?;
    let split = trials.split(g, lists, &x);
    split.check(g, lists).map_err(PipelineError::VerificationFailed)?;
    Ok((split, stats))
}
