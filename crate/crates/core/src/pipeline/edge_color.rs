use rand::seq::SliceRandom;
use rand::Rng;

use super::{PipelineConfig, PipelineError};
use crate::color::{Color, EdgeColoring, ListAssignment};
use crate::exact::{decide_degree_t_colorable, Decision};
use crate::graph::{EdgeId, Graph};

/// Probability of a random move during conflict repair.
const NOISE: f64 = 0.1;

/// A proper edge coloring of `g` from `lists`.
///
/// Randomized greedy, then min-conflicts repair for up to `cfg.max_rounds`
/// steps. If conflicts remain and `g` has at most `cfg.exhaustive_cutoff`
/// edges, exhaustive search settles the instance either way.
pub fn list_edge_color<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<EdgeColoring, PipelineError> {
    if lists.edge_count() != g.edge_count() {
        return Err(PipelineError::PreconditionViolated(format!(
            "{} lists for {} edges",
            lists.edge_count(),
            g.edge_count()
        )));
    }
    if lists.lists().iter().any(Vec::is_empty) {
        return Err(PipelineError::Infeasible);
    }
    let mut state = State::new(g, lists);
    state.greedy(rng);
    state.repair(cfg.max_rounds, rng);
    if state.conflicted.is_empty() {
        return Ok(state.coloring());
    }
    if g.edge_count() <= cfg.exhaustive_cutoff {
        return match decide_degree_t_colorable(g, lists, 1, cfg.budget).expect("t = 1 is valid") {
            Decision::Yes(phi) => Ok(phi),
            Decision::No => Err(PipelineError::Infeasible),
            Decision::BudgetExceeded => Err(PipelineError::SearchBudgetExceeded),
        };
    }
    Err(PipelineError::RoundBudgetExhausted {
        event: format!("{} conflicting edges", state.conflicted.len()),
        rounds: cfg.max_rounds,
    })
}

/// A total, possibly improper coloring over dense color indices.
struct State<'a> {
    g: &'a Graph,
    palette: Vec<Color>,
    /// `lists[e]` as indices into `palette`.
    lists: Vec<Vec<usize>>,
    color: Vec<usize>,
    /// `load[v * palette.len() + c]`: edges at `v` colored `c`.
    load: Vec<u32>,
    usage: Vec<u32>,
    conflicted: Vec<EdgeId>,
    /// Position of each edge in `conflicted`, if present.
    slot: Vec<Option<usize>>,
}

impl<'a> State<'a> {
    fn new(g: &'a Graph, lists: &ListAssignment) -> Self {
        let palette = lists.palette();
        let dense = lists
            .lists()
            .iter()
            .map(|l| l.iter().map(|c| palette.binary_search(c).expect("palette color")).collect())
            .collect();
        let k = palette.len();
        Self {
            g,
            lists: dense,
            color: vec![usize::MAX; g.edge_count()],
            load: vec![0; g.vertex_count() * k],
            usage: vec![0; k],
            conflicted: Vec::new(),
            slot: vec![None; g.edge_count()],
            palette,
        }
    }

    fn at(&self, v: usize, c: usize) -> usize {
        v * self.palette.len() + c
    }

    /// Edges other than `e` at its endpoints that already use `c`.
    fn clashes(&self, e: EdgeId, c: usize) -> u32 {
        let (u, v) = self.g.endpoints(e);
        let own = if self.color[e] == c { 2 } else { 0 };
        self.load[self.at(u, c)] + self.load[self.at(v, c)] - own
    }

    fn assign(&mut self, e: EdgeId, c: usize) {
        let (u, v) = self.g.endpoints(e);
        let old = self.color[e];
        if old != usize::MAX {
            let (iu, iv) = (self.at(u, old), self.at(v, old));
            self.load[iu] -= 1;
            self.load[iv] -= 1;
            self.usage[old] -= 1;
        }
        self.color[e] = c;
        let (iu, iv) = (self.at(u, c), self.at(v, c));
        self.load[iu] += 1;
        self.load[iv] += 1;
        self.usage[c] += 1;
    }

    fn greedy<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut order: Vec<EdgeId> = (0..self.g.edge_count()).collect();
        order.shuffle(rng);
        let mut best = Vec::new();
        for e in order {
            // Least clashes first, then the least used color overall.
            let key = |s: &Self, c: usize| (s.clashes(e, c), s.usage[c]);
            best.clear();
            let mut top = None;
            for &c in &self.lists[e] {
                let k = key(self, c);
                match top {
                    Some(t) if k > t => {}
                    Some(t) if k == t => best.push(c),
                    _ => {
                        top = Some(k);
                        best.clear();
                        best.push(c);
                    }
                }
            }
            let c = *best.choose(rng).expect("nonempty list");
            self.assign(e, c);
        }
        for e in 0..self.g.edge_count() {
            self.refresh(e);
        }
    }

    fn is_conflicted(&self, e: EdgeId) -> bool {
        self.clashes(e, self.color[e]) > 0
    }

    fn refresh(&mut self, e: EdgeId) {
        match (self.is_conflicted(e), self.slot[e]) {
            (true, None) => {
                self.slot[e] = Some(self.conflicted.len());
                self.conflicted.push(e);
            }
            (false, Some(i)) => {
                self.conflicted.swap_remove(i);
                if let Some(&moved) = self.conflicted.get(i) {
                    self.slot[moved] = Some(i);
                }
                self.slot[e] = None;
            }
            _ => {}
        }
    }

    fn repair<R: Rng + ?Sized>(&mut self, steps: usize, rng: &mut R) {
        let mut best = Vec::new();
        for _ in 0..steps {
            if self.conflicted.is_empty() {
                return;
            }
            let e = self.conflicted[rng.gen_range(0..self.conflicted.len())];
            let old = self.color[e];
            let c = if rng.gen_bool(NOISE) {
                *self.lists[e].choose(rng).expect("nonempty list")
            } else {
                best.clear();
                let mut top = u32::MAX;
                for &c in &self.lists[e] {
                    if c == old && self.lists[e].len() > 1 {
                        continue;
                    }
                    let k = self.clashes(e, c);
                    if k < top {
                        top = k;
                        best.clear();
                    }
                    if k == top {
                        best.push(c);
                    }
                }
                *best.choose(rng).expect("nonempty list")
            };
            if c == old {
                continue;
            }
            self.assign(e, c);
            let (u, v) = self.g.endpoints(e);
            for w in [u, v] {
                for &(_, f) in self.g.neighbors(w) {
                    if self.color[f] == old || self.color[f] == c {
                        self.refresh(f);
                    }
                }
            }
        }
    }

    fn coloring(&self) -> EdgeColoring {
        EdgeColoring::total(self.color.iter().map(|&c| self.palette[c]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::rng_from_seed;
    use crate::verify::{check_from_lists, check_proper};

    fn config() -> PipelineConfig {
        PipelineConfig::new(3.0, 0.5).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Graph::new(n, &pairs).unwrap()
    }

    fn assert_proper(g: &Graph, l: &ListAssignment, phi: &EdgeColoring) {
        assert!(check_from_lists(g, l, phi).passed());
        assert!(check_proper(g, phi).passed());
    }

    #[test]
    fn colors_complete_graphs_with_class_one_palettes() {
        // K_{2m} needs 2m - 1 colors, K_{2m+1} needs 2m + 1.
        for (n, k) in [(4, 3), (6, 5), (8, 7), (5, 5), (7, 7)] {
            let g = complete(n);
            let l = ListAssignment::uniform(&g, 1..=k);
            let phi = list_edge_color(&g, &l, &config(), &mut rng_from_seed(n as u64)).unwrap();
            assert_proper(&g, &l, &phi);
        }
    }

    #[test]
    fn too_few_colors_is_infeasible_on_small_graphs() {
        // K4 with 2 colors: every vertex has degree 3.
        let g = complete(4);
        let l = ListAssignment::uniform(&g, [1, 2]);
        let mut cfg = config();
        cfg.max_rounds = 100;
        assert_eq!(list_edge_color(&g, &l, &cfg, &mut rng_from_seed(0)), Err(PipelineError::Infeasible));
    }

    #[test]
    fn too_few_colors_exhausts_on_large_graphs() {
        let g = complete(8);
        let l = ListAssignment::uniform(&g, 1..=6);
        let mut cfg = config();
        cfg.max_rounds = 200;
        assert!(matches!(
            list_edge_color(&g, &l, &cfg, &mut rng_from_seed(0)),
            Err(PipelineError::RoundBudgetExhausted { .. })
        ));
    }

    #[test]
    fn empty_list_is_infeasible() {
        let g = complete(3);
        let l = ListAssignment::new(vec![vec![1], vec![], vec![2]]);
        assert_eq!(list_edge_color(&g, &l, &config(), &mut rng_from_seed(0)), Err(PipelineError::Infeasible));
    }

    #[test]
    fn respects_distinct_lists() {
        let g = complete(5);
        let lists = (0..g.edge_count() as u64).map(|e| (e..e + 6).collect()).collect();
        let l = ListAssignment::for_graph(&g, lists).unwrap();
        let phi = list_edge_color(&g, &l, &config(), &mut rng_from_seed(9)).unwrap();
        assert_proper(&g, &l, &phi);
    }

    #[test]
    fn same_seed_same_coloring() {
        let g = complete(6);
        let l = ListAssignment::uniform(&g, 1..=6);
        let a = list_edge_color(&g, &l, &config(), &mut rng_from_seed(4)).unwrap();
        let b = list_edge_color(&g, &l, &config(), &mut rng_from_seed(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matching_gets_one_color_each() {
        let g = Graph::new(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let l = ListAssignment::new(vec![vec![1], vec![1, 2], vec![7]]);
        let phi = list_edge_color(&g, &l, &config(), &mut rng_from_seed(0)).unwrap();
        assert_proper(&g, &l, &phi);
    }

    #[test]
    fn path_with_one_shared_color_is_infeasible() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let l = ListAssignment::uniform(&g, [1]);
        assert_eq!(list_edge_color(&g, &l, &config(), &mut rng_from_seed(0)), Err(PipelineError::Infeasible));
    }
}
