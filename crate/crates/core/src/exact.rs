//! Exhaustive ground truth for small instances.
//!
//! All searches share one backtracking engine: edges are colored in order of
//! descending endpoint-degree sum, and a partial assignment is pruned as soon
//! as some vertex carries more than `t` edges of one color or, for linear
//! colorings, an edge would close a monochromatic cycle. Cycle closure is
//! detected with a per-color union-find that is rolled back on backtrack.
//! When every edge has the same list the colors are interchangeable and each
//! edge may only open the next unused color.
//!
//! # Quantifying over all list assignments
//!
//! [`list_linear_colorable_all_lists`] decides whether *every* assignment of
//! size `k` admits a linear coloring. Two reductions make this finite:
//!
//! * a list larger than `k` can be cut down to any `k`-subset, since a
//!   coloring from the smaller lists is also a coloring from the larger ones,
//!   so only lists of size exactly `k` matter;
//! * colorability depends only on which edges share which colors, never on
//!   the color names. `m` lists of size `k` mention at most `k * m` distinct
//!   colors, so a universe of that size realizes every pattern.
//!
//! Assignments are generated up to relabeling: colors are numbered in order
//! of first appearance, and each new list picks some previously seen colors
//! plus a prefix of the unseen ones.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::color::{Color, EdgeColoring, ListAssignment};
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("search budget exceeded")]
    BudgetExceeded,
    #[error("search budget limits must be positive")]
    InvalidBudget,
    #[error("degree bound t must be at least 1")]
    InvalidDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    node_limit: u64,
    time_limit: Duration,
}

impl SearchBudget {
    pub fn new(node_limit: u64, time_limit: Duration) -> Result<Self, ExactError> {
        if node_limit == 0 || time_limit.is_zero() {
            return Err(ExactError::InvalidBudget);
        }
        Ok(Self { node_limit, time_limit })
    }

    pub fn node_limit(&self) -> u64 {
        self.node_limit
    }

    pub fn time_limit(&self) -> Duration {
        self.time_limit
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { node_limit: 500_000_000, time_limit: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Yes(EdgeColoring),
    No,
    BudgetExceeded,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllListsDecision {
    Yes,
    /// An assignment with no linear coloring.
    No(ListAssignment),
    BudgetExceeded,
}

/// Tracks node and wall-clock usage across one or more searches.
#[derive(Debug)]
struct Meter {
    budget: SearchBudget,
    nodes: u64,
    started: Instant,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self { budget, nodes: 0, started: Instant::now() }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            return false;
        }
        !self.nodes.is_multiple_of(1024) || self.started.elapsed() <= self.budget.time_limit
    }
}

/// Does `g` have a coloring from `lists` whose classes are linear forests?
pub fn decide_linear_colorable(g: &Graph, lists: &ListAssignment, budget: SearchBudget) -> Decision {
    run(g, lists, 2, true, &mut Meter::new(budget))
}

/// Does `g` have a coloring from `lists` whose classes have max degree `<= t`?
pub fn decide_degree_t_colorable(
    g: &Graph,
    lists: &ListAssignment,
    t: usize,
    budget: SearchBudget,
) -> Result<Decision, ExactError> {
    if t == 0 {
        return Err(ExactError::InvalidDegree);
    }
    Ok(run(g, lists, t, false, &mut Meter::new(budget)))
}

/// Least number of linear forests covering `g`.
pub fn linear_arboricity(g: &Graph, budget: SearchBudget) -> Result<usize, ExactError> {
    least_colors(g, 2, true, budget)
}

/// Least number of colors in a coloring whose classes have max degree `<= t`.
pub fn chromatic_index_t(g: &Graph, t: usize, budget: SearchBudget) -> Result<usize, ExactError> {
    if t == 0 {
        return Err(ExactError::InvalidDegree);
    }
    least_colors(g, t, false, budget)
}

fn least_colors(g: &Graph, t: usize, acyclic: bool, budget: SearchBudget) -> Result<usize, ExactError> {
    if g.edge_count() == 0 {
        return Ok(0);
    }
    let mut meter = Meter::new(budget);
    // m colors always suffice: one color per edge.
    for k in 1..=g.edge_count() {
        let lists = ListAssignment::uniform(g, 1..=k as Color);
        match run(g, &lists, t, acyclic, &mut meter) {
            Decision::Yes(_) => return Ok(k),
            Decision::No => {}
            Decision::BudgetExceeded => return Err(ExactError::BudgetExceeded),
        }
    }
    unreachable!("one color per edge is always feasible")
}

/// Is `g` linearly colorable from every assignment of `k`-element lists?
///
/// The number of assignments grows quickly; intended for graphs with at most
/// five edges.
pub fn list_linear_colorable_all_lists(g: &Graph, k: usize, budget: SearchBudget) -> AllListsDecision {
    let mut meter = Meter::new(budget);
    let mut lists: Vec<Vec<Color>> = Vec::with_capacity(g.edge_count());
    match enumerate_lists(g, k, 0, &mut lists, &mut meter) {
        Enumerated::AllColorable => AllListsDecision::Yes,
        Enumerated::Counterexample(l) => AllListsDecision::No(l),
        Enumerated::OutOfBudget => AllListsDecision::BudgetExceeded,
    }
}

enum Enumerated {
    AllColorable,
    Counterexample(ListAssignment),
    OutOfBudget,
}

fn enumerate_lists(g: &Graph, k: usize, used: Color, lists: &mut Vec<Vec<Color>>, meter: &mut Meter) -> Enumerated {
    if lists.len() == g.edge_count() {
        let assignment = ListAssignment::new(lists.clone());
        return match run(g, &assignment, 2, true, meter) {
            Decision::Yes(_) => Enumerated::AllColorable,
            Decision::No => Enumerated::Counterexample(assignment),
            Decision::BudgetExceeded => Enumerated::OutOfBudget,
        };
    }
    let max_old = k.min(used as usize);
    for old in 0..=max_old {
        let fresh = (k - old) as Color;
        let mut chosen: Vec<Color> = (0..old as Color).collect();
        loop {
            let mut list = chosen.clone();
            list.extend(used..used + fresh);
            lists.push(list);
            let outcome = enumerate_lists(g, k, used + fresh, lists, meter);
            lists.pop();
            if !matches!(outcome, Enumerated::AllColorable) {
                return outcome;
            }
            if !next_combination(&mut chosen, used) {
                break;
            }
        }
    }
    Enumerated::AllColorable
}

/// Advances a sorted `chosen` subset of `0..universe` to the next one in
/// lexicographic order.
fn next_combination(chosen: &mut [Color], universe: Color) -> bool {
    let r = chosen.len();
    for i in (0..r).rev() {
        if chosen[i] < universe - (r - i) as Color {
            chosen[i] += 1;
            for j in i + 1..r {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Union-find with undo, indexed by `color * n + vertex`.
#[derive(Debug)]
struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    history: Vec<u32>,
}

impl RollbackDsu {
    fn new(len: usize) -> Self {
        Self { parent: (0..len as u32).collect(), size: vec![1; len], history: Vec::new() }
    }

    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    /// Joins the sets of `a` and `b`, which must be distinct.
    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.history.push(rb);
    }

    fn undo(&mut self) {
        let rb = self.history.pop().expect("undo without union");
        let ra = self.parent[rb as usize];
        self.size[ra as usize] -= self.size[rb as usize];
        self.parent[rb as usize] = rb;
    }
}

struct Search<'a> {
    g: &'a Graph,
    order: Vec<EdgeId>,
    allowed: Vec<Vec<u32>>,
    palette: Vec<Color>,
    t: u32,
    interchangeable: bool,
    load: Vec<u32>,
    dsu: Option<RollbackDsu>,
    assignment: Vec<u32>,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

fn run(g: &Graph, lists: &ListAssignment, t: usize, acyclic: bool, meter: &mut Meter) -> Decision {
    let palette = lists.palette();
    let allowed: Vec<Vec<u32>> = lists
        .lists()
        .iter()
        .map(|l| l.iter().map(|c| palette.binary_search(c).unwrap() as u32).collect())
        .collect();
    let n = g.vertex_count();
    let k = palette.len();
    let interchangeable = lists.lists().windows(2).all(|w| w[0] == w[1]);
    let mut order: Vec<EdgeId> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| {
        let (u, v) = g.endpoints(e);
        std::cmp::Reverse(g.degree(u) + g.degree(v))
    });
    let mut search = Search {
        g,
        order,
        allowed,
        palette,
        t: t as u32,
        interchangeable,
        load: vec![0; n * k],
        dsu: acyclic.then(|| RollbackDsu::new(n * k)),
        assignment: vec![u32::MAX; g.edge_count()],
    };
    match search.extend(0, 0, meter) {
        Step::Found => Decision::Yes(EdgeColoring::total(
            search.assignment.iter().map(|&c| search.palette[c as usize]).collect(),
        )),
        Step::Exhausted => Decision::No,
        Step::OutOfBudget => Decision::BudgetExceeded,
    }
}

impl Search<'_> {
    /// `opened` is one more than the largest color index used so far.
    fn extend(&mut self, pos: usize, opened: u32, meter: &mut Meter) -> Step {
        if pos == self.order.len() {
            return Step::Found;
        }
        if !meter.tick() {
            return Step::OutOfBudget;
        }
        let e = self.order[pos];
        let (u, v) = self.g.endpoints(e);
        let n = self.g.vertex_count();
        for i in 0..self.allowed[e].len() {
            let c = self.allowed[e][i];
            if self.interchangeable && c > opened {
                break;
            }
            let (iu, iv) = (c as usize * n + u, c as usize * n + v);
            if self.load[iu] >= self.t || self.load[iv] >= self.t {
                continue;
            }
            if let Some(dsu) = &mut self.dsu {
                if dsu.find(iu as u32) == dsu.find(iv as u32) {
                    continue;
                }
                dsu.union(iu as u32, iv as u32);
            }
            self.load[iu] += 1;
            self.load[iv] += 1;
            self.assignment[e] = c;
            let step = self.extend(pos + 1, opened.max(c + 1), meter);
            self.load[iu] -= 1;
            self.load[iv] -= 1;
            if let Some(dsu) = &mut self.dsu {
                dsu.undo();
            }
            match step {
                Step::Exhausted => {}
                found_or_out => return found_or_out,
            }
        }
        Step::Exhausted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_degree_t, check_linear};

    fn cycle(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &pairs).unwrap()
    }

    fn path(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &pairs).unwrap()
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

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    /// Brute force over every coloring from the lists.
    fn brute_linear(g: &Graph, lists: &ListAssignment) -> bool {
        let m = g.edge_count();
        let mut idx = vec![0usize; m];
        loop {
            let phi = EdgeColoring::total((0..m).map(|e| lists.list(e)[idx[e]]).collect());
            if check_linear(g, Some(lists), &phi).passed() {
                return true;
            }
            let mut i = 0;
            loop {
                if i == m {
                    return false;
                }
                idx[i] += 1;
                if idx[i] < lists.list(i).len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn budget_must_be_positive() {
        assert_eq!(SearchBudget::new(0, Duration::from_secs(1)), Err(ExactError::InvalidBudget));
        assert_eq!(SearchBudget::new(1, Duration::ZERO), Err(ExactError::InvalidBudget));
    }

    #[test]
    fn decide_examples() {
        let c3 = cycle(3);
        assert_eq!(decide_linear_colorable(&c3, &ListAssignment::uniform(&c3, [1]), budget()), Decision::No);
        let l = ListAssignment::uniform(&c3, [1, 2]);
        assert!(brute_linear(&c3, &l));
        match decide_linear_colorable(&c3, &l, budget()) {
            Decision::Yes(phi) => assert!(check_linear(&c3, Some(&l), &phi).passed()),
            other => panic!("expected Yes, got {other:?}"),
        }
        let p4 = path(4);
        assert!(decide_linear_colorable(&p4, &ListAssignment::uniform(&p4, [1]), budget()).is_yes());
    }

    #[test]
    fn decide_with_mixed_lists_matches_brute_force() {
        let g = complete(4);
        let l = ListAssignment::for_graph(&g, vec![vec![1, 2], vec![2, 3], vec![1], vec![3], vec![1, 3], vec![2]]).unwrap();
        assert_eq!(decide_linear_colorable(&g, &l, budget()).is_yes(), brute_linear(&g, &l));
    }

    #[test]
    fn empty_list_is_infeasible() {
        let g = path(3);
        let l = ListAssignment::for_graph(&g, vec![vec![1], vec![]]).unwrap();
        assert_eq!(decide_linear_colorable(&g, &l, budget()), Decision::No);
    }

    #[test]
    fn linear_arboricity_small() {
        assert_eq!(linear_arboricity(&complete(4), budget()), Ok(2));
        assert_eq!(linear_arboricity(&complete(5), budget()), Ok(3));
        assert_eq!(linear_arboricity(&cycle(7), budget()), Ok(2));
        assert_eq!(linear_arboricity(&path(7), budget()), Ok(1));
        assert_eq!(linear_arboricity(&Graph::empty(3), budget()), Ok(0));
    }

    #[test]
    fn chromatic_index_small() {
        assert_eq!(chromatic_index_t(&complete(4), 1, budget()), Ok(3));
        assert_eq!(chromatic_index_t(&cycle(5), 1, budget()), Ok(3));
        assert_eq!(chromatic_index_t(&cycle(5), 2, budget()), Ok(1));
        assert_eq!(chromatic_index_t(&complete(5), 1, budget()), Ok(5));
        assert_eq!(chromatic_index_t(&complete(4), 0, budget()), Err(ExactError::InvalidDegree));
    }

    #[test]
    fn degree_t_witness_verifies() {
        let g = complete(5);
        let l = ListAssignment::uniform(&g, [1, 2]);
        match decide_degree_t_colorable(&g, &l, 2, budget()).unwrap() {
            Decision::Yes(phi) => assert!(check_degree_t(&g, &phi, 2).passed()),
            other => panic!("expected Yes, got {other:?}"),
        }
    }

    #[test]
    fn tiny_budget_is_reported() {
        let tiny = SearchBudget::new(3, Duration::from_secs(10)).unwrap();
        assert_eq!(linear_arboricity(&complete(6), tiny), Err(ExactError::BudgetExceeded));
        let l = ListAssignment::uniform(&complete(6), [1, 2, 3]);
        assert_eq!(decide_linear_colorable(&complete(6), &l, tiny), Decision::BudgetExceeded);
    }

    #[test]
    fn all_lists_examples() {
        assert_eq!(list_linear_colorable_all_lists(&path(3), 1, budget()), AllListsDecision::Yes);
        match list_linear_colorable_all_lists(&cycle(3), 1, budget()) {
            AllListsDecision::No(l) => {
                assert_eq!(l.lists(), &[vec![0], vec![0], vec![0]]);
            }
            other => panic!("expected No, got {other:?}"),
        }
        assert_eq!(list_linear_colorable_all_lists(&cycle(3), 2, budget()), AllListsDecision::Yes);
    }

    #[test]
    fn all_lists_enumeration_is_exhaustive_up_to_relabeling() {
        // For C3 and k = 2, compare against every assignment of 2-subsets of
        // a 6-color universe, without any symmetry reduction.
        let g = cycle(3);
        let pairs: Vec<Vec<Color>> = (0..6).flat_map(|a| (a + 1..6).map(move |b| vec![a, b])).collect();
        for a in &pairs {
            for b in &pairs {
                for c in &pairs {
                    let l = ListAssignment::new(vec![a.clone(), b.clone(), c.clone()]);
                    assert!(brute_linear(&g, &l));
                }
            }
        }
    }

    #[test]
    fn next_combination_walks_all_subsets() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen.len(), 6);
        let mut empty: Vec<Color> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }
}
