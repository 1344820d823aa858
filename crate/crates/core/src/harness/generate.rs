use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::HarnessError;
use crate::color::{Color, ListAssignment};
use crate::graph::{Graph, VertexId};
use crate::lll::rng_from_seed;

/// Restarts allowed before random-regular generation gives up.
pub const REGULAR_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFamily {
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    Cycle { n: usize },
    Path { n: usize },
    RandomRegular { n: usize, d: usize },
}

/// Builds a member of `family`; only random-regular graphs depend on `seed`.
pub fn gen_graph(family: GraphFamily, seed: u64) -> Result<Graph, HarnessError> {
    let invalid = |msg: String| Err(HarnessError::InvalidParams(msg));
    let mut pairs = Vec::new();
    let n = match family {
        GraphFamily::Complete { n } => {
            if n == 0 {
                return invalid("complete graph needs n >= 1".into());
            }
            for u in 0..n {
                pairs.extend((u + 1..n).map(|v| (u, v)));
            }
            n
        }
        GraphFamily::CompleteBipartite { a, b } => {
            if a == 0 || b == 0 {
                return invalid("complete bipartite graph needs both sides nonempty".into());
            }
            for u in 0..a {
                pairs.extend((a..a + b).map(|v| (u, v)));
            }
            a + b
        }
        GraphFamily::Cycle { n } => {
            if n < 3 {
                return invalid(format!("cycle needs n >= 3, got {n}"));
            }
            pairs.extend((0..n).map(|i| (i, (i + 1) % n)));
            n
        }
        GraphFamily::Path { n } => {
            if n == 0 {
                return invalid("path needs n >= 1".into());
            }
            pairs.extend((1..n).map(|i| (i - 1, i)));
            n
        }
        GraphFamily::RandomRegular { n, d } => return random_regular(n, d, seed),
    };
    Ok(Graph::new(n, &pairs).expect("families are simple"))
}

/// A `d`-regular simple graph from the pairing model: points are matched one
/// random pair at a time, pairs that would form a loop or a repeated edge are
/// redrawn, and the whole matching restarts if no valid pair is left.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, HarnessError> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(HarnessError::InvalidParams(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = rng_from_seed(seed);
    'attempt: for _ in 0..REGULAR_ATTEMPTS {
        let mut points: Vec<VertexId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut order = Vec::with_capacity(n * d / 2);
        while !points.is_empty() {
            let mut found = None;
            for _ in 0..64 {
                let i = rng.gen_range(0..points.len());
                let j = rng.gen_range(0..points.len());
                if suitable(&points, &edges, i, j) {
                    found = Some((i, j));
                    break;
                }
            }
            if found.is_none() {
                let candidates: Vec<(usize, usize)> = (0..points.len())
                    .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| suitable(&points, &edges, i, j))
                    .collect();
                found = candidates.choose(&mut rng).copied();
            }
            let Some((i, j)) = found else { continue 'attempt };
            let (u, v) = (points[i].min(points[j]), points[i].max(points[j]));
            edges.insert((u, v));
            order.push((u, v));
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
        }
        return Ok(Graph::new(n, &order).expect("pairs are simple"));
    }
    Err(HarnessError::GenerationFailed { attempts: REGULAR_ATTEMPTS })
}

fn suitable(points: &[VertexId], edges: &BTreeSet<(VertexId, VertexId)>, i: usize, j: usize) -> bool {
    let (u, v) = (points[i], points[j]);
    i != j && u != v && !edges.contains(&(u.min(v), u.max(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListMode {
    /// Every edge gets `{1..k}`.
    Identical,
    /// Independent uniform `k`-subsets of `{1..palette}`.
    Uniform,
    /// Every vertex prefers a random `k`-set; an edge takes the colors both
    /// ends prefer, then alternates between the two ends' other preferences.
    AdversarialShared,
}

/// Lists of size `k` drawn from the palette `{1..palette}`.
pub fn gen_lists(g: &Graph, k: usize, palette: usize, mode: ListMode, seed: u64) -> Result<ListAssignment, HarnessError> {
    if k > palette {
        return Err(HarnessError::InvalidParams(format!("list size {k} exceeds palette {palette}")));
    }
    let mut rng = rng_from_seed(seed);
    let subset = |rng: &mut _| -> Vec<Color> {
        let mut s: Vec<Color> = index::sample(rng, palette, k).into_iter().map(|i| i as Color + 1).collect();
        s.sort_unstable();
        s
    };
    let lists = match mode {
        ListMode::Identical => vec![(1..=k as Color).collect(); g.edge_count()],
        ListMode::Uniform => (0..g.edge_count()).map(|_| subset(&mut rng)).collect(),
        ListMode::AdversarialShared => {
            let prefs: Vec<Vec<Color>> = (0..g.vertex_count()).map(|_| subset(&mut rng)).collect();
            g.edges()
                .iter()
                .map(|&(u, v)| {
                    let (pu, pv) = (&prefs[u], &prefs[v]);
                    let mut list: Vec<Color> = pu.iter().filter(|c| pv.contains(c)).copied().collect();
                    let mut only_u = pu.iter().filter(|c| !pv.contains(c));
                    let mut only_v = pv.iter().filter(|c| !pu.contains(c));
                    while list.len() < k {
                        let next = if list.len().is_multiple_of(2) { only_u.next() } else { only_v.next() };
                        list.push(*next.expect("both preference sets have k colors"));
                    }
                    list
                })
                .collect()
        }
    };
    Ok(ListAssignment::new(lists))
}

/// Every graph on exactly `n <= 7` vertices, one per isomorphism class.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "exhaustive enumeration is limited to 7 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut bit = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        bit[u][v] = i;
        bit[v][u] = i;
    }
    // Each permutation as a table from old pair index to new pair index.
    let perms: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| bit[p[u]][p[v]]).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let canonical = perms.iter().all(|table| {
            let mut image = 0u32;
            for (i, &j) in table.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    image |= 1 << j;
                }
            }
            image >= mask
        });
        if canonical {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            out.push(Graph::new(n, &edges).expect("simple"));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// All graphs on 1 to `max_n` vertices up to isomorphism.
pub fn small_graphs(max_n: usize, connected_only: bool) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(graphs_up_to_isomorphism)
        .filter(|g| !connected_only || is_connected(g))
        .collect()
}
