use proptest::prelude::*;

use lla_core::color::CopiedColor;
use lla_core::exact::{decide_linear_colorable, Decision};
use lla_core::graph::{girth, short_cycles};
use lla_core::lll::{resample_until_clear, rng_from_seed, BadEvent, BernoulliSpace, ResampleOutcome};
use lla_core::pipeline::{list_edge_color, PipelineConfig, ReserveSplit, Strategy as Mode};
use lla_core::verify::{check_degree_t, check_linear, monochromatic_cycles};
use lla_core::{solve, Color, EdgeColoring, Girth, Graph, ListAssignment, SearchBudget};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()).prop_map(move |p| Graph::new(n, &p).unwrap())
    })
}

fn lists_for(g: &Graph, max_k: usize, palette: Color) -> impl Strategy<Value = ListAssignment> {
    let m = g.edge_count();
    proptest::collection::vec(proptest::collection::btree_set(1..=palette, 1..=max_k), m)
        .prop_map(|ls| ListAssignment::new(ls.into_iter().map(|s| s.into_iter().collect()).collect()))
}

fn coloring_for(g: &Graph, palette: Color) -> impl Strategy<Value = EdgeColoring> {
    proptest::collection::vec(1..=palette, g.edge_count()).prop_map(EdgeColoring::total)
}

/// Linear-forest test by union-find and degree counting, independent of
/// the library's verifier.
fn brute_is_linear(g: &Graph, phi: &EdgeColoring) -> bool {
    let colors: std::collections::BTreeSet<Color> = (0..g.edge_count()).filter_map(|e| phi.get(e)).collect();
    for c in colors {
        let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut degree = vec![0; g.vertex_count()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if phi.get(e) != Some(c) {
                continue;
            }
            degree[u] += 1;
            degree[v] += 1;
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b || degree[u] > 2 || degree[v] > 2 {
                return false;
            }
            parent[a] = b;
        }
    }
    true
}

/// Tries every coloring from the lists.
fn brute_colorable(g: &Graph, l: &ListAssignment) -> bool {
    let m = g.edge_count();
    let mut choice = vec![0usize; m];
    loop {
        let phi = EdgeColoring::total((0..m).map(|e| l.list(e)[choice[e]]).collect());
        if brute_is_linear(g, &phi) {
            return true;
        }
        let mut e = 0;
        loop {
            if e == m {
                return false;
            }
            choice[e] += 1;
            if choice[e] < l.list(e).len() {
                break;
            }
            choice[e] = 0;
            e += 1;
        }
    }
}

fn budget() -> SearchBudget {
    SearchBudget::new(50_000_000, std::time::Duration::from_secs(30)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph_text_round_trip(g in graph_strategy(10)) {
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn lists_and_coloring_text_round_trip((g, l, phi) in graph_strategy(8).prop_flat_map(|g| {
        let (lists, phi) = (lists_for(&g, 4, 9), coloring_for(&g, 9));
        (Just(g), lists, phi)
    })) {
        prop_assert_eq!(ListAssignment::parse(&g, &l.to_text(&g)).unwrap(), l);
        prop_assert_eq!(EdgeColoring::parse(&g, &phi.to_text(&g)).unwrap(), phi);
    }

    #[test]
    fn girth_matches_shortest_enumerated_cycle(g in graph_strategy(8)) {
        let shortest = short_cycles(&g, g.vertex_count()).iter().map(Vec::len).min();
        let expected = shortest.map_or(Girth::Infinite, Girth::Finite);
        prop_assert_eq!(girth(&g, &g.all_edges()), expected);
    }

    #[test]
    fn check_linear_matches_union_find((g, phi) in graph_strategy(8).prop_flat_map(|g| {
        let phi = coloring_for(&g, 3);
        (Just(g), phi)
    })) {
        prop_assert_eq!(check_linear(&g, None, &phi).passed(), brute_is_linear(&g, &phi));
    }

    #[test]
    fn monochromatic_cycles_are_cycles((g, phi) in graph_strategy(8).prop_flat_map(|g| {
        let phi = coloring_for(&g, 3);
        (Just(g), phi)
    })) {
        if let Ok(cycles) = monochromatic_cycles(&g, &phi) {
            prop_assert_eq!(cycles.is_empty(), brute_is_linear(&g, &phi));
            for (c, cycle) in cycles {
                prop_assert!(cycle.len() >= 3);
                prop_assert!(cycle.iter().all(|&e| phi.get(e) == Some(c)));
                // Consecutive edges share a vertex, and so do last and first.
                for i in 0..cycle.len() {
                    let (a, b) = g.endpoints(cycle[i]);
                    let (x, y) = g.endpoints(cycle[(i + 1) % cycle.len()]);
                    prop_assert!(a == x || a == y || b == x || b == y);
                }
            }
        } else {
            prop_assert!(!check_degree_t(&g, &phi, 2).passed());
        }
    }

    #[test]
    fn copied_tokens_decode_to_their_base(base in 0u64..1_000_000, t in 1u64..6, copy_off in 0u64..6) {
        let copy = copy_off % t + 1;
        let tok = CopiedColor { base, copy }.encode(t).unwrap();
        prop_assert_eq!(CopiedColor::decode(tok, t), CopiedColor { base, copy });
    }

    #[test]
    fn proper_coloring_of_copies_merges_to_degree_t((g, l, t, seed) in graph_strategy(8).prop_flat_map(|g| {
        let lists = lists_for(&g, 3, 5);
        (Just(g), lists, 1u64..4, any::<u64>())
    })) {
        let copied = l.copy_colors(t).unwrap();
        prop_assert_eq!(copied.strip(), l.clone());
        let cfg = PipelineConfig::new(3.0, 0.5).unwrap();
        if let Ok(proper) = list_edge_color(&g, &copied.lists, &cfg, &mut rng_from_seed(seed)) {
            let merged = copied.merge_colors(&proper).unwrap();
            prop_assert!(check_degree_t(&g, &merged, t as usize).passed());
            prop_assert!((0..g.edge_count()).all(|e| l.contains(e, merged.get(e).unwrap())));
        }
    }

    #[test]
    fn exact_decision_matches_enumeration((g, l) in graph_strategy(6).prop_filter("small", |g| g.edge_count() <= 9).prop_flat_map(|g| {
        let lists = lists_for(&g, 2, 3);
        (Just(g), lists)
    })) {
        match decide_linear_colorable(&g, &l, budget()) {
            Decision::Yes(phi) => {
                prop_assert!(check_linear(&g, Some(&l), &phi).passed());
                prop_assert!(brute_colorable(&g, &l));
            }
            Decision::No => prop_assert!(!brute_colorable(&g, &l)),
            Decision::BudgetExceeded => prop_assert!(false, "budget exceeded on a tiny instance"),
        }
    }

    #[test]
    fn solve_output_is_always_certified((g, l, seed, pipeline) in graph_strategy(9).prop_flat_map(|g| {
        let lists = lists_for(&g, 6, 8);
        (Just(g), lists, any::<u64>(), any::<bool>())
    })) {
        let d = l.max_color_degree(&g).max(2) as f64;
        let mut cfg = PipelineConfig::desk_scale(d, 0.5, l.list_size().unwrap_or(1)).unwrap();
        cfg.seed = seed;
        cfg.max_rounds = 2_000;
        cfg.budget = budget();
        cfg.strategy = if pipeline { Mode::Pipeline } else { Mode::Auto };
        match solve(&g, &l, &cfg) {
            Ok(sol) => prop_assert!(check_linear(&g, Some(&l), &sol.coloring).passed()),
            Err(e) => prop_assert!(e.stage().is_some(), "{}", e),
        }
    }

    #[test]
    fn derived_split_is_consistent((g, l, reserve) in graph_strategy(7).prop_flat_map(|g| {
        let n = g.vertex_count();
        let lists = lists_for(&g, 4, 6);
        let reserve = proptest::collection::vec(proptest::collection::vec(1u64..=6, 0..4), n);
        (Just(g), lists, reserve)
    })) {
        let split = ReserveSplit::from_reserve(&g, &l, reserve);
        prop_assert!(split.check(&g, &l).is_ok());
        for e in 0..g.edge_count() {
            let (r, lp) = (split.reserve_lists.list(e), split.residual_lists.list(e));
            prop_assert!(r.iter().all(|c| !lp.contains(c) && l.contains(e, *c)));
            prop_assert!(lp.iter().all(|c| l.contains(e, *c)));
        }
    }

    #[test]
    fn resampling_clears_every_event(len in 1usize..30, k in 1usize..4, seed in any::<u64>()) {
        // Each event: a window of k consecutive trials all false.
        let space = BernoulliSpace::uniform(len, 0.5).unwrap();
        let events: Vec<BadEvent<'_, bool>> = (0..len.saturating_sub(k - 1))
            .map(|i| {
                let scope: Vec<usize> = (i..i + k).collect();
                let reads = scope.clone();
                BadEvent::new(format!("w{i}"), scope, move |x: &[bool]| reads.iter().all(|&j| !x[j]))
            })
            .collect();
        match resample_until_clear(&space, &events, 100_000, &mut rng_from_seed(seed)).unwrap() {
            ResampleOutcome::Clear { assignment, stats } => {
                prop_assert!(events.iter().all(|e| !e.holds(&assignment)));
                prop_assert_eq!(stats.violations.iter().sum::<usize>(), stats.resamples);
            }
            ResampleOutcome::Exhausted { .. } => prop_assert!(false, "easy instance exhausted"),
        }
    }
}
