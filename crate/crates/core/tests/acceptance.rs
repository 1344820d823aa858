//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use lla_core::exact::{chromatic_index_t, decide_linear_colorable, linear_arboricity};
use lla_core::graph::girth;
use lla_core::harness::{
    gen_graph, gen_lists, run_concentration, small_graphs, ConcentrationParams, GraphFamily, ListMode, Statistic,
};
use lla_core::pipeline::{hitting_color_degree, run_pipeline, PipelineConfig, PipelineTrace, Strategy};
use lla_core::verify::{check_degree_t, check_linear, monochromatic_cycles};
use lla_core::{solve, Color, EdgeSubset, Girth, Graph, ListAssignment, SearchBudget};

type Outcome = Result<String, String>;

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 exact linear arboricity values", exact_values),
        ("2 linear arboricity bounds on connected graphs <= 6 vertices", arboricity_bounds),
        ("3 degree-t chromatic index chain on graphs <= 6 vertices", chromatic_chain),
        ("4 end-to-end soundness fuzz (1000 solve runs)", soundness_fuzz),
        ("5 stage invariants on 200 successful pipeline runs", stage_invariants),
        ("6 concentration of reserve and sparsify samplers", concentration),
        ("7 list decision agrees with linear arboricity threshold", oracle_equivalence),
        ("8 CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn budget(secs: u64) -> SearchBudget {
    SearchBudget::new(u64::MAX, Duration::from_secs(secs)).unwrap()
}

fn family(f: GraphFamily) -> Graph {
    gen_graph(f, 0).unwrap()
}

fn exact_values() -> Outcome {
    let mut cases = vec![
        ("K3", family(GraphFamily::Complete { n: 3 }), 2),
        ("K4", family(GraphFamily::Complete { n: 4 }), 2),
        ("K5", family(GraphFamily::Complete { n: 5 }), 3),
        ("K6", family(GraphFamily::Complete { n: 6 }), 3),
        ("K3,3", family(GraphFamily::CompleteBipartite { a: 3, b: 3 }), 2),
    ];
    for n in 3..=10 {
        cases.push(("C_n", family(GraphFamily::Cycle { n }), 2));
    }
    for n in 2..=10 {
        cases.push(("P_n", family(GraphFamily::Path { n }), 1));
    }
    let mut slowest = 0.0f64;
    for (name, g, expected) in &cases {
        let start = Instant::now();
        let la = linear_arboricity(g, budget(60)).map_err(|e| format!("{name}: {e}"))?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        if la != *expected {
            return Err(format!("{name} on {} vertices: la = {la}, expected {expected}", g.vertex_count()));
        }
        if secs > 60.0 {
            return Err(format!("{name} took {secs:.1}s"));
        }
    }
    Ok(format!("{} graphs, slowest {slowest:.3}s", cases.len()))
}

fn arboricity_bounds() -> Outcome {
    let graphs = small_graphs(6, true);
    let violations: Vec<String> = graphs
        .par_iter()
        .filter_map(|g| {
            let delta = g.max_degree();
            let la = linear_arboricity(g, budget(600)).expect("within budget");
            let lower = delta.div_ceil(2);
            let upper = (delta + 1).div_ceil(2);
            (la < lower || (delta <= 6 && la > upper)).then(|| format!("{:?}: la {la}, delta {delta}", g.edges()))
        })
        .collect();
    if violations.is_empty() {
        Ok(format!("{} graphs, 0 violations", graphs.len()))
    } else {
        Err(format!("{} violations, first {}", violations.len(), violations[0]))
    }
}

fn chromatic_chain() -> Outcome {
    let graphs = small_graphs(6, false);
    let violations: Vec<String> = graphs
        .par_iter()
        .flat_map_iter(|g| {
            let chi1 = chromatic_index_t(g, 1, budget(600)).expect("within budget");
            (1..=3usize).filter_map(move |t| {
                let chi_t = chromatic_index_t(g, t, budget(600)).expect("within budget");
                let ok = chi_t <= chi1.div_ceil(t) && chi1 <= (t + 1) * chi_t;
                (!ok).then(|| format!("{:?}: t {t}, chi_t {chi_t}, chi_1 {chi1}", g.edges()))
            })
        })
        .collect();
    if violations.is_empty() {
        Ok(format!("{} graphs x 3 values of t, 0 violations", graphs.len()))
    } else {
        Err(format!("{} violations, first {}", violations.len(), violations[0]))
    }
}

/// A fuzz case: graph family, list parameters, strategy, preset.
#[derive(Clone, Copy, Debug)]
struct Case {
    family: GraphFamily,
    k: usize,
    palette: usize,
    mode: ListMode,
    strategy: Strategy,
    desk: bool,
}

fn fuzz_cases() -> Vec<Case> {
    let mut families = Vec::new();
    for n in [2, 5, 9, 14] {
        families.push(GraphFamily::Path { n });
    }
    for n in [3, 4, 7, 12] {
        families.push(GraphFamily::Cycle { n });
    }
    for n in 2..=6 {
        families.push(GraphFamily::Complete { n });
    }
    for (n, d) in [(12, 4), (32, 4), (16, 6), (40, 6), (20, 8), (64, 8)] {
        families.push(GraphFamily::RandomRegular { n, d });
    }
    let lists = [
        (1, 1, ListMode::Identical),
        (2, 2, ListMode::Identical),
        (3, 3, ListMode::Identical),
        (6, 6, ListMode::Identical),
        (12, 12, ListMode::Identical),
        (3, 6, ListMode::Uniform),
        (8, 20, ListMode::Uniform),
        (4, 8, ListMode::AdversarialShared),
        (10, 16, ListMode::AdversarialShared),
    ];
    let mut cases = Vec::new();
    for &family in &families {
        for &(k, palette, mode) in &lists {
            for (strategy, desk) in [(Strategy::Auto, true), (Strategy::Pipeline, true), (Strategy::Pipeline, false)] {
                cases.push(Case { family, k, palette, mode, strategy, desk });
            }
        }
    }
    cases
}

fn fuzz_config(g: &Graph, l: &ListAssignment, case: &Case, seed: u64) -> PipelineConfig {
    let d = l.max_color_degree(g).max(2) as f64;
    let mut cfg = if case.desk {
        PipelineConfig::desk_scale(d, 0.5, case.k).unwrap()
    } else {
        PipelineConfig::new(d, 0.5).unwrap()
    };
    cfg.strategy = case.strategy;
    cfg.seed = seed;
    cfg.max_rounds = 5_000;
    cfg.budget = SearchBudget::new(20_000_000, Duration::from_secs(10)).unwrap();
    cfg
}

fn soundness_fuzz() -> Outcome {
    let cases = fuzz_cases();
    let runs: Vec<(Case, u64)> = (0..1000u64).map(|i| (cases[i as usize % cases.len()], i)).collect();
    let results: Vec<Result<bool, String>> = runs
        .par_iter()
        .map(|(case, seed)| {
            let g = gen_graph(case.family, *seed).unwrap();
            let l = gen_lists(&g, case.k, case.palette, case.mode, *seed).unwrap();
            let cfg = fuzz_config(&g, &l, case, *seed);
            match solve(&g, &l, &cfg) {
                Ok(sol) => {
                    let report = check_linear(&g, Some(&l), &sol.coloring);
                    if report.passed() {
                        Ok(true)
                    } else {
                        Err(format!("{case:?} seed {seed}: {report}"))
                    }
                }
                Err(e) => {
                    if e.stage().is_none() {
                        return Err(format!("{case:?} seed {seed}: failure without a stage: {e}"));
                    }
                    Ok(false)
                }
            }
        })
        .collect();
    let bad: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let successes = results.iter().filter(|r| matches!(r, Ok(true))).count();
    if bad.is_empty() {
        Ok(format!("{} runs, {successes} certified successes, {} explicit stage failures, 0 uncertified", runs.len(), runs.len() - successes))
    } else {
        Err(format!("{} bad runs, first {}", bad.len(), bad[0]))
    }
}

/// Instances on which the desk-scale pipeline usually succeeds, some with
/// the girth machinery switched on.
fn invariant_cases() -> Vec<(GraphFamily, usize, usize, ListMode, Option<(usize, f64)>)> {
    vec![
        (GraphFamily::RandomRegular { n: 32, d: 4 }, 8, 20, ListMode::Uniform, None),
        (GraphFamily::RandomRegular { n: 32, d: 4 }, 12, 12, ListMode::Identical, None),
        (GraphFamily::RandomRegular { n: 64, d: 8 }, 16, 16, ListMode::Identical, None),
        (GraphFamily::Cycle { n: 9 }, 6, 6, ListMode::Identical, None),
        (GraphFamily::RandomRegular { n: 32, d: 4 }, 12, 24, ListMode::Uniform, Some((5, 0.9))),
        (GraphFamily::RandomRegular { n: 24, d: 3 }, 10, 16, ListMode::Uniform, Some((4, 0.9))),
    ]
}

fn invariant_config(g: &Graph, l: &ListAssignment, k: usize, girth: Option<(usize, f64)>, seed: u64) -> PipelineConfig {
    let d = l.max_color_degree(g).max(2) as f64;
    let mut cfg = PipelineConfig::desk_scale(d, 0.5, k).unwrap();
    if let Some((q, p)) = girth {
        cfg.q_eff = q;
        cfg.p_sparsify = p;
        cfg.theta_sparse_list = (d + 1.0) / 2.0;
    }
    cfg.strategy = Strategy::Pipeline;
    cfg.seed = seed;
    cfg
}

fn check_trace(g: &Graph, l: &ListAssignment, cfg: &PipelineConfig, t: &PipelineTrace) -> Result<(), String> {
    let split = &t.split;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (r, lp) = (split.reserve_lists.list(e), split.residual_lists.list(e));
        if r.iter().any(|c| lp.contains(c)) {
            return Err(format!("edge {e}: R(e) meets L'(e)"));
        }
        if r.iter().chain(lp).any(|c| !l.contains(e, *c)) {
            return Err(format!("edge {e}: split lists leave L(e)"));
        }
        let in_reserve = |w: usize, c: &Color| split.reserve[w].contains(c);
        if r.iter().any(|c| !in_reserve(u, c) || !in_reserve(v, c)) {
            return Err(format!("edge {e}: R(e) not inside R(u) and R(v)"));
        }
    }
    for v in 0..g.vertex_count() {
        for &(_, e) in g.neighbors(v) {
            if let Some(c) = split.residual_lists.list(e).iter().find(|c| split.reserve[v].contains(c)) {
                return Err(format!("vertex {v}: color {c} in R(v) and L'(v)"));
            }
        }
    }
    for c in t.sparsified.palette() {
        let support = EdgeSubset::from_edges(g, (0..g.edge_count()).filter(|&e| t.sparsified.contains(e, c)));
        if let Girth::Finite(len) = girth(g, &support) {
            if len < cfg.q_eff {
                return Err(format!("color {c}: support girth {len} < {}", cfg.q_eff));
            }
        }
    }
    let report = check_degree_t(g, &t.degree_two, 2);
    if !report.passed() {
        return Err(format!("degree-two check: {report}"));
    }
    let cycles = monochromatic_cycles(g, &t.degree_two).map_err(|e| e.to_string())?;
    if let Some((c, cycle)) = cycles.iter().find(|(_, cycle)| !cycle.iter().any(|&e| t.plan.hitting.contains(e))) {
        return Err(format!("cycle of color {c} at edge {} not hit", cycle[0]));
    }
    for v in 0..g.vertex_count() {
        for c in split.reserve_lists.vertex_list(g, v).unwrap_or_default() {
            let degree = hitting_color_degree(g, &split.reserve_lists, &t.plan.hitting, v, c);
            if degree as f64 > cfg.theta_hitting {
                return Err(format!("vertex {v} color {c}: d_H^R = {degree} > {}", cfg.theta_hitting));
            }
        }
    }
    let report = check_linear(g, Some(l), &t.coloring);
    if !report.passed() {
        return Err(format!("final coloring: {report}"));
    }
    Ok(())
}

fn stage_invariants() -> Outcome {
    let cases = invariant_cases();
    let target = 200;
    let attempts: Vec<(usize, u64)> = (0..1200u64).map(|i| (i as usize % cases.len(), i)).collect();
    let results: Vec<Option<Result<(), String>>> = attempts
        .par_iter()
        .map(|&(ci, seed)| {
            let (family, k, palette, mode, girth) = cases[ci];
            let g = gen_graph(family, seed).unwrap();
            let l = gen_lists(&g, k, palette, mode, seed).unwrap();
            let cfg = invariant_config(&g, &l, k, girth, seed);
            run_pipeline(&g, &l, &cfg).ok().map(|trace| check_trace(&g, &l, &cfg, &trace))
        })
        .collect();
    let successes: Vec<(usize, &Result<(), String>)> = attempts
        .iter()
        .zip(&results)
        .filter_map(|(&(ci, _), r)| r.as_ref().map(|r| (ci, r)))
        .take(target)
        .collect();
    let girth_runs = successes.iter().filter(|(ci, _)| cases[*ci].4.is_some()).count();
    let checked: Vec<&Result<(), String>> = successes.iter().map(|&(_, r)| r).collect();
    if let Some(Err(e)) = checked.iter().find(|r| r.is_err()) {
        return Err(e.clone());
    }
    if checked.len() < target {
        return Err(format!("only {} successful runs in {} attempts", checked.len(), attempts.len()));
    }
    Ok(format!("{target} successful runs checked ({girth_runs} of them with q_eff > 3), 0 violations"))
}

fn concentration() -> Outcome {
    let params = ConcentrationParams { ell: 100, probabilities: vec![0.1, 0.3], trials: 10_000, seed: 2024 };
    let records = run_concentration(&params).map_err(|e| e.to_string())?;
    let required = [Statistic::Reserve, Statistic::Residual, Statistic::Sparsified];
    let mut summary = Vec::new();
    let mut outside = Vec::new();
    for r in &records {
        summary.push(format!("{}@{}: z={:.2}", r.statistic.name(), r.p, r.z));
        if required.contains(&r.statistic) && !r.within(3.0) {
            outside.push(format!("{} p={} mean {} target {}", r.statistic.name(), r.p, r.mean, r.target_mean));
        }
    }
    if outside.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(format!("outside 3 standard errors: {}", outside.join("; ")))
    }
}

fn oracle_equivalence() -> Outcome {
    let graphs = small_graphs(6, false);
    let disagreements: Vec<String> = graphs
        .par_iter()
        .flat_map_iter(|g| {
            let la = linear_arboricity(g, budget(600)).expect("within budget");
            (1..=4usize).filter_map(move |k| {
                let lists = ListAssignment::uniform(g, 1..=k as Color);
                let yes = decide_linear_colorable(g, &lists, budget(600)).is_yes();
                (yes != (la <= k)).then(|| format!("{:?}: k {k}, la {la}, decide {yes}", g.edges()))
            })
        })
        .collect();
    if disagreements.is_empty() {
        Ok(format!("{} graphs x k in 1..=4, 0 disagreements", graphs.len()))
    } else {
        Err(format!("{} disagreements, first {}", disagreements.len(), disagreements[0]))
    }
}

fn lla(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_lla"))
        .args(args)
        .arg("--quiet")
        .current_dir(dir)
        .status()
        .map_err(|e| e.to_string())?;
    // Exit code 1 (an explicit failure) still produces comparable output.
    match status.code() {
        Some(0) | Some(1) => Ok(()),
        other => Err(format!("lla {args:?} exited with {other:?}")),
    }
}

fn cli_determinism() -> Outcome {
    let invocations: Vec<(&str, Vec<&str>)> = vec![
        ("g.txt", vec!["gen", "--family", "random-regular", "--n", "32", "--degree", "4", "--seed", "7", "--out", "g.txt"]),
        ("l.txt", vec!["lists", "--graph", "g.txt", "--k", "8", "--palette", "20", "--mode", "uniform", "--seed", "7", "--out", "l.txt"]),
        ("a.txt", vec!["lists", "--graph", "g.txt", "--k", "6", "--palette", "12", "--mode", "adversarial-shared", "--seed", "3", "--out", "a.txt"]),
        ("c.txt", vec!["solve", "--graph", "g.txt", "--lists", "l.txt", "--strategy", "pipeline", "--preset", "desk", "--seed", "7", "--out", "c.txt"]),
        ("v.txt", vec!["verify", "--graph", "g.txt", "--lists", "l.txt", "--coloring", "c.txt", "--out", "v.txt"]),
        ("k.txt", vec!["gen", "--family", "complete", "--n", "5", "--out", "k.txt"]),
        ("la.txt", vec!["exact", "la", "--graph", "k.txt", "--out", "la.txt"]),
        ("conc.csv", vec!["experiment", "concentration", "--trials", "2000", "--seed", "5", "--out", "conc.csv"]),
        (
            "rate.csv",
            vec![
                "experiment", "success-rate", "--family", "random-regular", "--n", "24", "--degree", "4", "--k", "8",
                "--palette", "16", "--mode", "uniform", "--strategy", "pipeline,auto", "--preset", "desk", "--trials",
                "6", "--seed", "11", "--trials-out", "rate-trials.csv", "--out", "rate.csv",
            ],
        ),
    ];
    let mut outputs: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for (_, args) in &invocations {
            lla(dir.path(), args)?;
        }
        let mut files = BTreeMap::new();
        for name in invocations.iter().map(|(f, _)| *f).chain(["rate-trials.csv"]) {
            let bytes = std::fs::read(dir.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
            files.insert(name.to_string(), bytes);
        }
        outputs.push(files);
    }
    let differing: Vec<&String> = outputs[0].keys().filter(|k| outputs[0][*k] != outputs[1][*k]).collect();
    if differing.is_empty() {
        Ok(format!("{} output files byte-identical across two runs", outputs[0].len()))
    } else {
        Err(format!("outputs differ: {differing:?}"))
    }
}
