use std::time::Instant;

use rayon::prelude::*;

use super::{fmt_real, gen_graph, gen_lists, GraphFamily, HarnessError, ListMode};
use crate::color::ListAssignment;
use crate::graph::Graph;
use crate::lll::rng_from_seed;
use crate::pipeline::{solve, PipelineConfig, ReserveTrials, SparsifyTrials};
use crate::verify::check_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// `|R(e)|` after one round of reserve sampling: `B(ell, p^2)`.
    Reserve,
    /// `|L'(e)|` after one round of reserve sampling: `B(ell, (1-p)^2)`.
    Residual,
    /// List size after one round of sparsification: `B(ell, p)`.
    Sparsified,
    /// Color degree at the center of an `ell`-star after sparsification: `B(ell, p)`.
    ColorDegree,
}

impl Statistic {
    pub const ALL: [Statistic; 4] =
        [Statistic::Reserve, Statistic::Residual, Statistic::Sparsified, Statistic::ColorDegree];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Reserve => "reserve",
            Statistic::Residual => "residual",
            Statistic::Sparsified => "sparsified",
            Statistic::ColorDegree => "color-degree",
        }
    }

    /// Success probability of the binomial the statistic follows.
    pub fn success_probability(self, p: f64) -> f64 {
        match self {
            Statistic::Reserve => p * p,
            Statistic::Residual => (1.0 - p) * (1.0 - p),
            Statistic::Sparsified | Statistic::ColorDegree => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationParams {
    pub ell: usize,
    pub probabilities: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// Empirical moments of one statistic against its exact binomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRecord {
    pub statistic: Statistic,
    pub ell: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub target_mean: f64,
    pub target_variance: f64,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of the mean under the binomial, `sqrt(var / trials)`.
    pub std_error: f64,
    /// `(mean - target_mean) / std_error`; 0 when the binomial is degenerate.
    pub z: f64,
    /// Fraction of trials with `|X - np| > 3 sqrt(np)`.
    pub tail_frequency: f64,
    /// The Chernoff bound `2 e^{-3}` on that fraction.
    pub tail_bound: f64,
    pub max: usize,
}

impl ConcentrationRecord {
    pub fn within(&self, standard_errors: f64) -> bool {
        if self.std_error == 0.0 {
            return self.mean == self.target_mean;
        }
        self.z.abs() <= standard_errors
    }
}

/// Samples every [`Statistic`] through the real reserve and sparsify
/// samplers (one round, no resampling) on a single edge or an `ell`-star
/// whose lists are `{1..ell}`.
pub fn run_concentration(params: &ConcentrationParams) -> Result<Vec<ConcentrationRecord>, HarnessError> {
    if params.trials == 0 {
        return Err(HarnessError::InvalidParams("trials must be at least 1".into()));
    }
    if let Some(p) = params.probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(HarnessError::InvalidParams(format!("probability {p} outside [0, 1]")));
    }
    let ell = params.ell;
    let edge = Graph::new(2, &[(0, 1)]).expect("single edge");
    let edge_lists = ListAssignment::uniform(&edge, 1..=ell as u64);
    let star_pairs: Vec<_> = (1..=ell).map(|v| (0, v)).collect();
    let star = Graph::new(ell + 1, &star_pairs).expect("star");
    let star_lists = ListAssignment::uniform(&star, [1]);

    let reserve = ReserveTrials::new(&edge, &edge_lists);
    let sparsify_edge = SparsifyTrials::new(&edge_lists);
    let sparsify_star = SparsifyTrials::new(&star_lists);

    let mut cells = Vec::new();
    for (pi, &p) in params.probabilities.iter().enumerate() {
        for (si, &statistic) in Statistic::ALL.iter().enumerate() {
            cells.push((pi, p, si, statistic));
        }
    }
    cells
        .into_par_iter()
        .map(|(pi, p, si, statistic)| {
            let mut rng = rng_from_seed(cell_seed(params.seed, pi, si));
            let mut samples = Vec::with_capacity(params.trials);
            for _ in 0..params.trials {
                let x = match statistic {
                    Statistic::Reserve => reserve.sample(&edge, &edge_lists, p, &mut rng)?.reserve_lists.list(0).len(),
                    Statistic::Residual => reserve.sample(&edge, &edge_lists, p, &mut rng)?.residual_lists.list(0).len(),
                    Statistic::Sparsified => sparsify_edge.sample(p, &mut rng)?.list(0).len(),
                    Statistic::ColorDegree => sparsify_star.sample(p, &mut rng)?.color_degree(&star, 0, 1),
                };
                samples.push(x);
            }
            Ok(summarize(statistic, ell, p, params, &samples))
        })
        .collect::<Result<Vec<_>, crate::pipeline::PipelineError>>()
        .map_err(|e| HarnessError::InvalidParams(e.to_string()))
}

fn cell_seed(seed: u64, pi: usize, si: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((pi as u64) << 32 | si as u64)
}

fn summarize(statistic: Statistic, ell: usize, p: f64, params: &ConcentrationParams, xs: &[usize]) -> ConcentrationRecord {
    let n = xs.len() as f64;
    let q = statistic.success_probability(p);
    let target_mean = ell as f64 * q;
    let target_variance = ell as f64 * q * (1.0 - q);
    let mean = xs.iter().sum::<usize>() as f64 / n;
    let variance = if xs.len() > 1 {
        xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_error = (target_variance / n).sqrt();
    let z = if std_error > 0.0 { (mean - target_mean) / std_error } else { 0.0 };
    let radius = 3.0 * target_mean.sqrt();
    let tail = xs.iter().filter(|&&x| (x as f64 - target_mean).abs() > radius).count();
    ConcentrationRecord {
        statistic,
        ell,
        p,
        trials: xs.len(),
        seed: params.seed,
        target_mean,
        target_variance,
        mean,
        variance,
        std_error,
        z,
        tail_frequency: tail as f64 / n,
        tail_bound: 2.0 * (-3.0f64).exp(),
        max: xs.iter().copied().max().unwrap_or(0),
    }
}

pub fn concentration_csv(records: &[ConcentrationRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "statistic",
        "ell",
        "p",
        "trials",
        "seed",
        "target_mean",
        "mean",
        "target_variance",
        "variance",
        "std_error",
        "z",
        "within_3se",
        "tail_frequency",
        "tail_bound",
        "max",
    ])
    .expect("in-memory write");
    for r in records {
        w.write_record([
            "concentration".to_string(),
            r.statistic.name().to_string(),
            r.ell.to_string(),
            fmt_real(r.p),
            r.trials.to_string(),
            r.seed.to_string(),
            fmt_real(r.target_mean),
            fmt_real(r.mean),
            fmt_real(r.target_variance),
            fmt_real(r.variance),
            fmt_real(r.std_error),
            fmt_real(r.z),
            r.within(3.0).to_string(),
            fmt_real(r.tail_frequency),
            fmt_real(r.tail_bound),
            r.max.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// One named pipeline configuration of a success-rate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedConfig {
    pub name: String,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRateParams {
    pub family: GraphFamily,
    pub list_size: usize,
    pub palette: usize,
    pub mode: ListMode,
    pub configs: Vec<NamedConfig>,
    pub trials: usize,
    pub seed: u64,
}

/// The outcome of `solve` on one (configuration, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub config: String,
    pub seed: u64,
    pub vertices: usize,
    pub edges: usize,
    pub success: bool,
    /// Re-verified by the harness; never true for a failure.
    pub certified: bool,
    pub strategy: String,
    /// Failing stage and cause, empty on success.
    pub stage: String,
    pub cause: String,
    pub reserve_resamples: usize,
    pub sparsify_resamples: usize,
    pub break_resamples: usize,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessSummary {
    pub config: String,
    pub trials: usize,
    pub successes: usize,
    pub certified: usize,
    pub success_rate: f64,
    pub mean_reserve_resamples: f64,
    pub mean_sparsify_resamples: f64,
    pub mean_break_resamples: f64,
    /// Most frequent failure cause, empty if none failed.
    pub top_failure: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessReport {
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<SuccessSummary>,
}

/// Runs `solve` for every configuration on `trials` instances. Trial `t`
/// generates graph, lists and solver seed from `seed + t`, so every row can
/// be regenerated on its own. Cells run in parallel; rows come back in
/// (configuration, seed) order.
pub fn run_success_rate(params: &SuccessRateParams) -> Result<SuccessReport, HarnessError> {
    if params.trials == 0 {
        return Err(HarnessError::InvalidParams("trials must be at least 1".into()));
    }
    // Surface bad generator parameters before spawning work.
    let g = gen_graph(params.family, params.seed)?;
    gen_lists(&g, params.list_size, params.palette, params.mode, params.seed)?;

    let cells: Vec<(usize, u64)> = (0..params.configs.len())
        .flat_map(|c| (0..params.trials as u64).map(move |t| (c, params.seed.wrapping_add(t))))
        .collect();
    let trials = cells
        .into_par_iter()
        .map(|(c, seed)| run_trial(params, &params.configs[c], seed))
        .collect::<Result<Vec<_>, _>>()?;
    let summaries = params.configs.iter().map(|nc| summarize_config(&nc.name, &trials)).collect();
    Ok(SuccessReport { trials, summaries })
}

fn run_trial(params: &SuccessRateParams, nc: &NamedConfig, seed: u64) -> Result<TrialRecord, HarnessError> {
    let g = gen_graph(params.family, seed)?;
    let lists = gen_lists(&g, params.list_size, params.palette, params.mode, seed)?;
    let mut cfg = nc.config.clone();
    cfg.seed = seed;
    let start = Instant::now();
    let outcome = solve(&g, &lists, &cfg);
    let runtime_secs = start.elapsed().as_secs_f64();
    let mut record = TrialRecord {
        config: nc.name.clone(),
        seed,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        success: false,
        certified: false,
        strategy: String::new(),
        stage: String::new(),
        cause: String::new(),
        reserve_resamples: 0,
        sparsify_resamples: 0,
        break_resamples: 0,
        runtime_secs,
    };
    match outcome {
        Ok(sol) => {
            record.certified = check_linear(&g, Some(&lists), &sol.coloring).passed();
            record.success = record.certified;
            record.strategy = format!("{:?}", sol.strategy).to_lowercase();
            record.reserve_resamples = sol.resamples.reserve;
            record.sparsify_resamples = sol.resamples.sparsify;
            record.break_resamples = sol.resamples.break_cycles;
            if !record.certified {
                record.cause = "harness verification failed".into();
            }
        }
        Err(err) => {
            if let Some((stage, cause)) = err.stage() {
                record.stage = stage.to_string();
                record.cause = cause.to_string();
            } else {
                record.cause = err.to_string();
            }
        }
    }
    Ok(record)
}

fn summarize_config(name: &str, trials: &[TrialRecord]) -> SuccessSummary {
    let rows: Vec<&TrialRecord> = trials.iter().filter(|t| t.config == name).collect();
    let n = rows.len();
    let successes: Vec<&&TrialRecord> = rows.iter().filter(|t| t.success).collect();
    let mean = |f: fn(&TrialRecord) -> usize| {
        if successes.is_empty() {
            0.0
        } else {
            successes.iter().map(|t| f(t) as f64).sum::<f64>() / successes.len() as f64
        }
    };
    let mut causes: Vec<String> = rows
        .iter()
        .filter(|t| !t.success)
        .map(|t| if t.stage.is_empty() { t.cause.clone() } else { format!("{}: {}", t.stage, failure_kind(&t.cause)) })
        .collect();
    causes.sort();
    let mut top_failure = String::new();
    let mut best = 0;
    let mut i = 0;
    while i < causes.len() {
        let j = causes[i..].iter().take_while(|c| **c == causes[i]).count();
        if j > best {
            best = j;
            top_failure = causes[i].clone();
        }
        i += j;
    }
    SuccessSummary {
        config: name.to_string(),
        trials: n,
        successes: successes.len(),
        certified: rows.iter().filter(|t| t.certified).count(),
        success_rate: if n == 0 { 0.0 } else { successes.len() as f64 / n as f64 },
        mean_reserve_resamples: mean(|t| t.reserve_resamples),
        mean_sparsify_resamples: mean(|t| t.sparsify_resamples),
        mean_break_resamples: mean(|t| t.break_resamples),
        top_failure,
    }
}

/// The cause without its instance-specific details.
fn failure_kind(cause: &str) -> &str {
    cause.split(" after ").next().unwrap_or(cause).split(':').next().unwrap_or(cause)
}

pub fn success_trials_csv(trials: &[TrialRecord], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "experiment",
        "config",
        "seed",
        "vertices",
        "edges",
        "success",
        "certified",
        "strategy",
        "stage",
        "cause",
        "reserve_resamples",
        "sparsify_resamples",
        "break_resamples",
    ];
    if timing {
        header.push("runtime_secs");
    }
    w.write_record(&header).expect("in-memory write");
    for t in trials {
        let mut row = vec![
            "success-rate".to_string(),
            t.config.clone(),
            t.seed.to_string(),
            t.vertices.to_string(),
            t.edges.to_string(),
            t.success.to_string(),
            t.certified.to_string(),
            t.strategy.clone(),
            t.stage.clone(),
            t.cause.clone(),
            t.reserve_resamples.to_string(),
            t.sparsify_resamples.to_string(),
            t.break_resamples.to_string(),
        ];
        if timing {
            row.push(fmt_real(t.runtime_secs));
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn success_summary_csv(summaries: &[SuccessSummary]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "config",
        "trials",
        "successes",
        "certified",
        "success_rate",
        "mean_reserve_resamples",
        "mean_sparsify_resamples",
        "mean_break_resamples",
        "top_failure",
    ])
    .expect("in-memory write");
    for s in summaries {
        w.write_record([
            "success-rate".to_string(),
            s.config.clone(),
            s.trials.to_string(),
            s.successes.to_string(),
            s.certified.to_string(),
            fmt_real(s.success_rate),
            fmt_real(s.mean_reserve_resamples),
            fmt_real(s.mean_sparsify_resamples),
            fmt_real(s.mean_break_resamples),
            s.top_failure.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
