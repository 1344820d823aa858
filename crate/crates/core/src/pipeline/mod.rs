//! The constructive route to a linear list edge coloring.
//!
//! 1. [`reserve_colors`] picks reserve sets `R(v)`, splitting every list into
//!    a reserve part `R(e)` and a residual part `L'(e)` that never share a
//!    color at a vertex.
//! 2. [`sparsify_high_girth`] thins the residual lists so that every color's
//!    support has girth at least `q_eff`.
//! 3. [`degree_two_coloring`] colors from the thinned lists with every color
//!    class of max degree two, via a proper coloring of the doubled lists.
//! 4. [`break_cycles`] picks one edge from (a window of) every monochromatic
//!    cycle, keeping the reserve color degree of the picked subgraph `H` low.
//! 5. [`recolor_and_merge`] properly recolors `H` from the reserve lists and
//!    overlays it. Because reserve and residual colors are disjoint at every
//!    vertex, no monochromatic cycle survives.
//!
//! Steps 1, 2 and 4 are driven by [`crate::lll::resample_until_clear`]. Every
//! stage checks its own postconditions and [`solve`] only ever returns a
//! coloring that passed [`crate::verify::check_linear`].

mod break_cycles;
mod degree_two;
mod edge_color;
mod recolor;
mod reserve;
mod sparsify;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::color::{EdgeColoring, ListAssignment};
use crate::exact::{decide_linear_colorable, Decision, SearchBudget};
use crate::graph::{EdgeId, Graph};
use crate::lll::{
    resample_until_clear, rng_from_seed, BadEvent, LllError, ResampleOutcome, ResampleStats, VariableSpace,
};
use crate::params::{ParamError, Schedule};
use crate::verify::{check_linear, monochromatic_cycles};

pub use break_cycles::{break_cycles, hitting_color_degree, CycleBreakPlan};
pub use degree_two::degree_two_coloring;
pub use edge_color::list_edge_color;
pub use recolor::recolor_and_merge;
pub use reserve::{reserve_colors, ReserveSplit, ReserveTrials};
pub use sparsify::{low_girth_colors, sparsify_high_girth, SparsifyTrials};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Reserve,
    Sparsify,
    DegreeTwo,
    Cycles,
    Break,
    Recolor,
    Direct,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Reserve => "reserve",
            Stage::Sparsify => "sparsify",
            Stage::DegreeTwo => "degree-two",
            Stage::Cycles => "cycles",
            Stage::Break => "break",
            Stage::Recolor => "recolor",
            Stage::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Lll(#[from] LllError),
    #[error("round budget exhausted after {rounds} resamples; {event} still holds")]
    RoundBudgetExhausted { event: String, rounds: usize },
    #[error("no coloring exists")]
    Infeasible,
    #[error("exhaustive search budget exceeded")]
    SearchBudgetExceeded,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("stage {stage} failed: {cause}")]
    StageFailure { stage: Stage, cause: Box<PipelineError> },
}

impl PipelineError {
    fn at(self, stage: Stage) -> Self {
        PipelineError::StageFailure { stage, cause: Box::new(self) }
    }

    /// The failing stage and the underlying cause, if this is a stage failure.
    pub fn stage(&self) -> Option<(Stage, &PipelineError)> {
        match self {
            PipelineError::StageFailure { stage, cause } => Some((*stage, cause)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Pipeline,
    Direct,
    /// Direct search when the graph has at most `direct_cutoff` edges.
    Auto,
}

/// Every probability and threshold of the pipeline. [`PipelineConfig::new`]
/// fills them in from the asymptotic schedule; all fields may be overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub d: f64,
    pub epsilon: f64,
    pub q_eff: usize,
    pub p_reserve: f64,
    pub p_sparsify: f64,
    /// Lower bound on `|R(e)|`.
    pub theta_reserve: f64,
    /// Lower bound on `|L'(e)|` after reserving.
    pub theta_residual: f64,
    /// Lower bound on sparsified list sizes.
    pub theta_sparse_list: f64,
    /// Upper bound on sparsified color degrees.
    pub theta_color_degree: f64,
    /// Upper bound on the reserve color degree of the hitting subgraph.
    pub theta_hitting: f64,
    /// Resample budget of each resampling stage, and step budget of the
    /// conflict repair in [`list_edge_color`].
    pub max_rounds: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub direct_cutoff: usize,
    /// Graphs with at most this many edges fall back to exhaustive search
    /// when [`list_edge_color`]'s heuristics get stuck.
    pub exhaustive_cutoff: usize,
    pub budget: SearchBudget,
}

impl PipelineConfig {
    pub fn new(d: f64, epsilon: f64) -> Result<Self, PipelineError> {
        let s = Schedule::new(d, epsilon)?;
        Ok(Self {
            d,
            epsilon,
            q_eff: s.q_eff(),
            p_reserve: s.p_reserve(),
            p_sparsify: s.p_sparsify(),
            theta_reserve: s.theta_reserve(),
            theta_residual: s.theta_residual(),
            theta_sparse_list: s.theta_sparse_list(),
            theta_color_degree: s.theta_color_degree(),
            theta_hitting: s.theta_hitting(),
            max_rounds: 10_000,
            seed: 0,
            strategy: Strategy::Auto,
            direct_cutoff: 24,
            exhaustive_cutoff: 20,
            budget: SearchBudget::default(),
        })
    }

    /// Thresholds that are attainable at small `d` for lists of size about
    /// `list_size`.
    ///
    /// * the residual lists must stay large enough that doubling them gives
    ///   about `d + 1` colors per edge, so `theta_residual = (d + 1) / 2`;
    /// * every edge keeps at least one reserve color (`theta_reserve = 1`);
    /// * `theta_hitting = 1` makes any choice of reserve colors on `H` proper;
    /// * sparsification keeps every color (`p_sparsify = 1`), which is sound
    ///   because `q_eff = 3` and simple graphs have no shorter cycles;
    /// * `p_reserve` equalizes the chances that a single edge violates either
    ///   reserve threshold, `P[B(l, p^2) < 1]` and `P[B(l, (1-p)^2) < theta_residual]`.
    pub fn desk_scale(d: f64, epsilon: f64, list_size: usize) -> Result<Self, PipelineError> {
        let mut cfg = Self::new(d, epsilon)?;
        let residual = (d + 1.0) / 2.0;
        cfg.q_eff = 3;
        cfg.p_reserve = balanced_reserve_probability(list_size, 1.0, residual);
        cfg.p_sparsify = 1.0;
        cfg.theta_reserve = 1.0;
        cfg.theta_residual = residual;
        cfg.theta_sparse_list = residual;
        cfg.theta_color_degree = d;
        cfg.theta_hitting = 1.0;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::Config(msg));
        if !(self.d.is_finite() && self.d > 1.0) {
            return bad(format!("d = {} must exceed 1", self.d));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
        }
        for (name, p) in [("p_reserve", self.p_reserve), ("p_sparsify", self.p_sparsify)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} must lie in [0, 1]"));
            }
        }
        for (name, t) in [
            ("theta_reserve", self.theta_reserve),
            ("theta_residual", self.theta_residual),
            ("theta_sparse_list", self.theta_sparse_list),
            ("theta_color_degree", self.theta_color_degree),
            ("theta_hitting", self.theta_hitting),
        ] {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("{name} = {t} must be a non-negative number"));
            }
        }
        if self.q_eff < 3 {
            return bad(format!("q_eff = {} must be at least 3", self.q_eff));
        }
        if self.max_rounds == 0 {
            return bad("max_rounds must be at least 1".into());
        }
        Ok(())
    }
}

/// Resample counts of the three resampling stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageResamples {
    pub reserve: usize,
    pub sparsify: usize,
    pub break_cycles: usize,
}

/// Every intermediate object of a successful pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub split: ReserveSplit,
    pub sparsified: ListAssignment,
    pub degree_two: EdgeColoring,
    pub cycles: Vec<Vec<EdgeId>>,
    pub plan: CycleBreakPlan,
    pub coloring: EdgeColoring,
    pub resamples: StageResamples,
}

/// Runs every stage of the pipeline with one generator seeded from `cfg.seed`.
pub fn run_pipeline(g: &Graph, lists: &ListAssignment, cfg: &PipelineConfig) -> Result<PipelineTrace, PipelineError> {
    cfg.validate()?;
    check_lists_match(g, lists)?;
    let mut rng = rng_from_seed(cfg.seed);
    run_stages(g, lists, cfg, &mut rng)
}

fn run_stages<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<PipelineTrace, PipelineError> {
    let (split, reserve_stats) = reserve_colors(g, lists, cfg, rng).map_err(|e| e.at(Stage::Reserve))?;
    let (sparsified, sparsify_stats) =
        sparsify_high_girth(g, &split.residual_lists, cfg, rng).map_err(|e| e.at(Stage::Sparsify))?;
    let degree_two = degree_two_coloring(g, &sparsified, cfg, rng).map_err(|e| e.at(Stage::DegreeTwo))?;
    let cycles: Vec<Vec<EdgeId>> = monochromatic_cycles(g, &degree_two)
        .map_err(|e| PipelineError::VerificationFailed(e.to_string()).at(Stage::Cycles))?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    let plan = break_cycles(g, &split.reserve_lists, &cycles, cfg, rng).map_err(|e| e.at(Stage::Break))?;
    let coloring =
        recolor_and_merge(g, lists, &degree_two, &plan.hitting, &split, cfg, rng).map_err(|e| e.at(Stage::Recolor))?;
    let resamples = StageResamples {
        reserve: reserve_stats.resamples,
        sparsify: sparsify_stats.resamples,
        break_cycles: plan.stats.resamples,
    };
    Ok(PipelineTrace { split, sparsified, degree_two, cycles, plan, coloring, resamples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coloring: EdgeColoring,
    /// `Pipeline` or `Direct`; never `Auto`.
    pub strategy: Strategy,
    pub resamples: StageResamples,
}

/// A linear coloring of `g` from `lists`, certified by the verifier.
pub fn solve(g: &Graph, lists: &ListAssignment, cfg: &PipelineConfig) -> Result<Solution, PipelineError> {
    cfg.validate()?;
    check_lists_match(g, lists)?;
    let strategy = match cfg.strategy {
        Strategy::Auto if g.edge_count() <= cfg.direct_cutoff => Strategy::Direct,
        Strategy::Auto => Strategy::Pipeline,
        s => s,
    };
    let (coloring, resamples) = match strategy {
        Strategy::Direct => {
            let coloring = match decide_linear_colorable(g, lists, cfg.budget) {
                Decision::Yes(phi) => phi,
                Decision::No => return Err(PipelineError::Infeasible.at(Stage::Direct)),
                Decision::BudgetExceeded => return Err(PipelineError::SearchBudgetExceeded.at(Stage::Direct)),
            };
            (coloring, StageResamples::default())
        }
        _ => {
            let trace = run_pipeline(g, lists, cfg)?;
            (trace.coloring, trace.resamples)
        }
    };
    let report = check_linear(g, Some(lists), &coloring);
    if !report.passed() {
        let stage = if strategy == Strategy::Direct { Stage::Direct } else { Stage::Recolor };
        return Err(PipelineError::VerificationFailed(report.to_string()).at(stage));
    }
    Ok(Solution { coloring, strategy, resamples })
}

fn check_lists_match(g: &Graph, lists: &ListAssignment) -> Result<(), PipelineError> {
    if lists.edge_count() != g.edge_count() {
        return Err(PipelineError::PreconditionViolated(format!(
            "{} lists for {} edges",
            lists.edge_count(),
            g.edge_count()
        )));
    }
    Ok(())
}

/// The `p` on a 0.01 grid in `[0.01, 0.99]` minimizing the larger of
/// `P[B(l, p^2) < theta_reserve]` and `P[B(l, (1-p)^2) < theta_residual]`.
pub fn balanced_reserve_probability(list_size: usize, theta_reserve: f64, theta_residual: f64) -> f64 {
    let mut best = (f64::INFINITY, 0.5);
    for i in 1..100 {
        let p = i as f64 / 100.0;
        let worst = binomial_below(list_size, p * p, theta_reserve)
            .max(binomial_below(list_size, (1.0 - p) * (1.0 - p), theta_residual));
        if worst < best.0 {
            best = (worst, p);
        }
    }
    best.1
}

/// `P[B(n, p) < threshold]`.
fn binomial_below(n: usize, p: f64, threshold: f64) -> f64 {
    let mut term = (1.0 - p).powi(n as i32);
    let mut total = 0.0;
    for k in 0..=n {
        if !below(k, threshold) {
            break;
        }
        total += term;
        if p < 1.0 {
            term *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        }
    }
    total.min(1.0)
}

/// `count < threshold`, with the threshold read as a real number.
fn below(count: usize, threshold: f64) -> bool {
    (count as f64) < threshold
}

/// `count > threshold`, with the threshold read as a real number.
fn above(count: usize, threshold: f64) -> bool {
    (count as f64) > threshold
}

/// Runs the resampling loop and turns an exhausted budget into an error
/// naming the event that was still violated.
fn resample<S: VariableSpace, R: Rng + ?Sized>(
    space: &S,
    events: &[BadEvent<'_, S::Value>],
    max_rounds: usize,
    rng: &mut R,
) -> Result<(Vec<S::Value>, ResampleStats), PipelineError> {
    match resample_until_clear(space, events, max_rounds, rng)? {
        ResampleOutcome::Clear { assignment, stats } => Ok((assignment, stats)),
        ResampleOutcome::Exhausted { pending, stats } => Err(PipelineError::RoundBudgetExhausted {
            event: events[pending].label.clone(),
            rounds: stats.resamples,
        }),
    }
}
