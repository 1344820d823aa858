use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lla_core::exact::{
    chromatic_index_t, decide_linear_colorable, linear_arboricity, list_linear_colorable_all_lists, AllListsDecision,
};
use lla_core::harness::{
    concentration_csv, gen_graph, gen_lists, run_concentration, run_success_rate, success_summary_csv,
    success_trials_csv, ConcentrationParams, GraphFamily, ListMode, NamedConfig, SuccessRateParams,
};
use lla_core::verify::{check_degree_t, check_from_lists, check_linear, check_proper};
use lla_core::{Decision, EdgeColoring, Graph, ListAssignment, PipelineConfig, SearchBudget, Strategy};

#[derive(Parser)]
#[command(name = "lla", version, about = "Linear list edge coloring toolkit")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress warnings and diagnostics on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph.
    Gen(GenArgs),
    /// Generate a list assignment for a graph.
    Lists(ListsArgs),
    /// Check a coloring.
    Verify(VerifyArgs),
    /// Find a linear coloring from lists.
    Solve(SolveArgs),
    /// Exhaustive search.
    #[command(subcommand)]
    Exact(ExactCommand),
    /// Run an experiment and write CSV.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Complete,
    CompleteBipartite,
    Cycle,
    Path,
    RandomRegular,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertex count (complete, cycle, path, random-regular).
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Degree (random-regular).
    #[arg(long = "degree", default_value_t = 0)]
    degree: usize,
    /// Side sizes (complete-bipartite).
    #[arg(long, default_value_t = 0)]
    a: usize,
    #[arg(long, default_value_t = 0)]
    b: usize,
}

impl FamilyArgs {
    fn family(&self) -> GraphFamily {
        match self.family {
            FamilyArg::Complete => GraphFamily::Complete { n: self.n },
            FamilyArg::CompleteBipartite => GraphFamily::CompleteBipartite { a: self.a, b: self.b },
            FamilyArg::Cycle => GraphFamily::Cycle { n: self.n },
            FamilyArg::Path => GraphFamily::Path { n: self.n },
            FamilyArg::RandomRegular => GraphFamily::RandomRegular { n: self.n, d: self.degree },
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Identical,
    Uniform,
    AdversarialShared,
}

impl From<ModeArg> for ListMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Identical => ListMode::Identical,
            ModeArg::Uniform => ListMode::Uniform,
            ModeArg::AdversarialShared => ListMode::AdversarialShared,
        }
    }
}

#[derive(Args)]
struct ListsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// List size.
    #[arg(long)]
    k: usize,
    /// Colors are drawn from 1..=palette; defaults to k.
    #[arg(long)]
    palette: Option<usize>,
    #[arg(long, value_enum, default_value = "identical")]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Linear,
    Proper,
    DegreeT,
    FromLists,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    lists: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "linear")]
    check: CheckArg,
    /// Degree bound for `--check degree-t`.
    #[arg(long, default_value_t = 2)]
    t: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Pipeline,
    Direct,
    Auto,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Pipeline => Strategy::Pipeline,
            StrategyArg::Direct => Strategy::Direct,
            StrategyArg::Auto => Strategy::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    /// Probabilities and thresholds from the asymptotic formulas.
    Schedule,
    /// Thresholds attainable at small `d` (see `PipelineConfig::desk_scale`).
    Desk,
}

#[derive(Args, Clone)]
struct TuningArgs {
    #[arg(long, value_enum, default_value = "schedule")]
    preset: PresetArg,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Color-degree parameter; defaults to max(2, max color degree of the lists).
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    q_eff: Option<usize>,
    #[arg(long)]
    p_reserve: Option<f64>,
    #[arg(long)]
    p_sparsify: Option<f64>,
    #[arg(long)]
    theta_h: Option<f64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Largest edge count solved by exhaustive search under `--strategy auto`.
    #[arg(long)]
    direct_cutoff: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Search node limit for exhaustive search.
    #[arg(long, default_value_t = 500_000_000)]
    node_limit: u64,
    /// Wall-clock limit for exhaustive search, in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget, CliError> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(CliError::Usage("--time-limit must be positive".into()));
        }
        SearchBudget::new(self.node_limit, Duration::from_secs_f64(self.time_limit))
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lists: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Subcommand)]
enum ExactCommand {
    /// Linear arboricity.
    La {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Least number of colors with every class of max degree t.
    ChiT {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Is there a linear coloring from the given lists?
    Decide {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        lists: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Is the graph linearly colorable from every assignment of k-lists?
    LlaAll {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Empirical moments of the reserve and sparsify samplers.
    Concentration {
        #[arg(long, default_value_t = 100)]
        ell: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.3])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// How often `solve` succeeds on generated instances.
    SuccessRate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        palette: Option<usize>,
        #[arg(long, value_enum, default_value = "identical")]
        mode: ModeArg,
        #[arg(long, value_enum, value_delimiter = ',', default_values = ["auto"])]
        strategy: Vec<StrategyArg>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Also write one row per trial here.
        #[arg(long)]
        trials_out: Option<PathBuf>,
        /// Add a runtime column to the per-trial rows.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        tuning: TuningArgs,
    },
}

enum CliError {
    /// Bad arguments or parameters.
    Usage(String),
    /// Unreadable or malformed input, unwritable output.
    Io(String),
    /// The command ran but the answer is negative or unknown.
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failure(m) => m,
        }
    }
}

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn warn(&self, msg: &str) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { seed: cli.seed, out: cli.out, quiet: cli.quiet };
    match run(cli.command, &ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let msg = err.message();
            if !msg.is_empty() && !(ctx.quiet && matches!(err, CliError::Failure(_))) {
                eprintln!("{}", msg.trim_end());
            }
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command, ctx: &Ctx) -> Result<(), CliError> {
    match command {
        Command::Gen(args) => {
            let g = gen_graph(args.family.family(), ctx.seed).map_err(|e| CliError::Usage(e.to_string()))?;
            ctx.emit(&g.to_text())
        }
        Command::Lists(args) => {
            let g = read_graph(&args.graph)?;
            let palette = args.palette.unwrap_or(args.k);
            let l = gen_lists(&g, args.k, palette, args.mode.into(), ctx.seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            ctx.emit(&l.to_text(&g))
        }
        Command::Verify(args) => verify(args, ctx),
        Command::Solve(args) => solve(args, ctx),
        Command::Exact(cmd) => exact(cmd, ctx),
        Command::Experiment(cmd) => experiment(cmd, ctx),
    }
}

fn verify(args: VerifyArgs, ctx: &Ctx) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let phi = EdgeColoring::parse(&g, &read_text(&args.coloring)?).map_err(|e| format_error(&args.coloring, e))?;
    let lists = match &args.lists {
        Some(path) => Some(read_lists(&g, path)?),
        None => None,
    };
    let report = match args.check {
        CheckArg::Linear => check_linear(&g, lists.as_ref(), &phi),
        CheckArg::Proper => check_proper(&g, &phi),
        CheckArg::DegreeT => {
            if args.t == 0 {
                return Err(CliError::Usage("--t must be at least 1".into()));
            }
            check_degree_t(&g, &phi, args.t)
        }
        CheckArg::FromLists => {
            let l = lists.ok_or_else(|| CliError::Usage("--check from-lists needs --lists".into()))?;
            check_from_lists(&g, &l, &phi)
        }
    };
    ctx.emit(&report.to_string())?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failure(String::new()))
    }
}

fn config(tuning: &TuningArgs, g: &Graph, lists: &ListAssignment, seed: u64, ctx: &Ctx) -> Result<PipelineConfig, CliError> {
    let d = tuning.d.unwrap_or_else(|| lists.max_color_degree(g).max(2) as f64);
    let usage = |e: lla_core::PipelineError| CliError::Usage(e.to_string());
    let mut cfg = match tuning.preset {
        PresetArg::Schedule => {
            let schedule = lla_core::DefaultSchedule::new(d, tuning.epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
            if schedule.p_reserve_clamped() && tuning.p_reserve.is_none() {
                ctx.warn(&format!("reserve probability 2/ln^(1/4) d exceeds 1 at d = {d}; clamped to 1"));
            }
            PipelineConfig::new(d, tuning.epsilon).map_err(usage)?
        }
        PresetArg::Desk => {
            let list_size = lists.list_size().unwrap_or(0);
            PipelineConfig::desk_scale(d, tuning.epsilon, list_size).map_err(usage)?
        }
    };
    if let Some(q) = tuning.q_eff {
        cfg.q_eff = q;
    }
    if let Some(p) = tuning.p_reserve {
        cfg.p_reserve = p;
    }
    if let Some(p) = tuning.p_sparsify {
        cfg.p_sparsify = p;
    }
    if let Some(t) = tuning.theta_h {
        cfg.theta_hitting = t;
    }
    if let Some(r) = tuning.max_rounds {
        cfg.max_rounds = r;
    }
    if let Some(c) = tuning.direct_cutoff {
        cfg.direct_cutoff = c;
    }
    cfg.budget = tuning.budget.budget()?;
    cfg.seed = seed;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn solve(args: SolveArgs, ctx: &Ctx) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let lists = read_lists(&g, &args.lists)?;
    let mut cfg = config(&args.tuning, &g, &lists, ctx.seed, ctx)?;
    cfg.strategy = args.strategy.into();
    match lla_core::solve(&g, &lists, &cfg) {
        Ok(sol) => ctx.emit(&sol.coloring.to_text(&g)),
        Err(err) => Err(CliError::Failure(format!("solve failed: {err}"))),
    }
}

fn exact(cmd: ExactCommand, ctx: &Ctx) -> Result<(), CliError> {
    let budget_failure = || CliError::Failure("search budget exceeded".into());
    match cmd {
        ExactCommand::La { graph, budget } => {
            let g = read_graph(&graph)?;
            let la = linear_arboricity(&g, budget.budget()?).map_err(|_| budget_failure())?;
            ctx.emit(&format!("{la}\n"))
        }
        ExactCommand::ChiT { graph, t, budget } => {
            let g = read_graph(&graph)?;
            if t == 0 {
                return Err(CliError::Usage("--t must be at least 1".into()));
            }
            let chi = chromatic_index_t(&g, t, budget.budget()?).map_err(|_| budget_failure())?;
            ctx.emit(&format!("{chi}\n"))
        }
        ExactCommand::Decide { graph, lists, budget } => {
            let g = read_graph(&graph)?;
            let l = read_lists(&g, &lists)?;
            match decide_linear_colorable(&g, &l, budget.budget()?) {
                Decision::Yes(phi) => ctx.emit(&format!("YES\n{}", phi.to_text(&g))),
                Decision::No => {
                    ctx.emit("NO\n")?;
                    Err(CliError::Failure(String::new()))
                }
                Decision::BudgetExceeded => Err(budget_failure()),
            }
        }
        ExactCommand::LlaAll { graph, k, budget } => {
            let g = read_graph(&graph)?;
            match list_linear_colorable_all_lists(&g, k, budget.budget()?) {
                AllListsDecision::Yes => ctx.emit("YES\n"),
                AllListsDecision::No(witness) => {
                    ctx.emit(&format!("NO\n{}", witness.to_text(&g)))?;
                    Err(CliError::Failure(String::new()))
                }
                AllListsDecision::BudgetExceeded => Err(budget_failure()),
            }
        }
    }
}

fn experiment(cmd: ExperimentCommand, ctx: &Ctx) -> Result<(), CliError> {
    match cmd {
        ExperimentCommand::Concentration { ell, p, trials } => {
            let params = ConcentrationParams { ell, probabilities: p, trials, seed: ctx.seed };
            let records = run_concentration(&params).map_err(|e| CliError::Usage(e.to_string()))?;
            ctx.emit(&concentration_csv(&records))
        }
        ExperimentCommand::SuccessRate { family, k, palette, mode, strategy, trials, trials_out, timing, tuning } => {
            let family = family.family();
            let palette = palette.unwrap_or(k);
            // Configuration parameters are fixed from the seed instance.
            let g = gen_graph(family, ctx.seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let lists = gen_lists(&g, k, palette, mode.into(), ctx.seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let base = config(&tuning, &g, &lists, ctx.seed, ctx)?;
            let configs = strategy
                .into_iter()
                .map(|s| {
                    let mut config = base.clone();
                    config.strategy = s.into();
                    NamedConfig { name: format!("{:?}", config.strategy).to_lowercase(), config }
                })
                .collect();
            let params = SuccessRateParams {
                family,
                list_size: k,
                palette,
                mode: mode.into(),
                configs,
                trials,
                seed: ctx.seed,
            };
            let report = run_success_rate(&params).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(path) = trials_out {
                write_file(&path, &success_trials_csv(&report.trials, timing))?;
            }
            ctx.emit(&success_summary_csv(&report.summaries))
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn format_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse(&read_text(path)?).map_err(|e| format_error(path, e))
}

fn read_lists(g: &Graph, path: &Path) -> Result<ListAssignment, CliError> {
    ListAssignment::parse(g, &read_text(path)?).map_err(|e| format_error(path, e))
}
