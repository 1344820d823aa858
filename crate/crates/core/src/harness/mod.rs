//! Instance generators and the experiments behind the `lla experiment`
//! subcommands. Every generator and experiment is deterministic in its seed.

mod experiment;
mod generate;

use thiserror::Error;

pub use experiment::{
    concentration_csv, run_concentration, run_success_rate, success_summary_csv, success_trials_csv,
    ConcentrationParams, ConcentrationRecord, NamedConfig, Statistic, SuccessRateParams, SuccessReport,
    SuccessSummary, TrialRecord,
};
pub use generate::{
    gen_graph, gen_lists, graphs_up_to_isomorphism, is_connected, small_graphs, GraphFamily, ListMode,
    REGULAR_ATTEMPTS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no simple graph after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

/// Formats a float with 6 significant digits and no trailing zeros.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("float round trip");
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}
