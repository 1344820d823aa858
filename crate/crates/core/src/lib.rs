//! Linear list edge coloring: graph and list primitives, certifying
//! verifiers, exact search, a Moser–Tardos engine, and a randomized pipeline
//! that colors every edge from its list so that each color class is a
//! linear forest (a disjoint union of paths).
//!
//! The real-valued parts ([`params::Schedule`], the Local Lemma conditions)
//! are generic over [`num_traits::Float`]; [`Real`] is the float type used by
//! the pipeline and the CLI.

pub mod color;
pub mod exact;
pub mod graph;
pub mod harness;
mod io;
pub mod lll;
pub mod params;
pub mod pipeline;
pub mod verify;

pub use color::{Color, EdgeColoring, ListAssignment};
pub use exact::{Decision, SearchBudget};
pub use graph::{EdgeId, EdgeSubset, Girth, Graph, VertexId};
pub use io::FormatError;
pub use params::q_of_d;
pub use pipeline::{solve, PipelineConfig, PipelineError, Strategy};
pub use verify::{check_linear, VerifyReport};

/// Float type of the pipeline configuration.
pub type Real = f64;
pub type DefaultSchedule = params::Schedule<Real>;
pub type DefaultCycleCondition = params::CycleEventCondition<Real>;
pub type DefaultWeightedEvent = lll::WeightedEvent<Real>;
