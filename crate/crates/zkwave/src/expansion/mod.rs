//! Duhamel iteration: tree terms, the truncated expansion and its residual,
//! exact Wick moments and the linearized operator.

pub mod coefficient;
pub mod duhamel;
pub mod history;
pub mod linearized;
pub mod params;
pub mod trees;
pub mod variance;

pub use coefficient::{assignment_from_leaves, coefficient_h};
pub use duhamel::duhamel;
pub use history::{History, TimeGrid, Truncation};
pub use linearized::{apply_linearized, probe_operator_norm, weighted_sup, NormProbe};
pub use params::ModelParams;
pub use trees::{approximate_solution, residual, residual_sup, tree_prefactor, tree_term, TreeEvaluator};
pub use variance::{cross_moment, variance_via_couples, DEFAULT_WICK_BUDGET};
