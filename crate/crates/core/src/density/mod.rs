//! Invariant densities: the transfer operator, Ulam's method and closed forms.

pub mod closed_form;
pub mod renorm;
pub mod stats;
pub mod step;
pub mod transfer;
pub mod ulam;

pub use closed_form::{
    markov_density, markov_density_n, markov_map, markov_n_map, parry_density, parry_tail_bound,
    parry_terms_for, SeriesDensity,
};
pub use renorm::{pull_back, renormalized_density, RenormalizedDensity};
pub use stats::{density_stats, DensityStats};
pub use step::{StepDensity, SumBuilder, DEFAULT_BUDGET};
pub use transfer::{birkhoff_average, pf_apply, pf_apply_with_budget, pf_power};
pub use ulam::{ulam_matrix, ulam_stationary, UlamOperator, DEFAULT_MAX_ITER, DEFAULT_TOL};
