//! Exact ground-state computations for the finite-range generalized Potts
//! model on the Cayley tree.
//!
//! * [`tree_group`]: vertices as reduced words, metric, balls and spheres.
//! * [`spin_config`]: configurations, the generalized Kronecker symbol, the
//!   Hamiltonian and the ground-state checker.
//! * [`periodic_subgroups`]: parity subgroups and periodic configurations.
//! * [`census`]: exhaustive and periodic ground-state counting.
//! * [`io`] and [`dot`]: JSON documents and Graphviz export.

pub mod census;
pub mod dot;
pub mod error;
pub mod io;
pub mod periodic_subgroups;
pub mod spin_config;
pub mod tree_group;

pub use census::{
    cooccurrence_differences, count_by_constraint_graph, count_periodic_ground_states,
    exhaustive_min_energy, theorem2_formula, CensusOptions, CensusResult,
};
pub use error::{Error, Result};
pub use periodic_subgroups::{
    build_a_sets, build_alpha_patterns, gamma_check, generalize_a_sets, parity_vector,
    periodic_config, CosetColoring, CosetLabel, SubgroupSpec,
};
pub use spin_config::{
    hamiltonian, interior_ball_family, is_ground_state, kronecker_u, u_extremes, CouplingSign,
    GroundStateChecker, ModelParams, SpinConfiguration,
};
pub use tree_group::{ball, reduce, sphere, volume, TreeParams, VertexSet, Word};
