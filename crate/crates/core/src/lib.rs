//! Conformity weights for agents with misspecified beliefs about their
//! return to effort.
//!
//! Each group `k` has a true return `alpha_k`, a share `q_k` of correctly
//! specified agents, and a shared misspecified belief `alpha_hat_k` held by
//! the rest. Agents best-respond to a mix of their belief and the peer
//! statistic, weighted by a conformity weight `lambda`. The crate solves
//! those best responses, finds the payoff-efficient weights, tests them
//! against invading mutants, and differentiates them.

pub mod cli;
pub mod concave;
pub mod efficiency;
pub mod error;
pub mod linalg;
pub mod model;
pub mod monitoring;
pub mod sbr;
pub mod stability;
pub mod statics;
pub mod two_group;

pub use efficiency::{
    brute_force_lambda, interior_lambda_candidate, interiority_check, solve_pressure_profile,
    EquilibriumClass, PressureProfile, Regime,
};
pub use error::{Error, Result};
pub use model::{
    material_payoff, validate_scenario, ConcaveKind, GroupParams, PayoffSpec, PeerMatrix,
    Scenario, TypeRole, TypeSpec,
};
pub use sbr::{solve_sbr, SbrSolution};
