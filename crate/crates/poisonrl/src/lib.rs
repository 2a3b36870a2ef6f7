//! Analysis of temporal-difference and Q-learning under adversarial
//! falsification of cost signals.
//!
//! The crate provides:
//!
//! - exact finite-MDP solvers used as ground truth ([`mdp`]);
//! - on-line TD(lambda) with linear function approximation, together with
//!   the analytic fixed point of the associated linear system ([`td`]);
//! - tabular Q-learning with tapering stepsizes under true or falsified
//!   cost oracles, plus the deterministic falsified fixed point ([`qlearn`]);
//! - quantitative vulnerability analytics: approximation-error bounds under
//!   cost manipulation, the Lipschitz bound on falsified Q-factors, policy
//!   regions, and robust-region radii ([`attack`]);
//! - synthesis of falsified cost tables that provably steer the learned
//!   greedy policy to an adversarial target, including partial-state
//!   control with a Gordan-alternative feasibility certificate
//!   ([`synthesis`]);
//! - reproducible experiment drivers with CSV/JSON output ([`experiments`])
//!   behind a thin subcommand CLI (`poisonrl`).
//!
//! Every simulation is deterministic given its seed. See the `examples/`
//! directory for one runnable program per capability.

pub mod attack;
pub mod error;
pub mod experiments;
pub mod generate;
pub mod io;
pub mod lp;
pub mod mdp;
pub mod qlearn;
pub mod synthesis;
pub mod td;

pub use error::{Error, Result};
pub use mdp::{
    bellman_residual, bellman_update, evaluate_policy_exact, evaluate_policy_exact_with,
    greedy_policy, policy_transition_matrix, q_value_iteration, stationary_distribution,
    CostTable, Mdp, Policy, QTable, StationaryDistribution,
};
