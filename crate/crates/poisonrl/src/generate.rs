//! Seeded random problem generators for experiments and tests.
//!
//! Transition rows are bounded away from zero, so every generated chain is
//! irreducible and aperiodic under any policy.

use nalgebra::DMatrix;
use rand::Rng;

use crate::mdp::{CostTable, Mdp, Policy};
use crate::td::FeatureBasis;

/// Random MDP with `num_controls` controls admissible in every state and
/// strictly positive transition rows.
pub fn random_mdp<R: Rng>(rng: &mut R, n: usize, num_controls: usize, alpha: f64) -> Mdp {
    let actions: Vec<Vec<usize>> = (0..n).map(|_| (0..num_controls).collect()).collect();
    let transitions = (0..n)
        .map(|_| (0..num_controls).map(|_| random_row(rng, n)).collect())
        .collect();
    let costs = CostTable(
        (0..n)
            .map(|_| (0..num_controls).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect(),
    );
    Mdp::new(actions, transitions, costs, alpha).expect("generated model is valid")
}

/// Random Markov cost process: a single-control MDP with its only policy.
pub fn random_mcp<R: Rng>(rng: &mut R, n: usize, alpha: f64) -> (Mdp, Policy) {
    let mdp = random_mdp(rng, n, 1, alpha);
    let mu = Policy(vec![0; n]);
    (mdp, mu)
}

/// Cost table with entries drawn uniformly from `[lo, hi)`.
pub fn random_cost_table<R: Rng>(rng: &mut R, mdp: &Mdp, lo: f64, hi: f64) -> CostTable {
    CostTable(
        mdp.actions
            .iter()
            .map(|a| (0..a.len()).map(|_| rng.gen_range(lo..hi)).collect())
            .collect(),
    )
}

/// Perturbation table with entries drawn uniformly from `[-magnitude, magnitude)`.
pub fn random_perturbation<R: Rng>(rng: &mut R, mdp: &Mdp, magnitude: f64) -> CostTable {
    random_cost_table(rng, mdp, -magnitude, magnitude)
}

/// Uniformly random admissible policy.
pub fn random_policy<R: Rng>(rng: &mut R, mdp: &Mdp) -> Policy {
    Policy(
        mdp.actions
            .iter()
            .map(|a| a[rng.gen_range(0..a.len())])
            .collect(),
    )
}

/// Random full-rank feature basis with `k` columns over `n` states.
pub fn random_basis<R: Rng>(rng: &mut R, n: usize, k: usize) -> FeatureBasis {
    loop {
        let m = DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
        if let Ok(basis) = FeatureBasis::new(m) {
            return basis;
        }
    }
}

fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.05)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}
