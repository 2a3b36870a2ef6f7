//! Stochastic Q-learning with per-pair tapering stepsizes, under true or
//! falsified cost oracles, plus the deterministic fixed point it converges
//! to when the falsification is stealthy.
//!
//! The stochastic update touches only the visited pair:
//! `Q(i,u) <- (1-gamma) Q(i,u) + gamma (cost + alpha min_v Q(j,v))` with
//! `gamma = a / (b + visits(i,u))`. Under a stealthy (time-invariant)
//! falsification the iterates converge to the unique fixed point of the
//! falsified Bellman operator, available exactly via
//! [`falsified_q_fixed_point`].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mdp::{q_value_iteration, CostTable, Mdp, QTable};
use crate::td::sample_index;

/// Behavior policy used to pick controls during learning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Exploration {
    /// Choose uniformly at random among the admissible controls of the
    /// current state; visits every admissible pair infinitely often on an
    /// ergodic chain.
    #[default]
    UniformRandom,
}

/// Configuration of one stochastic Q-learning run.
#[derive(Debug, Clone)]
pub struct QLearnConfig {
    /// Stepsize numerator: `gamma = stepsize_a / (stepsize_b + visits(i,u))`.
    pub stepsize_a: f64,
    /// Stepsize denominator offset, at least one.
    pub stepsize_b: f64,
    /// Total number of simulated transitions.
    pub horizon: usize,
    /// RNG seed; runs are deterministic given the seed.
    pub seed: u64,
    /// Behavior policy.
    pub exploration: Exploration,
    /// Initial Q table; zeros when absent.
    pub initial_q: Option<QTable>,
}

impl QLearnConfig {
    /// Configuration with the classic `1 / (1 + visits)` stepsize and zero start.
    pub fn new(horizon: usize, seed: u64) -> Self {
        QLearnConfig {
            stepsize_a: 1.0,
            stepsize_b: 1.0,
            horizon,
            seed,
            exploration: Exploration::UniformRandom,
            initial_q: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.stepsize_a > 0.0) || !(self.stepsize_b >= 1.0) {
            return Err(Error::InvalidArgument(
                "stepsize requires a > 0 and b >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one stochastic Q-learning run.
#[derive(Debug, Clone)]
pub struct QLearnRun {
    /// `(step, table)` snapshots, including step 0 and the final step.
    pub checkpoints: Vec<(usize, QTable)>,
    /// Q table after the full horizon.
    pub final_q: QTable,
}

/// Simulates Q-learning along one trajectory under an arbitrary cost oracle.
///
/// The oracle maps the visited `(state, control)` pair to the observed cost,
/// so the same routine runs under true costs, a stealthy falsification, or
/// any interactive adversary. Only the visited pair is updated each step.
/// The start state is drawn uniformly; snapshots are taken every
/// `horizon / 100` steps. Deterministic given the seed.
pub fn run_q_learning<F>(mdp: &Mdp, cfg: &QLearnConfig, mut cost_source: F) -> Result<QLearnRun>
where
    F: FnMut(usize, usize) -> f64,
{
    mdp.validate()?;
    cfg.validate()?;
    let alpha = mdp.discount;

    let mut q = cfg.initial_q.clone().unwrap_or_else(|| QTable::zeros(mdp));
    if q.values.len() != mdp.num_states
        || q.values
            .iter()
            .zip(&mdp.actions)
            .any(|(row, acts)| row.len() != acts.len())
    {
        return Err(Error::ShapeMismatch(
            "initial Q table does not match the model layout".into(),
        ));
    }

    let mut visits: Vec<Vec<u64>> = mdp.actions.iter().map(|a| vec![0; a.len()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = rng.gen_range(0..mdp.num_states);

    let cadence = (cfg.horizon / 100).max(1);
    let mut checkpoints = vec![(0, q.clone())];

    for t in 0..cfg.horizon {
        let pos = match cfg.exploration {
            Exploration::UniformRandom => rng.gen_range(0..mdp.actions[state].len()),
        };
        let control = mdp.actions[state][pos];
        let next = sample_index(&mut rng, &mdp.transitions[state][pos]);
        let observed = cost_source(state, control);
        let gamma = cfg.stepsize_a / (cfg.stepsize_b + visits[state][pos] as f64);
        visits[state][pos] += 1;
        let target = observed + alpha * q.row_min(next);
        let cell = &mut q.values[state][pos];
        *cell = (1.0 - gamma) * *cell + gamma * target;
        if !cell.is_finite() {
            return Err(Error::Divergence { step: t });
        }
        state = next;
        if (t + 1) % cadence == 0 && t + 1 < cfg.horizon {
            checkpoints.push((t + 1, q.clone()));
        }
    }
    if cfg.horizon > 0 {
        checkpoints.push((cfg.horizon, q.clone()));
    }

    Ok(QLearnRun {
        checkpoints,
        final_q: q,
    })
}

/// Unique fixed point of the falsified Bellman operator for a bounded
/// falsified cost table: the limit of stealthily poisoned Q-learning.
pub fn falsified_q_fixed_point(mdp: &Mdp, g_tilde: &CostTable, tol: f64) -> Result<QTable> {
    q_value_iteration(mdp, g_tilde, tol)
}

/// Recovers the cost table that a Q table is the fixed point of:
/// `g(i,u) = Q(i,u) - alpha sum_j p_ij(u) min_v Q(j,v)`.
///
/// This is the explicit inverse of the cost-to-fixed-point map.
pub fn cost_from_fixed_point(mdp: &Mdp, q: &QTable) -> CostTable {
    let mins: Vec<f64> = (0..mdp.num_states).map(|j| q.row_min(j)).collect();
    CostTable(
        (0..mdp.num_states)
            .map(|i| {
                (0..mdp.actions[i].len())
                    .map(|pos| {
                        let expected: f64 = mdp.transitions[i][pos]
                            .iter()
                            .zip(&mins)
                            .map(|(p, m)| p * m)
                            .sum();
                        q.values[i][pos] - mdp.discount * expected
                    })
                    .collect()
            })
            .collect(),
    )
}
