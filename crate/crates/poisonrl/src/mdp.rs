//! Finite discounted MDP model and exact dynamic-programming solvers.
//!
//! These are the deterministic oracles the rest of the crate is checked
//! against: policy evaluation by linear solve, Q-value iteration, greedy
//! policy extraction, and stationary distributions by power iteration.
//!
//! Indexing convention: states and controls are 0-based everywhere in the
//! API; file formats are 1-based and converted at the I/O boundary (see
//! [`crate::io`]). Cost and Q tables are ragged, with row `i` aligned
//! positionally with `actions[i]` (the strictly increasing list of
//! admissible control ids for state `i`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Row-sum tolerance for transition stochasticity.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Iteration cap for Q-value iteration.
pub const VALUE_ITER_CAP: usize = 1_000_000;

/// Iteration cap for stationary-distribution power iteration.
pub const POWER_ITER_CAP: usize = 1_000_000;

/// A table of per-(state, control) reals, row `i` aligned with `Mdp::actions[i]`.
///
/// Used for running costs, falsified costs, and cost perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable(pub Vec<Vec<f64>>);

impl CostTable {
    /// All-zero table shaped like the given action layout.
    pub fn zeros_like(actions: &[Vec<usize>]) -> Self {
        CostTable(actions.iter().map(|a| vec![0.0; a.len()]).collect())
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &CostTable) -> CostTable {
        CostTable(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        )
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &CostTable) -> CostTable {
        CostTable(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }

    /// Table with every entry scaled by `c`.
    pub fn scale(&self, c: f64) -> CostTable {
        CostTable(
            self.0
                .iter()
                .map(|r| r.iter().map(|x| c * x).collect())
                .collect(),
        )
    }

    /// Table with `c` added to every entry.
    pub fn shift(&self, c: f64) -> CostTable {
        CostTable(
            self.0
                .iter()
                .map(|r| r.iter().map(|x| x + c).collect())
                .collect(),
        )
    }

    /// Sup norm over all entries.
    pub fn sup_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sup-norm distance to another table of the same shape.
    pub fn sup_distance(&self, other: &CostTable) -> f64 {
        self.sub(other).sup_norm()
    }

    fn check_shape(&self, mdp: &Mdp) -> Result<()> {
        if self.0.len() != mdp.num_states {
            return Err(Error::ShapeMismatch(format!(
                "cost table has {} rows, model has {} states",
                self.0.len(),
                mdp.num_states
            )));
        }
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != mdp.actions[i].len() {
                return Err(Error::ShapeMismatch(format!(
                    "cost row {} has {} entries, state admits {} controls",
                    i,
                    row.len(),
                    mdp.actions[i].len()
                )));
            }
            for (pos, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry {
                        state: i,
                        control: mdp.actions[i][pos],
                    });
                }
            }
        }
        Ok(())
    }
}

/// Finite discounted MDP `(S, A, g, P, alpha)` with per-state admissible controls.
#[derive(Debug, Clone)]
pub struct Mdp {
    /// Number of states; states are `0..num_states`.
    pub num_states: usize,
    /// `actions[i]` lists the admissible control ids of state `i`, strictly increasing.
    pub actions: Vec<Vec<usize>>,
    /// `transitions[i][pos][j]` is the probability of moving to `j` when
    /// applying the control at position `pos` of `actions[i]` in state `i`.
    pub transitions: Vec<Vec<Vec<f64>>>,
    /// Running cost per (state, control position).
    pub costs: CostTable,
    /// Discount factor, strictly inside (0, 1).
    pub discount: f64,
}

impl Mdp {
    /// Builds and validates a model.
    pub fn new(
        actions: Vec<Vec<usize>>,
        transitions: Vec<Vec<Vec<f64>>>,
        costs: CostTable,
        discount: f64,
    ) -> Result<Self> {
        let mdp = Mdp {
            num_states: actions.len(),
            actions,
            transitions,
            costs,
            discount,
        };
        mdp.validate()?;
        Ok(mdp)
    }

    /// Checks every model invariant: stochastic rows, discount in (0, 1),
    /// nonempty strictly increasing control lists, finite costs, consistent shapes.
    pub fn validate(&self) -> Result<()> {
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::BadDiscount(self.discount));
        }
        if self.transitions.len() != self.num_states || self.actions.len() != self.num_states {
            return Err(Error::ShapeMismatch(
                "actions/transitions length differs from state count".into(),
            ));
        }
        for (i, acts) in self.actions.iter().enumerate() {
            if acts.is_empty() {
                return Err(Error::EmptyActionSet(i));
            }
            for w in acts.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::BadActionList {
                        state: i,
                        reason: "control ids must be strictly increasing".into(),
                    });
                }
            }
            if self.transitions[i].len() != acts.len() {
                return Err(Error::ShapeMismatch(format!(
                    "state {} lists {} controls but {} transition rows",
                    i,
                    acts.len(),
                    self.transitions[i].len()
                )));
            }
            for (pos, row) in self.transitions[i].iter().enumerate() {
                if row.len() != self.num_states {
                    return Err(Error::ShapeMismatch(format!(
                        "transition row for state {}, control {} has length {}",
                        i,
                        acts[pos],
                        row.len()
                    )));
                }
                let mut sum = 0.0;
                for &p in row {
                    if !(p >= 0.0) || !p.is_finite() {
                        return Err(Error::RowNotStochastic {
                            state: i,
                            control: acts[pos],
                            sum: f64::NAN,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::RowNotStochastic {
                        state: i,
                        control: acts[pos],
                        sum,
                    });
                }
            }
        }
        self.costs.check_shape(self)
    }

    /// Position of control id `control` within `actions[state]`, if admissible.
    pub fn action_position(&self, state: usize, control: usize) -> Option<usize> {
        self.actions[state].iter().position(|&u| u == control)
    }

    /// Running cost of an admissible (state, control-id) pair.
    pub fn cost(&self, state: usize, control: usize) -> f64 {
        let pos = self
            .action_position(state, control)
            .expect("inadmissible control");
        self.costs.0[state][pos]
    }

    /// Value of an arbitrary table at an admissible (state, control-id) pair.
    pub fn table_value(&self, table: &CostTable, state: usize, control: usize) -> f64 {
        let pos = self
            .action_position(state, control)
            .expect("inadmissible control");
        table.0[state][pos]
    }

    /// Transition row for an admissible (state, control-id) pair.
    pub fn transition_row(&self, state: usize, control: usize) -> &[f64] {
        let pos = self
            .action_position(state, control)
            .expect("inadmissible control");
        &self.transitions[state][pos]
    }

    /// True when every state admits exactly the controls `0..m` for a common `m`.
    pub fn has_uniform_controls(&self) -> bool {
        let m = self.actions[0].len();
        self.actions
            .iter()
            .all(|a| a.len() == m && a.iter().copied().eq(0..m))
    }

    /// Total number of distinct control ids across all states.
    pub fn num_controls(&self) -> usize {
        self.actions
            .iter()
            .flat_map(|a| a.iter())
            .max()
            .map_or(0, |&m| m + 1)
    }
}

/// Deterministic stationary policy: control id per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    /// Checks that the policy selects an admissible control in every state.
    pub fn validate_for(&self, mdp: &Mdp) -> Result<()> {
        if self.0.len() != mdp.num_states {
            return Err(Error::ShapeMismatch(format!(
                "policy has {} entries, model has {} states",
                self.0.len(),
                mdp.num_states
            )));
        }
        for (i, &u) in self.0.iter().enumerate() {
            if mdp.action_position(i, u).is_none() {
                return Err(Error::InadmissibleControl { state: i, control: u });
            }
        }
        Ok(())
    }
}

/// Q-factor table, ragged like the cost table, carrying its own action layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    /// Admissible control ids per state (same layout as the source model).
    pub actions: Vec<Vec<usize>>,
    /// Q values aligned positionally with `actions`.
    pub values: Vec<Vec<f64>>,
}

impl QTable {
    /// All-zero table for the given model.
    pub fn zeros(mdp: &Mdp) -> Self {
        QTable {
            actions: mdp.actions.clone(),
            values: mdp.actions.iter().map(|a| vec![0.0; a.len()]).collect(),
        }
    }

    /// Value at an admissible (state, control-id) pair.
    pub fn get(&self, state: usize, control: usize) -> f64 {
        let pos = self.actions[state]
            .iter()
            .position(|&u| u == control)
            .expect("inadmissible control");
        self.values[state][pos]
    }

    /// Minimum Q value over the admissible controls of `state`.
    pub fn row_min(&self, state: usize) -> f64 {
        self.values[state]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Sup-norm distance to another table of identical layout.
    pub fn sup_distance(&self, other: &QTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Largest absolute entry.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }
}

/// Stationary distribution of the chain induced by a policy, with the
/// diagonal weight matrix it defines.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    /// Long-run state probabilities, strictly positive and summing to one.
    pub probabilities: Vec<f64>,
}

impl StationaryDistribution {
    /// Diagonal weight matrix `D = diag(pi)`.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.probabilities.clone()))
    }
}

/// Transition matrix `P_mu` of the chain induced by `mu`: row `i` is the
/// transition row of `(i, mu(i))`.
pub fn policy_transition_matrix(mdp: &Mdp, mu: &Policy) -> Result<DMatrix<f64>> {
    mdp.validate()?;
    mu.validate_for(mdp)?;
    let n = mdp.num_states;
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = mdp.transition_row(i, mu.0[i]);
        for j in 0..n {
            p[(i, j)] = row[j];
        }
    }
    Ok(p)
}

/// Cost vector of a policy: component `i` is the running cost of `(i, mu(i))`.
pub fn policy_cost_vector(mdp: &Mdp, mu: &Policy, cost: &CostTable) -> Result<DVector<f64>> {
    cost.check_shape(mdp)?;
    mu.validate_for(mdp)?;
    Ok(DVector::from_fn(mdp.num_states, |i, _| {
        mdp.table_value(cost, i, mu.0[i])
    }))
}

/// Exact cost-to-go of a stationary policy: solves `(I - alpha P_mu) J = g_mu`.
///
/// The residual of the returned vector is at most 1e-10 in sup norm.
pub fn evaluate_policy_exact(mdp: &Mdp, mu: &Policy) -> Result<Vec<f64>> {
    evaluate_policy_exact_with(mdp, mu, &mdp.costs)
}

/// Same as [`evaluate_policy_exact`] but against an arbitrary cost table.
pub fn evaluate_policy_exact_with(mdp: &Mdp, mu: &Policy, cost: &CostTable) -> Result<Vec<f64>> {
    let p = policy_transition_matrix(mdp, mu)?;
    let g = policy_cost_vector(mdp, mu, cost)?;
    let n = mdp.num_states;
    let system = DMatrix::identity(n, n) - mdp.discount * &p;
    let lu = system.clone().lu();
    let mut j = lu
        .solve(&g)
        .ok_or_else(|| Error::SingularSystem("policy evaluation".into()))?;
    // One step of iterative refinement keeps the residual at solver noise.
    let residual = &g - &system * &j;
    if let Some(correction) = lu.solve(&residual) {
        j += correction;
    }
    let final_residual = (&g - &system * &j).amax();
    if final_residual > 1e-10 {
        return Err(Error::SingularSystem(format!(
            "policy evaluation residual {final_residual:e}"
        )));
    }
    Ok(j.iter().copied().collect())
}

/// One application of the Q-Bellman operator for an arbitrary cost table:
/// `F(Q)(i,u) = cost(i,u) + alpha * sum_j p_ij(u) min_v Q(j,v)`.
pub fn bellman_update(mdp: &Mdp, cost: &CostTable, q: &QTable) -> QTable {
    let mins: Vec<f64> = (0..mdp.num_states).map(|j| q.row_min(j)).collect();
    let values = (0..mdp.num_states)
        .map(|i| {
            (0..mdp.actions[i].len())
                .map(|pos| {
                    let expected: f64 = mdp.transitions[i][pos]
                        .iter()
                        .zip(&mins)
                        .map(|(p, m)| p * m)
                        .sum();
                    cost.0[i][pos] + mdp.discount * expected
                })
                .collect()
        })
        .collect();
    QTable {
        actions: mdp.actions.clone(),
        values,
    }
}

/// Sup-norm Bellman residual `max |F(Q) - Q|` for the given cost table.
pub fn bellman_residual(mdp: &Mdp, cost: &CostTable, q: &QTable) -> f64 {
    bellman_update(mdp, cost, q).sup_distance(q)
}

/// Solves `F(Q) = Q` by successive approximation for an arbitrary cost table.
///
/// Stops once the iterate gap falls below `tol * (1 - alpha) / alpha`, which
/// guarantees `|Q - Q*|_inf <= tol` by the contraction estimate. The same
/// routine therefore serves as the fixed-point oracle for falsified costs.
pub fn q_value_iteration(mdp: &Mdp, cost: &CostTable, tol: f64) -> Result<QTable> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    mdp.validate()?;
    cost.check_shape(mdp)?;
    let gap_target = tol * (1.0 - mdp.discount) / mdp.discount;
    let mut q = QTable::zeros(mdp);
    for _ in 0..VALUE_ITER_CAP {
        let next = bellman_update(mdp, cost, &q);
        let gap = next.sup_distance(&q);
        q = next;
        if gap <= gap_target {
            return Ok(q);
        }
    }
    Err(Error::NonConvergence {
        max_iters: VALUE_ITER_CAP,
    })
}

/// Row-argmin policy of a Q table; ties break toward the lowest control id.
pub fn greedy_policy(q: &QTable) -> Policy {
    Policy(
        q.values
            .iter()
            .zip(&q.actions)
            .map(|(row, acts)| {
                let mut best = 0;
                for (pos, &v) in row.iter().enumerate() {
                    if v < row[best] {
                        best = pos;
                    }
                }
                acts[best]
            })
            .collect(),
    )
}

/// Stationary distribution of the chain induced by `mu`, by power iteration.
///
/// The returned vector satisfies `|pi' P_mu - pi'|_inf <= tol` exactly as
/// returned. Fails with `NotErgodic` when the iteration hits its cap (periodic
/// chains) or some entry drops to zero (reducible chains); entries at or below
/// 1e-10 are treated as zero.
pub fn stationary_distribution(
    mdp: &Mdp,
    mu: &Policy,
    tol: f64,
) -> Result<StationaryDistribution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let p = policy_transition_matrix(mdp, mu)?;
    let n = mdp.num_states;
    // Ramp start rather than uniform: the uniform vector is invariant for
    // doubly stochastic periodic chains, which would mask non-ergodicity.
    let ramp_total = (n * (n + 1)) as f64 / 2.0;
    let mut pi: Vec<f64> = (1..=n).map(|i| i as f64 / ramp_total).collect();
    for _ in 0..POWER_ITER_CAP {
        let mut next = vec![0.0; n];
        for (i, &w) in pi.iter().enumerate() {
            if w != 0.0 {
                for j in 0..n {
                    next[j] += w * p[(i, j)];
                }
            }
        }
        let diff = pi
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if diff <= tol {
            if pi.iter().any(|&x| x <= 1e-10) {
                return Err(Error::NotErgodic(
                    "stationary weight vanished at some state".into(),
                ));
            }
            return Ok(StationaryDistribution { probabilities: pi });
        }
        pi = next;
    }
    Err(Error::NotErgodic(format!(
        "power iteration did not settle within {POWER_ITER_CAP} iterations"
    )))
}
