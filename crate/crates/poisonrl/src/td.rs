//! On-line every-visit TD(lambda) with linear function approximation, and
//! the analytic fixed point of the limiting linear system.
//!
//! For a fixed policy the simulated iterates converge to the solution of
//! `A r + b = 0` with `A = Phi' D (M - I) Phi` and `b = Phi' D q`, where `M`
//! and `q` are geometric series in the discounted policy transition matrix.
//! Both series are evaluated in closed form here. Feeding a falsified cost
//! table into [`td_fixed_point`] yields the limit the learner reaches under
//! a stealthy attack.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mdp::{
    policy_cost_vector, policy_transition_matrix, stationary_distribution, CostTable, Mdp,
    Policy, StationaryDistribution,
};

/// Default numerator of the tapering stepsize `a / (b + t)`.
pub const DEFAULT_STEPSIZE_A: f64 = 100.0;
/// Default denominator offset of the tapering stepsize `a / (b + t)`.
pub const DEFAULT_STEPSIZE_B: f64 = 100.0;

/// Relative singular-value cutoff for the basis rank check.
const RANK_TOL: f64 = 1e-10;

/// Feature matrix with one row of basis values per state.
#[derive(Debug, Clone)]
pub struct FeatureBasis {
    matrix: DMatrix<f64>,
}

impl FeatureBasis {
    /// Wraps an `n x K` feature matrix, requiring `K <= n` and full column rank.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (n, k) = matrix.shape();
        if k == 0 || k > n {
            return Err(Error::ShapeMismatch(format!(
                "basis must have between 1 and {n} columns, got {k}"
            )));
        }
        let svd = matrix.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_TOL * smax.max(1.0))
            .count();
        if rank < k {
            return Err(Error::RankDeficientBasis { rank, cols: k });
        }
        Ok(FeatureBasis { matrix })
    }

    /// Identity (tabular) basis: one indicator feature per state.
    pub fn identity(n: usize) -> Self {
        FeatureBasis {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Number of states the basis covers.
    pub fn num_states(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of tunable parameters.
    pub fn num_features(&self) -> usize {
        self.matrix.ncols()
    }

    /// The underlying `n x K` matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Feature vector of one state.
    pub fn features(&self, state: usize) -> DVector<f64> {
        self.matrix.row(state).transpose()
    }

    /// Approximate value vector `Phi r` for a parameter vector.
    pub fn values(&self, weights: &DVector<f64>) -> Vec<f64> {
        (&self.matrix * weights).iter().copied().collect()
    }
}

/// Configuration of one stochastic TD(lambda) run.
#[derive(Debug, Clone)]
pub struct TdConfig {
    /// Trace decay parameter in `[0, 1]`.
    pub lambda: f64,
    /// Stepsize numerator: `gamma_t = stepsize_a / (stepsize_b + t)`.
    pub stepsize_a: f64,
    /// Stepsize denominator offset, at least one.
    pub stepsize_b: f64,
    /// Number of transitions to simulate.
    pub horizon: usize,
    /// RNG seed; runs are deterministic given the seed.
    pub seed: u64,
    /// Initial parameter vector; zeros when absent.
    pub initial_weights: Option<DVector<f64>>,
}

impl TdConfig {
    /// Run configuration with the default tapering stepsize and zero start.
    pub fn new(lambda: f64, horizon: usize, seed: u64) -> Self {
        TdConfig {
            lambda,
            stepsize_a: DEFAULT_STEPSIZE_A,
            stepsize_b: DEFAULT_STEPSIZE_B,
            horizon,
            seed,
            initial_weights: None,
        }
    }

    fn validate(&self, num_features: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if !(self.stepsize_a > 0.0) || !(self.stepsize_b >= 1.0) {
            return Err(Error::InvalidArgument(
                "stepsize requires a > 0 and b >= 1".into(),
            ));
        }
        if let Some(r0) = &self.initial_weights {
            if r0.len() != num_features {
                return Err(Error::ShapeMismatch(format!(
                    "initial weights have length {}, basis has {} features",
                    r0.len(),
                    num_features
                )));
            }
        }
        Ok(())
    }
}

/// Analytic limit of TD(lambda): the solution of `A r + b = 0` together with
/// the matrices that define it.
#[derive(Debug, Clone)]
pub struct TdFixedPoint {
    /// Limit parameter vector `r*`.
    pub weights: DVector<f64>,
    /// Coefficient matrix `A = Phi' D (M - I) Phi`.
    pub coeff_matrix: DMatrix<f64>,
    /// Offset vector `b = Phi' D q`.
    pub offset: DVector<f64>,
    /// Multi-step transition operator `M = (1-lambda) sum_m lambda^m (alpha P)^{m+1}`.
    pub multistep: DMatrix<f64>,
    /// Discounted trace-weighted cost vector `q = sum_m (alpha lambda P)^m g`.
    pub discounted_cost: DVector<f64>,
    /// Weighted projection matrix onto the basis span.
    pub projection: DMatrix<f64>,
    /// Stationary distribution defining the weighting.
    pub stationary: StationaryDistribution,
}

impl TdFixedPoint {
    /// Approximate value vector `Phi r*`.
    pub fn values(&self, basis: &FeatureBasis) -> Vec<f64> {
        basis.values(&self.weights)
    }
}

/// Result of one stochastic TD run: periodic parameter snapshots plus the
/// final vector.
#[derive(Debug, Clone)]
pub struct TdRun {
    /// `(step, weights)` snapshots, including step 0 and the final step.
    pub checkpoints: Vec<(usize, DVector<f64>)>,
    /// Parameters after the full horizon.
    pub final_weights: DVector<f64>,
}

/// Weighted quadratic norm `sqrt(sum_i pi(i) J(i)^2)`.
pub fn weighted_norm(values: &[f64], dist: &StationaryDistribution) -> f64 {
    assert_eq!(
        values.len(),
        dist.probabilities.len(),
        "weighted_norm: length mismatch"
    );
    values
        .iter()
        .zip(&dist.probabilities)
        .map(|(v, p)| p * v * v)
        .sum::<f64>()
        .sqrt()
}

/// Weighted norm of the difference of two value vectors.
pub fn weighted_distance(a: &[f64], b: &[f64], dist: &StationaryDistribution) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    weighted_norm(&diff, dist)
}

/// Weighted projection matrix `Pi = Phi (Phi' D Phi)^{-1} Phi' D`.
///
/// For every vector `J`, `Pi J` minimizes the `D`-weighted distance from `J`
/// over the span of the basis columns.
pub fn projection_matrix(
    basis: &FeatureBasis,
    dist: &StationaryDistribution,
) -> Result<DMatrix<f64>> {
    let phi = basis.matrix();
    let d = dist.weight_matrix();
    let phi_t_d = phi.transpose() * &d;
    let gram = &phi_t_d * phi;
    let lu = gram.lu();
    let solved = lu.solve(&phi_t_d).ok_or(Error::SingularGram)?;
    Ok(phi * solved)
}

/// Analytic TD(lambda) fixed point for an arbitrary cost table.
///
/// `M` and `q` are evaluated in closed form: `M = (1-lambda) alpha P (I -
/// lambda alpha P)^{-1}` and `q = (I - alpha lambda P)^{-1} g_mu`. Passing a
/// falsified cost table yields the limit parameters learned under that
/// falsification.
pub fn td_fixed_point(
    mdp: &Mdp,
    mu: &Policy,
    basis: &FeatureBasis,
    lambda: f64,
    cost: &CostTable,
) -> Result<TdFixedPoint> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside [0, 1]"
        )));
    }
    if basis.num_states() != mdp.num_states {
        return Err(Error::ShapeMismatch(format!(
            "basis covers {} states, model has {}",
            basis.num_states(),
            mdp.num_states
        )));
    }
    let alpha = mdp.discount;
    let n = mdp.num_states;
    let p = policy_transition_matrix(mdp, mu)?;
    let g_mu = policy_cost_vector(mdp, mu, cost)?;
    let dist = stationary_distribution(mdp, mu, 1e-12)?;

    let eye = DMatrix::identity(n, n);
    let resolvent = (&eye - lambda * alpha * &p)
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem("(I - lambda alpha P) inverse".into()))?;
    let multistep = (1.0 - lambda) * alpha * &p * &resolvent;
    let discounted_cost = &resolvent * &g_mu;

    let d = dist.weight_matrix();
    let phi = basis.matrix();
    let phi_t_d = phi.transpose() * &d;
    let coeff_matrix = &phi_t_d * (&multistep - &eye) * phi;
    let offset = &phi_t_d * &discounted_cost;

    let lu = coeff_matrix.clone().lu();
    let mut weights = lu.solve(&(-&offset)).ok_or(Error::SingularA)?;
    // One refinement pass to push the residual to solver noise.
    let residual = -&offset - &coeff_matrix * &weights;
    if let Some(correction) = lu.solve(&residual) {
        weights += correction;
    }
    if (&coeff_matrix * &weights + &offset).amax() > 1e-9 {
        return Err(Error::SingularA);
    }

    let projection = projection_matrix(basis, &dist)?;
    Ok(TdFixedPoint {
        weights,
        coeff_matrix,
        offset,
        multistep,
        discounted_cost,
        projection,
        stationary: dist,
    })
}

/// Simulates one on-line TD(lambda) trajectory under an arbitrary cost
/// oracle (true, falsified, or interactive).
///
/// The oracle maps each visited `(state, control)` pair to the observed
/// scalar cost. The chain starts from a state drawn from the stationary
/// distribution (state 0 when the chain is not ergodic), the eligibility
/// trace starts at zero, and snapshots are taken every `horizon / 100`
/// steps. Deterministic given the seed.
pub fn run_td<F>(
    mdp: &Mdp,
    mu: &Policy,
    basis: &FeatureBasis,
    cfg: &TdConfig,
    mut cost_source: F,
) -> Result<TdRun>
where
    F: FnMut(usize, usize) -> f64,
{
    mdp.validate()?;
    mu.validate_for(mdp)?;
    if basis.num_states() != mdp.num_states {
        return Err(Error::ShapeMismatch(format!(
            "basis covers {} states, model has {}",
            basis.num_states(),
            mdp.num_states
        )));
    }
    let k = basis.num_features();
    cfg.validate(k)?;

    let alpha = mdp.discount;
    let decay = alpha * cfg.lambda;
    let features: Vec<DVector<f64>> = (0..mdp.num_states).map(|i| basis.features(i)).collect();
    let rows: Vec<&[f64]> = (0..mdp.num_states)
        .map(|i| mdp.transition_row(i, mu.0[i]))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = match stationary_distribution(mdp, mu, 1e-12) {
        Ok(dist) => sample_index(&mut rng, &dist.probabilities),
        Err(_) => 0,
    };

    let mut weights = cfg
        .initial_weights
        .clone()
        .unwrap_or_else(|| DVector::zeros(k));
    let mut trace: DVector<f64> = DVector::zeros(k);

    let cadence = (cfg.horizon / 100).max(1);
    let mut checkpoints = vec![(0, weights.clone())];

    for t in 0..cfg.horizon {
        trace = decay * trace + &features[state];
        let next = sample_index(&mut rng, rows[state]);
        let observed = cost_source(state, mu.0[state]);
        let diff = observed + alpha * weights.dot(&features[next]) - weights.dot(&features[state]);
        let gamma = cfg.stepsize_a / (cfg.stepsize_b + t as f64);
        weights.axpy(gamma * diff, &trace, 1.0);
        if weights.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { step: t });
        }
        state = next;
        if (t + 1) % cadence == 0 && t + 1 < cfg.horizon {
            checkpoints.push((t + 1, weights.clone()));
        }
    }
    if cfg.horizon > 0 {
        checkpoints.push((cfg.horizon, weights.clone()));
    }

    Ok(TdRun {
        checkpoints,
        final_weights: weights,
    })
}

/// Samples an index from a probability row via inverse CDF.
pub(crate) fn sample_index<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = j;
            if u < acc {
                return j;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_basis, random_mcp};
    use crate::mdp::evaluate_policy_exact;
    use approx::assert_abs_diff_eq;

    fn single_state_mdp(cost: f64, alpha: f64) -> (Mdp, Policy) {
        (
            Mdp::new(
                vec![vec![0]],
                vec![vec![vec![1.0]]],
                CostTable(vec![vec![cost]]),
                alpha,
            )
            .unwrap(),
            Policy(vec![0]),
        )
    }

    #[test]
    fn weighted_norm_of_zero() {
        let dist = StationaryDistribution {
            probabilities: vec![0.25; 4],
        };
        assert_eq!(weighted_norm(&[0.0; 4], &dist), 0.0);
    }

    #[test]
    fn weighted_norm_constant_vector() {
        let dist = StationaryDistribution {
            probabilities: vec![0.25; 4],
        };
        assert_abs_diff_eq!(weighted_norm(&[2.0; 4], &dist), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn weighted_norm_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw: Vec<f64> = (0..6).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let pi: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let values: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let dist = StationaryDistribution {
            probabilities: pi.clone(),
        };
        let direct: f64 = pi
            .iter()
            .zip(&values)
            .map(|(p, v)| p * v * v)
            .sum::<f64>()
            .sqrt();
        assert_abs_diff_eq!(weighted_norm(&values, &dist), direct, epsilon = 1e-14);
    }

    #[test]
    fn tabular_basis_is_exact_for_all_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let (mdp, mu) = random_mcp(&mut rng, 6, 0.9);
            let j = evaluate_policy_exact(&mdp, &mu).unwrap();
            let basis = FeatureBasis::identity(6);
            for &lambda in &[0.0, 0.5, 1.0] {
                let fp = td_fixed_point(&mdp, &mu, &basis, lambda, &mdp.costs).unwrap();
                let approx = fp.values(&basis);
                for (a, b) in approx.iter().zip(&j) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn lambda_one_yields_weighted_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let (mdp, mu) = random_mcp(&mut rng, 7, 0.85);
            let basis = random_basis(&mut rng, 7, 3);
            let fp = td_fixed_point(&mdp, &mu, &basis, 1.0, &mdp.costs).unwrap();
            let j = evaluate_policy_exact(&mdp, &mu).unwrap();
            let jv = DVector::from_vec(j);
            let projected = &fp.projection * &jv;
            let approx = fp.values(&basis);
            for (a, b) in approx.iter().zip(projected.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_series_match_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (mdp, mu) = random_mcp(&mut rng, 5, 0.9);
        let lambda = 0.5;
        let basis = FeatureBasis::identity(5);
        let fp = td_fixed_point(&mdp, &mu, &basis, lambda, &mdp.costs).unwrap();
        let p = policy_transition_matrix(&mdp, &mu).unwrap();
        let g_mu = policy_cost_vector(&mdp, &mu, &mdp.costs).unwrap();
        let n = 5;
        let mut m_series = DMatrix::<f64>::zeros(n, n);
        let mut q_series = DVector::<f64>::zeros(n);
        let mut pw = DMatrix::<f64>::identity(n, n);
        for m in 0..=200usize {
            // pw holds P^m at loop entry.
            q_series += (mdp.discount * lambda).powi(m as i32) * (&pw * &g_mu);
            let pw_next = &pw * &p;
            m_series += (1.0 - lambda)
                * lambda.powi(m as i32)
                * mdp.discount.powi(m as i32 + 1)
                * &pw_next;
            pw = pw_next;
        }
        assert!((&fp.multistep - &m_series).amax() < 1e-10);
        assert!((&fp.discounted_cost - &q_series).amax() < 1e-10);
    }

    #[test]
    fn fixed_point_residual_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let (mdp, mu) = random_mcp(&mut rng, 6, 0.9);
        let basis = random_basis(&mut rng, 6, 3);
        let fp = td_fixed_point(&mdp, &mu, &basis, 0.3, &mdp.costs).unwrap();
        let resid = (&fp.coeff_matrix * &fp.weights + &fp.offset).amax();
        assert!(resid <= 1e-9, "residual {resid}");
    }

    #[test]
    fn projection_identity_for_tabular_basis() {
        let dist = StationaryDistribution {
            probabilities: vec![0.2, 0.3, 0.5],
        };
        let pi = projection_matrix(&FeatureBasis::identity(3), &dist).unwrap();
        assert!((pi - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
    }

    #[test]
    fn projection_onto_constants_averages() {
        let n = 4;
        let basis = FeatureBasis::new(DMatrix::from_element(n, 1, 1.0)).unwrap();
        let dist = StationaryDistribution {
            probabilities: vec![0.25; n],
        };
        let pi = projection_matrix(&basis, &dist).unwrap();
        let j = DVector::from_vec(vec![1.0, 2.0, 3.0, 6.0]);
        let projected = pi * j;
        for v in projected.iter() {
            assert_abs_diff_eq!(*v, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent_and_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (mdp, mu) = random_mcp(&mut rng, 8, 0.9);
        let dist = stationary_distribution(&mdp, &mu, 1e-12).unwrap();
        let basis = random_basis(&mut rng, 8, 3);
        let pi = projection_matrix(&basis, &dist).unwrap();
        assert!((&pi * &pi - &pi).amax() < 1e-8);

        let j: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let jv = DVector::from_vec(j.clone());
        let best: Vec<f64> = (&pi * &jv).iter().copied().collect();
        let best_err = weighted_distance(&best, &j, &dist);
        for _ in 0..1000 {
            let r = DVector::from_fn(3, |_, _| rng.gen_range(-5.0..5.0));
            let cand = basis.values(&r);
            let err = weighted_distance(&cand, &j, &dist);
            assert!(best_err <= err + 1e-10);
        }
    }

    #[test]
    fn run_td_zero_horizon_returns_initial() {
        let (mdp, mu) = single_state_mdp(1.0, 0.9);
        let basis = FeatureBasis::identity(1);
        let mut cfg = TdConfig::new(0.0, 0, 42);
        cfg.initial_weights = Some(DVector::from_vec(vec![3.5]));
        let run = run_td(&mdp, &mu, &basis, &cfg, |i, u| {
            let _ = (i, u);
            1.0
        })
        .unwrap();
        assert_eq!(run.final_weights[0], 3.5);
        assert_eq!(run.checkpoints.len(), 1);
        assert_eq!(run.checkpoints[0].0, 0);
    }

    #[test]
    fn run_td_single_state_converges_to_value() {
        // Deterministic single-state chain: the recursion contracts toward
        // g / (1 - alpha) = 10. A faster-than-default stepsize makes the
        // deterministic error vanish within the horizon.
        let (mdp, mu) = single_state_mdp(1.0, 0.9);
        let basis = FeatureBasis::identity(1);
        let mut cfg = TdConfig::new(0.0, 100_000, 1);
        cfg.stepsize_a = 20.0;
        cfg.stepsize_b = 1.0;
        let run = run_td(&mdp, &mu, &basis, &cfg, |_, _| 1.0).unwrap();
        assert_abs_diff_eq!(run.final_weights[0], 10.0, epsilon = 0.05);
    }

    #[test]
    fn run_td_matches_hand_rolled_recursion() {
        // Single deterministic state lets the trace be computed in closed
        // form; any drift in the eligibility recursion breaks this equality.
        let (mdp, mu) = single_state_mdp(1.0, 0.9);
        let basis = FeatureBasis::identity(1);
        let lambda = 0.7;
        let mut cfg = TdConfig::new(lambda, 50, 5);
        cfg.stepsize_a = 1.0;
        cfg.stepsize_b = 2.0;
        let run = run_td(&mdp, &mu, &basis, &cfg, |_, _| 1.0).unwrap();

        let alpha = 0.9;
        let mut r = 0.0;
        for t in 0..50usize {
            // eta_t = sum_{k=0..t} (alpha lambda)^k on the constant chain.
            let decay: f64 = alpha * lambda;
            let eta = (1.0 - decay.powi(t as i32 + 1)) / (1.0 - decay);
            let d = 1.0 + alpha * r - r;
            let gamma = 1.0 / (2.0 + t as f64);
            r += gamma * d * eta;
        }
        assert_abs_diff_eq!(run.final_weights[0], r, epsilon = 1e-12);
    }

    #[test]
    fn run_td_is_deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (mdp, mu) = random_mcp(&mut rng, 5, 0.9);
        let basis = random_basis(&mut rng, 5, 2);
        let cfg = TdConfig::new(0.5, 2000, 99);
        let costs = mdp.costs.clone();
        let a = run_td(&mdp, &mu, &basis, &cfg, |i, u| {
            mdp.table_value(&costs, i, u)
        })
        .unwrap();
        let b = run_td(&mdp, &mu, &basis, &cfg, |i, u| {
            mdp.table_value(&costs, i, u)
        })
        .unwrap();
        assert_eq!(a.final_weights, b.final_weights);
        assert_eq!(a.checkpoints.len(), b.checkpoints.len());
    }

    #[test]
    fn run_td_approaches_analytic_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let (mdp, mu) = random_mcp(&mut rng, 5, 0.9);
        let basis = random_basis(&mut rng, 5, 2);
        let lambda = 0.5;
        let fp = td_fixed_point(&mdp, &mu, &basis, lambda, &mdp.costs).unwrap();
        let target = fp.values(&basis);

        let mut cfg = TdConfig::new(lambda, 200_000, 3);
        cfg.stepsize_a = 50.0;
        cfg.stepsize_b = 100.0;
        let costs = mdp.costs.clone();
        let run = run_td(&mdp, &mu, &basis, &cfg, |i, u| {
            mdp.table_value(&costs, i, u)
        })
        .unwrap();

        let initial_err = weighted_norm(&target, &fp.stationary);
        let final_vals = basis.values(&run.final_weights);
        let final_err = weighted_distance(&final_vals, &target, &fp.stationary);
        assert!(
            final_err < 0.05 * initial_err.max(1.0),
            "final {final_err} vs initial {initial_err}"
        );
    }
}
