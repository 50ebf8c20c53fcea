//! Shared training configuration: the decaying learning-rate schedule and
//! the Monte-Carlo coefficient annealer used as the gradient alternative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::anneal::acceptance_probability;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMethod {
    Gradient,
    MonteCarlo,
}

/// Configuration for the iterative trainers. The learning rate decays as
/// `eta(k) = eta0 / (1 + k / decay_tau)`, strictly decreasing in `k`.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub eta0: f64,
    pub decay_tau: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub method: TrainMethod,
}

impl TrainConfig {
    pub fn gradient(eta0: f64, decay_tau: f64, max_iters: usize, seed: u64) -> Self {
        Self { eta0, decay_tau, max_iters, seed, method: TrainMethod::Gradient }
    }

    pub fn monte_carlo(eta0: f64, decay_tau: f64, max_iters: usize, seed: u64) -> Self {
        Self { eta0, decay_tau, max_iters, seed, method: TrainMethod::MonteCarlo }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0) || !self.eta0.is_finite() {
            return Err(Error::invalid(format!("eta0 must be positive, got {}", self.eta0)));
        }
        if !(self.decay_tau > 0.0) || !self.decay_tau.is_finite() {
            return Err(Error::invalid(format!(
                "decay_tau must be positive, got {}",
                self.decay_tau
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn eta(&self, k: usize) -> f64 {
        self.eta0 / (1.0 + k as f64 / self.decay_tau)
    }
}

/// Anneals a flat coefficient vector against `cost`. One coefficient is
/// perturbed per iteration by a Gaussian step with standard deviation
/// `eta(k)`; moves are accepted by the Glauber rule at inverse temperature
/// `1 / eta(k)`, so cooling follows the learning-rate decay. Returns the
/// best state seen and its cost.
pub(crate) fn anneal_coefficients<F>(
    init: Vec<f64>,
    cost: F,
    cfg: &TrainConfig,
) -> (Vec<f64>, f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = init;
    let mut current = cost(&state);
    let mut best = state.clone();
    let mut best_cost = current;
    let mut trace = Vec::with_capacity(cfg.max_iters + 1);
    trace.push(best_cost);

    for k in 0..cfg.max_iters {
        let eta = cfg.eta(k);
        let beta = 1.0 / eta;
        let idx = rng.gen_range(0..state.len());
        let step = Normal::new(0.0, eta).expect("eta positive").sample(&mut rng);
        let old = state[idx];
        state[idx] = old + step;
        let cand = cost(&state);
        let accept = cand.is_finite()
            && rng.gen::<f64>() < acceptance_probability(cand - current, beta);
        if accept {
            current = cand;
            if cand < best_cost {
                best_cost = cand;
                best.copy_from_slice(&state);
            }
        } else {
            state[idx] = old;
        }
        trace.push(best_cost);
    }
    (best, best_cost, trace)
}
