//! Three-layer feed-forward network (input d, hidden M, output d) with
//! sigmoid activations and no bias terms, trained by full backpropagation or
//! Monte-Carlo annealing. Also serves as the computational core of the block
//! autoencoder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::train::{anneal_coefficients, TrainConfig, TrainMethod};

/// Steepness-`lambda` logistic function `1 / (1 + exp(-lambda x))`.
#[inline]
pub fn sigmoid(x: f64, lambda: f64) -> f64 {
    1.0 / (1.0 + (-lambda * x).exp())
}

/// Dense synaptic matrices of the two layer transitions, row-major:
/// `w1` is hidden x in, `w2` is out x hidden.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    in_dim: usize,
    hidden: usize,
    out_dim: usize,
    w1: Vec<f64>,
    w2: Vec<f64>,
    lambda1: f64,
    lambda2: f64,
}

impl LayerWeights {
    pub fn zeros(in_dim: usize, hidden: usize, out_dim: usize) -> Result<Self> {
        if in_dim == 0 || hidden == 0 || out_dim == 0 {
            return Err(Error::invalid(format!(
                "layer sizes must be positive, got {in_dim}x{hidden}x{out_dim}"
            )));
        }
        Ok(Self {
            in_dim,
            hidden,
            out_dim,
            w1: vec![0.0; hidden * in_dim],
            w2: vec![0.0; out_dim * hidden],
            lambda1: 1.0,
            lambda2: 1.0,
        })
    }

    /// Seeded uniform init in [-0.5, 0.5].
    pub fn random(in_dim: usize, hidden: usize, out_dim: usize, seed: u64) -> Result<Self> {
        let mut w = Self::zeros(in_dim, hidden, out_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in w.w1.iter_mut().chain(w.w2.iter_mut()) {
            *v = rng.gen_range(-0.5..0.5);
        }
        Ok(w)
    }

    pub fn with_lambdas(mut self, lambda1: f64, lambda2: f64) -> Result<Self> {
        if !(lambda1 > 0.0) || !(lambda2 > 0.0) {
            return Err(Error::invalid("activation steepness must be positive"));
        }
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        Ok(self)
    }

    pub fn from_parts(
        in_dim: usize,
        hidden: usize,
        out_dim: usize,
        w1: Vec<f64>,
        w2: Vec<f64>,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<Self> {
        if w1.len() != hidden * in_dim || w2.len() != out_dim * hidden {
            return Err(Error::DimensionMismatch {
                expected: hidden * in_dim + out_dim * hidden,
                actual: w1.len() + w2.len(),
            });
        }
        if w1.iter().chain(&w2).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite weight"));
        }
        Self::zeros(in_dim, hidden, out_dim)?.with_lambdas(lambda1, lambda2).map(|mut w| {
            w.w1 = w1;
            w.w2 = w2;
            w
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.in_dim, self.hidden, self.out_dim)
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn w2(&self) -> &[f64] {
        &self.w2
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2)
    }

    /// Hidden activations only (the first layer of [`Self::forward`]).
    pub fn hidden_activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, actual: x.len() });
        }
        let mut z = Vec::with_capacity(self.hidden);
        for i in 0..self.hidden {
            let row = &self.w1[i * self.in_dim..(i + 1) * self.in_dim];
            let s: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            z.push(sigmoid(s, self.lambda1));
        }
        Ok(z)
    }

    /// Full pass: `z_i = s1(sum_j W1_ij x_j)`, `y_i = s2(sum_j W2_ij z_j)`.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let z = self.hidden_activations(x)?;
        let y = self.output_from_hidden(&z)?;
        Ok((z, y))
    }

    /// Second layer alone; used by the autoencoder's decode path.
    pub fn output_from_hidden(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.hidden {
            return Err(Error::DimensionMismatch { expected: self.hidden, actual: z.len() });
        }
        let mut y = Vec::with_capacity(self.out_dim);
        for i in 0..self.out_dim {
            let row = &self.w2[i * self.hidden..(i + 1) * self.hidden];
            let s: f64 = row.iter().zip(z).map(|(w, v)| w * v).sum();
            y.push(sigmoid(s, self.lambda2));
        }
        Ok(y)
    }

    /// Summed squared output error over the sample pairs.
    pub fn cost_on(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        self.check_pairs(inputs, targets)?;
        let mut cost = 0.0;
        for (x, t) in inputs.iter().zip(targets) {
            let (_, y) = self.forward(x)?;
            cost += y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        Ok(cost)
    }

    /// Backpropagated gradient of [`Self::cost_on`], flattened as
    /// `(dE/dW1, dE/dW2)` in the matrices' row-major layout. Samples are
    /// accumulated in order, so the result is bit-reproducible.
    pub fn gradient_on(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_pairs(inputs, targets)?;
        let mut g1 = vec![0.0; self.w1.len()];
        let mut g2 = vec![0.0; self.w2.len()];
        for (x, t) in inputs.iter().zip(targets) {
            let (z, y) = self.forward(x)?;
            // output deltas: dE/d(pre-activation of y)
            let mut delta2 = Vec::with_capacity(self.out_dim);
            for l in 0..self.out_dim {
                delta2.push(2.0 * (y[l] - t[l]) * self.lambda2 * y[l] * (1.0 - y[l]));
            }
            for l in 0..self.out_dim {
                let row = &mut g2[l * self.hidden..(l + 1) * self.hidden];
                for k in 0..self.hidden {
                    row[k] += delta2[l] * z[k];
                }
            }
            for k in 0..self.hidden {
                let mut back = 0.0;
                for l in 0..self.out_dim {
                    back += delta2[l] * self.w2[l * self.hidden + k];
                }
                let delta1 = back * self.lambda1 * z[k] * (1.0 - z[k]);
                let row = &mut g1[k * self.in_dim..(k + 1) * self.in_dim];
                for (gw, xv) in row.iter_mut().zip(x) {
                    *gw += delta1 * xv;
                }
            }
        }
        Ok((g1, g2))
    }

    fn check_pairs(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
        if inputs.is_empty() {
            return Err(Error::EmptyInput("training pairs"));
        }
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                actual: targets.len(),
            });
        }
        for t in targets {
            if t.len() != self.out_dim {
                return Err(Error::DimensionMismatch { expected: self.out_dim, actual: t.len() });
            }
        }
        Ok(())
    }

    fn flat(&self) -> Vec<f64> {
        let mut v = self.w1.clone();
        v.extend_from_slice(&self.w2);
        v
    }

    fn from_flat(&self, flat: &[f64]) -> Self {
        let mut w = self.clone();
        w.w1.copy_from_slice(&flat[..self.w1.len()]);
        w.w2.copy_from_slice(&flat[self.w1.len()..]);
        w
    }
}

/// Successive vector pairs `(x^k, x^{k+1})` of the series under its
/// characteristic dimension.
fn series_pairs(series: &TimeSeries) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let vectors: Vec<Vec<f64>> = series.vectors().map(|v| v.to_vec()).collect();
    if vectors.len() < 2 {
        return Err(Error::SeriesTooShort { len: vectors.len(), min: 2 });
    }
    let inputs = vectors[..vectors.len() - 1].to_vec();
    let targets = vectors[1..].to_vec();
    Ok((inputs, targets))
}

/// Prediction cost `E = sum_k sum_l (x_l^{k+1} - y_l(x^k))^2`.
pub fn series_cost(weights: &LayerWeights, series: &TimeSeries) -> Result<f64> {
    let (inputs, targets) = series_pairs(series)?;
    weights.cost_on(&inputs, &targets)
}

/// Trains on explicit sample pairs; returns the best weights visited.
pub fn train_pairs(
    weights: &LayerWeights,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<LayerWeights> {
    train_pairs_traced(weights, inputs, targets, cfg).map(|(w, _)| w)
}

/// Like [`train_pairs`] with the cost trace (entry 0 = initial cost).
/// Gradient mode records the cost after each step; Monte-Carlo mode records
/// the best cost so far.
pub fn train_pairs_traced(
    weights: &LayerWeights,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(LayerWeights, Vec<f64>)> {
    cfg.validate()?;
    weights.check_pairs(inputs, targets)?;
    match cfg.method {
        TrainMethod::MonteCarlo => {
            let cost = |flat: &[f64]| {
                weights
                    .from_flat(flat)
                    .cost_on(inputs, targets)
                    .expect("dimensions already checked")
            };
            let (best, _, trace) = anneal_coefficients(weights.flat(), cost, cfg);
            Ok((weights.from_flat(&best), trace))
        }
        TrainMethod::Gradient => {
            let mut current = weights.clone();
            let mut best = current.clone();
            let mut best_cost = current.cost_on(inputs, targets)?;
            let mut trace = Vec::with_capacity(cfg.max_iters + 1);
            trace.push(best_cost);
            for k in 0..cfg.max_iters {
                let (g1, g2) = current.gradient_on(inputs, targets)?;
                let eta = cfg.eta(k);
                for (w, g) in current.w1.iter_mut().zip(&g1) {
                    *w -= eta * g;
                }
                for (w, g) in current.w2.iter_mut().zip(&g2) {
                    *w -= eta * g;
                }
                let cost = current.cost_on(inputs, targets)?;
                if !cost.is_finite() {
                    return Err(Error::NonFiniteCost { step: k });
                }
                if cost < best_cost {
                    best_cost = cost;
                    best = current.clone();
                }
                trace.push(cost);
            }
            Ok((best, trace))
        }
    }
}

/// Trains the series predictor on the vectorized successor pairs.
pub fn train_series(
    weights: &LayerWeights,
    series: &TimeSeries,
    cfg: &TrainConfig,
) -> Result<LayerWeights> {
    let (inputs, targets) = series_pairs(series)?;
    train_pairs(weights, &inputs, &targets, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::logistic_orbit;

    #[test]
    fn sigmoid_closed_forms() {
        assert_eq!(sigmoid(0.0, 1.0), 0.5);
        assert_eq!(sigmoid(0.0, 17.0), 0.5);
        assert!((sigmoid(3f64.ln(), 1.0) - 0.75).abs() < 1e-15);
        assert!((sigmoid(-(3f64.ln()), 1.0) - 0.25).abs() < 1e-15);
        // saturation without overflow
        assert_eq!(sigmoid(1e9, 1.0), 1.0);
        assert_eq!(sigmoid(-1e9, 1.0), 0.0);
    }

    #[test]
    fn forward_zero_weights() {
        let w = LayerWeights::zeros(3, 5, 3).unwrap();
        let (z, y) = w.forward(&[0.2, 0.9, 0.4]).unwrap();
        assert!(z.iter().all(|&v| v == 0.5));
        assert!(y.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn forward_scalar_chain() {
        let w = LayerWeights::from_parts(1, 1, 1, vec![1.0], vec![1.0], 1.0, 1.0).unwrap();
        let (z, y) = w.forward(&[0.0]).unwrap();
        assert_eq!(z, vec![0.5]);
        assert_eq!(y, vec![sigmoid(0.5, 1.0)]);
    }

    #[test]
    fn forward_matches_direct_summation() {
        let w = LayerWeights::random(4, 8, 4, 21).unwrap();
        let x = [0.3, -0.7, 0.9, 0.1];
        let (z, y) = w.forward(&x).unwrap();
        for i in 0..8 {
            let mut s = 0.0;
            for j in 0..4 {
                s += w.w1()[i * 4 + j] * x[j];
            }
            assert!((z[i] - sigmoid(s, 1.0)).abs() < 1e-12);
        }
        for i in 0..4 {
            let mut s = 0.0;
            for j in 0..8 {
                s += w.w2()[i * 8 + j] * z[j];
            }
            assert!((y[i] - sigmoid(s, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn outputs_stay_in_open_unit_interval() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for seed in 0..20 {
            let w = LayerWeights::random(3, 6, 3, seed).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let (z, y) = w.forward(&x).unwrap();
            for v in z.iter().chain(&y) {
                assert!(*v > 0.0 && *v < 1.0);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let w = LayerWeights::zeros(3, 4, 3).unwrap();
        assert!(w.forward(&[0.1, 0.2]).is_err());
        assert!(w.output_from_hidden(&[0.1; 3]).is_err());
    }

    #[test]
    fn series_cost_examples() {
        // zero weights, scalar pair (x=anything, target 1): (1 - 0.5)^2
        let w = LayerWeights::zeros(1, 4, 1).unwrap();
        let series = TimeSeries::scalar(vec![0.3, 1.0]).unwrap();
        assert!((series_cost(&w, &series).unwrap() - 0.25).abs() < 1e-15);

        // a series the network reproduces exactly costs zero
        let w = LayerWeights::random(2, 3, 2, 4).unwrap();
        let x0 = vec![0.2, 0.6];
        let (_, y) = w.forward(&x0).unwrap();
        let series = TimeSeries::new(vec![x0[0], x0[1], y[0], y[1]], 2).unwrap();
        assert_eq!(series_cost(&w, &series).unwrap(), 0.0);

        let short = TimeSeries::new(vec![0.1, 0.2], 2).unwrap();
        assert!(series_cost(&w, &short).is_err());
    }

    #[test]
    fn series_cost_matches_resummation_oracle() {
        let w = LayerWeights::random(2, 5, 2, 11).unwrap();
        let values: Vec<f64> = logistic_orbit(0.456, 40);
        let series = TimeSeries::new(values.clone(), 2).unwrap();
        let got = series_cost(&w, &series).unwrap();
        let mut want = 0.0;
        let vecs: Vec<&[f64]> = values.chunks_exact(2).collect();
        for k in 0..vecs.len() - 1 {
            let (_, y) = w.forward(vecs[k]).unwrap();
            for l in 0..2 {
                want += (vecs[k + 1][l] - y[l]).powi(2);
            }
        }
        assert!((got - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn backprop_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for trial in 0..20 {
            let w = LayerWeights::random(2, 4, 2, trial)
                .unwrap()
                .with_lambdas(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
                .unwrap();
            let n = rng.gen_range(1..6);
            let inputs: Vec<Vec<f64>> =
                (0..n).map(|_| (0..2).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
            let targets: Vec<Vec<f64>> =
                (0..n).map(|_| (0..2).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
            let (g1, g2) = w.gradient_on(&inputs, &targets).unwrap();
            let flat = w.flat();
            let grad: Vec<f64> = g1.iter().chain(&g2).cloned().collect();
            let h = 1e-6;
            for i in 0..flat.len() {
                let mut up = flat.clone();
                up[i] += h;
                let mut dn = flat.clone();
                dn[i] -= h;
                let cu = w.from_flat(&up).cost_on(&inputs, &targets).unwrap();
                let cd = w.from_flat(&dn).cost_on(&inputs, &targets).unwrap();
                let fd = (cu - cd) / (2.0 * h);
                let denom = grad[i].abs().max(fd.abs()).max(1.0);
                assert!(
                    (grad[i] - fd).abs() / denom < 1e-5,
                    "trial {trial} weight {i}: {} vs {fd}",
                    grad[i]
                );
            }
        }
    }

    #[test]
    fn training_at_the_optimum_changes_nothing() {
        // constant 0.5 series is reproduced exactly by zero weights
        let w = LayerWeights::zeros(1, 4, 1).unwrap();
        let series = TimeSeries::scalar(vec![0.5; 20]).unwrap();
        let cfg = TrainConfig::gradient(0.05, 1e6, 50, 0);
        let trained = train_series(&w, &series, &cfg).unwrap();
        assert_eq!(trained.w1(), w.w1());
        assert_eq!(trained.w2(), w.w2());
        assert_eq!(series_cost(&trained, &series).unwrap(), 0.0);
    }

    #[test]
    fn gradient_training_reduces_cost_monotonically_when_stable() {
        let w = LayerWeights::random(1, 8, 1, 5).unwrap();
        let series = TimeSeries::scalar(logistic_orbit(0.3, 200)).unwrap();
        let (inputs, targets) = series_pairs(&series).unwrap();
        let cfg = TrainConfig::gradient(1e-3, 1e9, 300, 0);
        let (trained, trace) = train_pairs_traced(&w, &inputs, &targets, &cfg).unwrap();
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
        assert!(series_cost(&trained, &series).unwrap() <= trace[0]);
    }

    #[test]
    fn annealing_never_worsens_best_cost() {
        let w = LayerWeights::random(2, 3, 2, 2).unwrap();
        let series = TimeSeries::new(logistic_orbit(0.25, 60), 2).unwrap();
        let (inputs, targets) = series_pairs(&series).unwrap();
        let cfg = TrainConfig::monte_carlo(0.3, 200.0, 600, 12);
        let (trained, trace) = train_pairs_traced(&w, &inputs, &targets, &cfg).unwrap();
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert!(
            trained.cost_on(&inputs, &targets).unwrap() <= w.cost_on(&inputs, &targets).unwrap()
        );
    }

    #[test]
    fn training_is_deterministic_by_seed() {
        let series = TimeSeries::scalar(logistic_orbit(0.6, 80)).unwrap();
        let run = |seed| {
            let w = LayerWeights::random(1, 4, 1, 77).unwrap();
            let cfg = TrainConfig::monte_carlo(0.4, 100.0, 400, seed);
            train_series(&w, &series, &cfg).unwrap()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9).w1(), run(10).w1());
    }
}
