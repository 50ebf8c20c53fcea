//! Phase-space reconstruction of scalar series: recursive variance-minimizing
//! partition of the data range, Gaussian block memberships, and
//! piecewise-constant / piecewise-linear models of the generating map fitted
//! by gradient descent or Monte Carlo.

use crate::error::{Error, Result};
use crate::train::{anneal_coefficients, TrainConfig, TrainMethod};

/// Floor applied to stored block variances so the Gaussian membership stays
/// finite on degenerate (constant-valued) blocks.
pub const VARIANCE_FLOOR: f64 = 1e-8;

/// Default minimum number of points per partition block.
pub const DEFAULT_MIN_COUNT: usize = 16;

/// Ordered real samples with a characteristic dimension used to group them
/// into consecutive `dim`-component vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dim: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dim: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("time series"));
        }
        if dim == 0 {
            return Err(Error::invalid("characteristic dimension must be at least 1"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample {bad}")));
        }
        Ok(Self { values, dim })
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Disjoint consecutive `dim`-blocks; a trailing remainder is dropped.
    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Affine map of the samples into the open unit interval, with a small
    /// margin so extremes stay strictly inside. Returns the rescaled series
    /// and the transform needed to map model output back.
    pub fn rescale_to_unit(&self) -> (TimeSeries, Rescale) {
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rescale = if max > min {
            let pad = 0.05 * (max - min);
            Rescale { offset: min - pad, scale: (max - min) + 2.0 * pad }
        } else {
            Rescale { offset: min - 0.5, scale: 1.0 }
        };
        let values = self.values.iter().map(|&x| rescale.to_unit(x)).collect();
        (TimeSeries { values, dim: self.dim }, rescale)
    }
}

/// Affine transform between raw sample units and model (unit-interval) units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescale {
    pub offset: f64,
    pub scale: f64,
}

impl Rescale {
    pub const IDENTITY: Rescale = Rescale { offset: 0.0, scale: 1.0 };

    #[inline]
    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }

    #[inline]
    pub fn from_unit(&self, u: f64) -> f64 {
        self.offset + u * self.scale
    }
}

/// Estimates the characteristic dimension as the smallest lag `k` at which
/// the series, subsampled on the stride-`k` grid, is empirically
/// decorrelated: the lag-correlation of consecutive grid samples falls
/// within `3 / sqrt(pairs)` of zero (a constant grid counts as exactly
/// decorrelated). Returns 1 when no lag up to `len/4` qualifies.
pub fn estimate_dimension(series: &TimeSeries) -> Result<usize> {
    let x = series.values();
    let n = x.len();
    if n < 4 {
        return Err(Error::SeriesTooShort { len: n, min: 4 });
    }
    let k_max = n / 4;
    for k in 1..=k_max {
        let grid: Vec<f64> = x.iter().step_by(k).cloned().collect();
        let pairs = grid.len() - 1;
        if pairs < 3 {
            break;
        }
        if grid.iter().all(|&v| v == grid[0]) {
            // constant grid: E[x_t x_{t+k}] equals (E[x_t])^2 exactly
            return Ok(k);
        }
        let mean = grid.iter().sum::<f64>() / grid.len() as f64;
        let var = grid.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / grid.len() as f64;
        let cov = grid
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / pairs as f64;
        let rho = cov / var;
        if rho.abs() <= 3.0 / (pairs as f64).sqrt() {
            return Ok(k);
        }
    }
    Ok(1)
}

/// Interval of the data range with the statistics of its member samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub mean: f64,
    /// Biased member variance, floored at [`VARIANCE_FLOOR`].
    pub variance: f64,
}

/// Ordered blocks covering the data range; interior bounds are split
/// thresholds (midpoints between distinct neighboring samples).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    blocks: Vec<Block>,
}

impl Partition {
    /// Recursive binary splitting of sorted data. Each split minimizes
    /// `var(left) + var(right)` over thresholds placed between distinct
    /// consecutive values, subject to both sides keeping at least
    /// `min_count` points; ties pick the smallest threshold. Recursion stops
    /// when no admissible split exists.
    pub fn build(data: &[f64], min_count: usize) -> Result<Self> {
        if min_count < 2 {
            return Err(Error::invalid(format!("min_count must be >= 2, got {min_count}")));
        }
        if data.len() < min_count {
            return Err(Error::InsufficientData { len: data.len(), min: min_count });
        }
        if data.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("partition data must be sorted ascending"));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample {bad}")));
        }

        let mut segments = vec![(0usize, data.len())];
        let mut leaves: Vec<(usize, usize)> = Vec::new();
        while let Some((lo, hi)) = segments.pop() {
            match best_split(&data[lo..hi], min_count) {
                Some(j) => {
                    // depth-first, right pushed first so leaves come out ordered
                    segments.push((lo + j, hi));
                    segments.push((lo, lo + j));
                }
                None => leaves.push((lo, hi)),
            }
        }
        leaves.sort_unstable();

        let blocks = leaves
            .iter()
            .map(|&(lo, hi)| {
                let members = &data[lo..hi];
                let (mean, variance) = mean_variance(members);
                let lower = if lo == 0 {
                    data[0]
                } else {
                    0.5 * (data[lo - 1] + data[lo])
                };
                let upper = if hi == data.len() {
                    data[data.len() - 1]
                } else {
                    0.5 * (data[hi - 1] + data[hi])
                };
                Block {
                    lower,
                    upper,
                    count: members.len(),
                    mean,
                    variance: variance.max(VARIANCE_FLOOR),
                }
            })
            .collect();
        Ok(Self { blocks })
    }

    /// Reassembles a partition from stored blocks (the deserialization
    /// path); checks ordering and basic block sanity.
    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput("partition blocks"));
        }
        for b in &blocks {
            let finite = b.lower.is_finite() && b.upper.is_finite() && b.mean.is_finite();
            if !finite || !(b.variance > 0.0) || b.count == 0 || b.lower > b.upper {
                return Err(Error::invalid(format!("malformed partition block {b:?}")));
            }
        }
        if blocks.windows(2).any(|w| w[0].upper != w[1].lower) {
            return Err(Error::invalid("partition blocks do not share bounds"));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block owning `x`: interior bounds are half-open on the
    /// right, and the outer blocks absorb everything past the data range.
    pub fn block_index(&self, x: f64) -> usize {
        let idx = self.blocks.partition_point(|b| b.upper <= x);
        idx.min(self.blocks.len() - 1)
    }

    /// Normalized Gaussian membership `P_alpha(x)`, evaluated stably by
    /// subtracting the maximum exponent before exponentiation.
    pub fn membership(&self, x: f64) -> Vec<f64> {
        let exponents: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| {
                let d = x - b.mean;
                -d * d / (2.0 * b.variance)
            })
            .collect();
        let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = exponents.iter().map(|e| (e - m).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }
}

fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Best admissible split position of a sorted segment, as the size of the
/// left part, or `None` when no threshold is admissible. Costs are computed
/// from prefix sums of mean-centered values to keep the variances accurate.
fn best_split(seg: &[f64], min_count: usize) -> Option<usize> {
    let n = seg.len();
    if n < 2 * min_count {
        return None;
    }
    let center = seg.iter().sum::<f64>() / n as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push((0.0, 0.0));
    for &x in seg {
        let c = x - center;
        sum += c;
        sumsq += c * c;
        prefix.push((sum, sumsq));
    }
    let (total_sum, total_sq) = prefix[n];

    let mut best: Option<(f64, usize)> = None;
    for j in min_count..=n - min_count {
        if seg[j - 1] >= seg[j] {
            continue; // no threshold separates equal neighbors
        }
        let (ls, lq) = prefix[j];
        let (rs, rq) = (total_sum - ls, total_sq - lq);
        let nl = j as f64;
        let nr = (n - j) as f64;
        let var_l = lq / nl - (ls / nl) * (ls / nl);
        let var_r = rq / nr - (rs / nr) * (rs / nr);
        let cost = var_l.max(0.0) + var_r.max(0.0);
        if best.map_or(true, |(bc, _)| cost < bc) {
            best = Some((cost, j));
        }
    }
    best.map(|(_, j)| j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    Constant,
    Linear,
}

/// Piecewise model of the generating map: block coefficients blended by the
/// partition's membership functions. Constant mode stores one `f` per block;
/// linear mode stores `(a, b)` pairs flattened as `[a0, b0, a1, b1, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseModel {
    partition: Partition,
    mode: ModelMode,
    coeffs: Vec<f64>,
}

impl PiecewiseModel {
    pub fn new(partition: Partition, mode: ModelMode, coeffs: Vec<f64>) -> Result<Self> {
        let expected = match mode {
            ModelMode::Constant => partition.len(),
            ModelMode::Linear => 2 * partition.len(),
        };
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: coeffs.len() });
        }
        Ok(Self { partition, mode, coeffs })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn mode(&self) -> ModelMode {
        self.mode
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.partition.membership(x);
        match self.mode {
            ModelMode::Constant => self.coeffs.iter().zip(&p).map(|(f, w)| f * w).sum(),
            ModelMode::Linear => self
                .coeffs
                .chunks_exact(2)
                .zip(&p)
                .map(|(ab, w)| (ab[0] + ab[1] * x) * w)
                .sum(),
        }
    }

    /// Sum of squared one-step prediction errors over the scalar series.
    pub fn training_error(&self, series: &TimeSeries) -> Result<f64> {
        let x = scalar_samples(series)?;
        Ok(x.windows(2)
            .map(|w| {
                let r = w[1] - self.eval(w[0]);
                r * r
            })
            .sum())
    }

    /// Analytic gradient of [`Self::training_error`] with respect to the
    /// coefficients, in coefficient order.
    pub fn error_gradient(&self, series: &TimeSeries) -> Result<Vec<f64>> {
        let x = scalar_samples(series)?;
        let mut grad = vec![0.0; self.coeffs.len()];
        for w in x.windows(2) {
            let p = self.partition.membership(w[0]);
            let f = match self.mode {
                ModelMode::Constant => self.coeffs.iter().zip(&p).map(|(c, q)| c * q).sum::<f64>(),
                ModelMode::Linear => self
                    .coeffs
                    .chunks_exact(2)
                    .zip(&p)
                    .map(|(ab, q)| (ab[0] + ab[1] * w[0]) * q)
                    .sum::<f64>(),
            };
            let r = f - w[1];
            match self.mode {
                ModelMode::Constant => {
                    for (g, q) in grad.iter_mut().zip(&p) {
                        *g += 2.0 * r * q;
                    }
                }
                ModelMode::Linear => {
                    for (gc, q) in grad.chunks_exact_mut(2).zip(&p) {
                        gc[0] += 2.0 * r * q;
                        gc[1] += 2.0 * r * q * w[0];
                    }
                }
            }
        }
        Ok(grad)
    }
}

fn scalar_samples(series: &TimeSeries) -> Result<&[f64]> {
    if series.dim() != 1 {
        return Err(Error::invalid(format!(
            "phase-space model expects a scalar series, got dimension {}",
            series.dim()
        )));
    }
    if series.len() < 2 {
        return Err(Error::SeriesTooShort { len: series.len(), min: 2 });
    }
    Ok(series.values())
}

/// Fits coefficients on `series` against `partition`, by full-batch gradient
/// descent with the decaying rate or by Monte-Carlo annealing. The returned
/// model is the best state visited, so its training error never exceeds the
/// initial model's. Bit-reproducible for identical inputs and seed.
pub fn fit(
    series: &TimeSeries,
    partition: &Partition,
    mode: ModelMode,
    cfg: &TrainConfig,
) -> Result<PiecewiseModel> {
    fit_traced(series, partition, mode, cfg).map(|(m, _)| m)
}

/// Like [`fit`], also returning an error trace (entry 0 is the initial
/// model's error). Gradient mode records the error after each step;
/// Monte-Carlo mode records the best cost seen so far.
pub fn fit_traced(
    series: &TimeSeries,
    partition: &Partition,
    mode: ModelMode,
    cfg: &TrainConfig,
) -> Result<(PiecewiseModel, Vec<f64>)> {
    cfg.validate()?;
    let x = scalar_samples(series)?;
    if partition.is_empty() {
        return Err(Error::EmptyInput("partition"));
    }
    if let Some(bad) = x.iter().find(|v| !(0.0 < **v && **v < 1.0)) {
        return Err(Error::invalid(format!(
            "sample {bad} outside (0,1); rescale the series before fitting"
        )));
    }

    let n_pairs = x.len() - 1;
    // memberships depend only on the partition; cache them per sample
    let memb: Vec<Vec<f64>> = x[..n_pairs].iter().map(|&v| partition.membership(v)).collect();
    let inputs = &x[..n_pairs];
    let targets = &x[1..];

    let init = initial_coeffs(partition, mode, inputs, targets);

    let eval_cost = |coeffs: &[f64]| -> f64 {
        let mut err = 0.0;
        for i in 0..n_pairs {
            let f = model_value(coeffs, mode, &memb[i], inputs[i]);
            let r = targets[i] - f;
            err += r * r;
        }
        err
    };

    match cfg.method {
        TrainMethod::MonteCarlo => {
            let (best, _, trace) = anneal_coefficients(init, eval_cost, cfg);
            Ok((PiecewiseModel::new(partition.clone(), mode, best)?, trace))
        }
        TrainMethod::Gradient => {
            let mut coeffs = init;
            let mut grad = vec![0.0; coeffs.len()];
            let mut best = coeffs.clone();
            let mut best_err = eval_cost(&coeffs);
            let mut trace = Vec::with_capacity(cfg.max_iters + 1);
            trace.push(best_err);
            for k in 0..cfg.max_iters {
                grad.fill(0.0);
                for i in 0..n_pairs {
                    let f = model_value(&coeffs, mode, &memb[i], inputs[i]);
                    let r = f - targets[i];
                    match mode {
                        ModelMode::Constant => {
                            for (g, q) in grad.iter_mut().zip(&memb[i]) {
                                *g += 2.0 * r * q;
                            }
                        }
                        ModelMode::Linear => {
                            for (gc, q) in grad.chunks_exact_mut(2).zip(&memb[i]) {
                                gc[0] += 2.0 * r * q;
                                gc[1] += 2.0 * r * q * inputs[i];
                            }
                        }
                    }
                }
                let eta = cfg.eta(k);
                for (c, g) in coeffs.iter_mut().zip(&grad) {
                    *c -= eta * g;
                }
                let err = eval_cost(&coeffs);
                if !err.is_finite() {
                    return Err(Error::NonFiniteCost { step: k });
                }
                if err < best_err {
                    best_err = err;
                    best.copy_from_slice(&coeffs);
                }
                trace.push(err);
            }
            Ok((PiecewiseModel::new(partition.clone(), mode, best)?, trace))
        }
    }
}

#[inline]
fn model_value(coeffs: &[f64], mode: ModelMode, memb: &[f64], x: f64) -> f64 {
    match mode {
        ModelMode::Constant => coeffs.iter().zip(memb).map(|(c, q)| c * q).sum(),
        ModelMode::Linear => coeffs
            .chunks_exact(2)
            .zip(memb)
            .map(|(ab, q)| (ab[0] + ab[1] * x) * q)
            .sum(),
    }
}

/// Warm start from per-block statistics under hard assignment: the mean
/// successor in constant mode, a one-variable least-squares line in linear
/// mode. Deterministic.
fn initial_coeffs(
    partition: &Partition,
    mode: ModelMode,
    inputs: &[f64],
    targets: &[f64],
) -> Vec<f64> {
    let m = partition.len();
    let mut count = vec![0.0f64; m];
    let mut sum_x = vec![0.0f64; m];
    let mut sum_t = vec![0.0f64; m];
    let mut sum_xx = vec![0.0f64; m];
    let mut sum_xt = vec![0.0f64; m];
    for (&x, &t) in inputs.iter().zip(targets) {
        let b = partition.block_index(x);
        count[b] += 1.0;
        sum_x[b] += x;
        sum_t[b] += t;
        sum_xx[b] += x * x;
        sum_xt[b] += x * t;
    }
    match mode {
        ModelMode::Constant => (0..m)
            .map(|b| if count[b] > 0.0 { sum_t[b] / count[b] } else { 0.5 })
            .collect(),
        ModelMode::Linear => {
            let mut coeffs = Vec::with_capacity(2 * m);
            for b in 0..m {
                if count[b] == 0.0 {
                    coeffs.extend_from_slice(&[0.5, 0.0]);
                    continue;
                }
                let n = count[b];
                let mx = sum_x[b] / n;
                let mt = sum_t[b] / n;
                let var = sum_xx[b] / n - mx * mx;
                let cov = sum_xt[b] / n - mx * mt;
                let slope = if var > 1e-14 { cov / var } else { 0.0 };
                coeffs.push(mt - slope * mx);
                coeffs.push(slope);
            }
            coeffs
        }
    }
}

/// Reads a one-sample-per-line series. Blank lines are skipped;
/// `skip_header` drops the first non-blank line.
pub fn read_csv_series(text: &str, skip_header: bool) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut header_pending = skip_header;
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            Error::format(format!("line {}: not a number: {t:?}", lineno + 1))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("csv series"));
    }
    Ok(values)
}

/// Orbit of the logistic map `x -> 4x(1-x)`, the reference chaotic series.
pub fn logistic_orbit(x0: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut x = x0;
    for _ in 0..n {
        out.push(x);
        x = 4.0 * x * (1.0 - x);
    }
    out
}
