//! Vector quantization with Voronoi-cell semantics and winner-take-all
//! learning; compresses image blocks (or any d-dimensional data) by mapping
//! each datum to its nearest codebook vector.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autoencoder::{binarize, BlockTiling};
use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// `m` weight vectors in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    weights: Vec<Vec<f64>>,
}

impl Codebook {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("codebook"));
        }
        let dim = weights[0].len();
        if dim == 0 {
            return Err(Error::invalid("codebook dimension must be positive"));
        }
        for w in &weights {
            if w.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: w.len() });
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("non-finite codebook entry"));
            }
        }
        Ok(Self { dim, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of codewords `m`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    fn squared_distance(&self, i: usize, v: &[f64]) -> f64 {
        self.weights[i]
            .iter()
            .zip(v)
            .map(|(w, x)| (w - x) * (w - x))
            .sum()
    }

    /// Index of the nearest codeword; exact distance ties are resolved
    /// uniformly at random from `rng`.
    pub fn winner<R: Rng + ?Sized>(&self, v: &[f64], rng: &mut R) -> Result<usize> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
        }
        let mut best = f64::INFINITY;
        let mut ties: Vec<usize> = Vec::new();
        for i in 0..self.weights.len() {
            let d2 = self.squared_distance(i, v);
            if d2 < best {
                best = d2;
                ties.clear();
                ties.push(i);
            } else if d2 == best {
                ties.push(i);
            }
        }
        Ok(if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.gen_range(0..ties.len())]
        })
    }

    /// Winner-take-all step: only the winning codeword moves, toward the
    /// datum by `w <- w + eta (v - w)`. Returns the winner's index.
    pub fn online_update<R: Rng + ?Sized>(
        &mut self,
        v: &[f64],
        eta: f64,
        rng: &mut R,
    ) -> Result<usize> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid(format!("eta must be in (0,1], got {eta}")));
        }
        let i = self.winner(v, rng)?;
        for (w, x) in self.weights[i].iter_mut().zip(v) {
            *w += eta * (x - *w);
        }
        Ok(i)
    }

    /// Voronoi cells over the data: `cells[i]` holds the indices of the data
    /// assigned to codeword `i`. Cells are disjoint and jointly exhaustive.
    pub fn voronoi_assign<R: Rng + ?Sized>(
        &self,
        data: &[Vec<f64>],
        rng: &mut R,
    ) -> Result<Vec<Vec<usize>>> {
        if data.is_empty() {
            return Err(Error::EmptyInput("data"));
        }
        let mut cells = vec![Vec::new(); self.weights.len()];
        for (j, v) in data.iter().enumerate() {
            cells[self.winner(v, rng)?].push(j);
        }
        Ok(cells)
    }

    /// Summed squared distance of each datum to its nearest codeword.
    pub fn distortion(&self, data: &[Vec<f64>]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyInput("data"));
        }
        let mut total = 0.0;
        for v in data {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
            }
            let min = (0..self.weights.len())
                .map(|i| self.squared_distance(i, v))
                .fold(f64::INFINITY, f64::min);
            total += min;
        }
        Ok(total)
    }

    /// Batch gradient step: every codeword moves toward its cell mean,
    /// `w <- (1 - eta) w + eta mean(cell)`; empty cells stay in place.
    pub fn batch_step<R: Rng + ?Sized>(
        &mut self,
        data: &[Vec<f64>],
        eta: f64,
        rng: &mut R,
    ) -> Result<()> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid(format!("eta must be in (0,1], got {eta}")));
        }
        let cells = self.voronoi_assign(data, rng)?;
        for (i, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                continue;
            }
            let n = cell.len() as f64;
            for j in 0..self.dim {
                let mean = cell.iter().map(|&idx| data[idx][j]).sum::<f64>() / n;
                self.weights[i][j] = (1.0 - eta) * self.weights[i][j] + eta * mean;
            }
        }
        Ok(())
    }
}

/// Decaying learning-rate sequence for online training, with an optional
/// shrinking update neighborhood (full Kohonen dynamics on the 1-d index
/// topology). The default is winner-only learning.
#[derive(Debug, Clone)]
pub struct LearningSchedule {
    pub eta0: f64,
    pub tau: f64,
    pub max_steps: usize,
    pub seed: u64,
    /// Initial neighborhood radius; `None` updates only the winner.
    pub neighborhood_radius: Option<f64>,
}

impl LearningSchedule {
    /// Winner-only schedule with the stock decay `eta0 = 0.5`,
    /// `tau = max_steps / 10`.
    pub fn winner_take_all(max_steps: usize, seed: u64) -> Self {
        Self {
            eta0: 0.5,
            tau: (max_steps as f64 / 10.0).max(1.0),
            max_steps,
            seed,
            neighborhood_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0 && self.eta0 <= 1.0) {
            return Err(Error::invalid(format!("eta0 must be in (0,1], got {}", self.eta0)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if let Some(r) = self.neighborhood_radius {
            if !(r > 0.0) {
                return Err(Error::invalid(format!("radius must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// Non-increasing learning rate `eta0 / (1 + n / tau)`.
    #[inline]
    pub fn eta(&self, n: usize) -> f64 {
        self.eta0 / (1.0 + n as f64 / self.tau)
    }

    /// Neighborhood radius decaying linearly to zero over the run.
    #[inline]
    pub fn radius(&self, n: usize) -> f64 {
        match self.neighborhood_radius {
            Some(r0) => r0 * (1.0 - n as f64 / self.max_steps as f64),
            None => 0.0,
        }
    }
}

/// Online Kohonen training: data are presented i.i.d.-uniform (seeded), and
/// per step the winner (plus its index neighborhood, when enabled) moves
/// toward the sample. The codebook is initialized with `m` data points
/// sampled without replacement. Deterministic by seed.
pub fn train(data: &[Vec<f64>], m: usize, schedule: &LearningSchedule) -> Result<Codebook> {
    schedule.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("data"));
    }
    if m == 0 {
        return Err(Error::invalid("codebook size m must be at least 1"));
    }
    if m > data.len() {
        return Err(Error::invalid(format!(
            "cannot draw {m} distinct initial codewords from {} data points",
            data.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let init: Vec<Vec<f64>> = sample(&mut rng, data.len(), m)
        .into_iter()
        .map(|i| data[i].clone())
        .collect();
    let mut codebook = Codebook::new(init)?;

    for n in 0..schedule.max_steps {
        let v = &data[rng.gen_range(0..data.len())];
        let eta = schedule.eta(n);
        let radius = schedule.radius(n);
        if radius > 0.0 {
            let i = codebook.winner(v, &mut rng)? as f64;
            for (j, w) in codebook.weights.iter_mut().enumerate() {
                let d = j as f64 - i;
                let factor = (-d * d / (2.0 * radius * radius)).exp();
                let scaled = eta * factor;
                for (wv, xv) in w.iter_mut().zip(v) {
                    *wv += scaled * (xv - *wv);
                }
            }
        } else {
            codebook.online_update(v, eta, &mut rng)?;
        }
    }
    Ok(codebook)
}

/// Bits needed per block index; the degenerate `m == 1` codebook still
/// spends one bit per block.
pub fn index_bits(m: usize) -> u32 {
    if m <= 1 {
        1
    } else {
        usize::BITS - (m - 1).leading_zeros()
    }
}

/// Result of quantizing an image's block tiling against a codebook.
#[derive(Debug, Clone)]
pub struct QuantizedImage {
    /// Winner index per block, row-major block order.
    pub indices: Vec<usize>,
    /// Codewords substituted and binarized back into an image.
    pub reconstruction: BinaryImage,
    /// Uncompressed block bits over index bits, per block.
    pub compression_ratio: f64,
}

/// Replaces every block by its winning codeword. Tie draws come from the
/// seeded RNG, so the index stream is reproducible.
pub fn quantize_blocks(
    tiling: &BlockTiling,
    codebook: &Codebook,
    seed: u64,
) -> Result<QuantizedImage> {
    if codebook.dim() != tiling.block_len() {
        return Err(Error::DimensionMismatch {
            expected: tiling.block_len(),
            actual: codebook.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = Vec::with_capacity(tiling.block_count());
    let mut recon_blocks = Vec::with_capacity(tiling.block_count());
    for block in tiling.blocks() {
        let i = codebook.winner(block, &mut rng)?;
        indices.push(i);
        recon_blocks.push(binarize(&codebook.weights()[i]));
    }
    let reconstruction = tiling.reassemble(&recon_blocks)?;
    let compression_ratio = tiling.block_len() as f64 / index_bits(codebook.len()) as f64;
    Ok(QuantizedImage { indices, reconstruction, compression_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::tile;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn winner_basic_and_tie_frequency() {
        let cb = Codebook::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let mut r = rng(1);
        assert_eq!(cb.winner(&[0.2], &mut r).unwrap(), 0);
        assert_eq!(cb.winner(&[0.8], &mut r).unwrap(), 1);

        // equidistant: uniform tie-breaking over 10^4 seeded draws
        let mut zeros = 0;
        for _ in 0..10_000 {
            if cb.winner(&[0.5], &mut r).unwrap() == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.05, "tie frequency {freq}");
    }

    #[test]
    fn winner_matches_brute_force_oracle() {
        let mut r = rng(2);
        let cb = Codebook::new(
            (0..32)
                .map(|_| (0..8).map(|_| r.gen_range(0.0..1.0)).collect())
                .collect(),
        )
        .unwrap();
        for _ in 0..500 {
            let v: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..1.0)).collect();
            let got = cb.winner(&v, &mut r).unwrap();
            // independent scan (no random data has exact ties)
            let mut best = (f64::INFINITY, 0usize);
            for (i, w) in cb.weights().iter().enumerate() {
                let d: f64 = w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(got, best.1);
        }
    }

    #[test]
    fn winner_dimension_mismatch() {
        let cb = Codebook::new(vec![vec![0.0, 0.0]]).unwrap();
        assert!(cb.winner(&[0.1], &mut rng(0)).is_err());
    }

    #[test]
    fn winner_set_invariant_under_duplicate_codeword() {
        let mut r = rng(3);
        let base = vec![vec![0.1, 0.2], vec![0.8, 0.9], vec![0.4, 0.4]];
        let cb = Codebook::new(base.clone()).unwrap();
        let v = [0.15, 0.2];
        let w = cb.winner(&v, &mut r).unwrap();
        // appending a duplicate of a non-winning codeword leaves the winner
        let mut extended = base;
        extended.push(vec![0.8, 0.9]);
        let cb2 = Codebook::new(extended).unwrap();
        assert_eq!(cb2.winner(&v, &mut r).unwrap(), w);
    }

    #[test]
    fn online_update_moves_only_the_winner() {
        let mut cb = Codebook::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let mut r = rng(4);
        let i = cb.online_update(&[1.0], 0.5, &mut r).unwrap();
        assert_eq!(i, 1);
        assert_eq!(cb.weights()[0], vec![0.0]); // bit-identical non-winner
        assert_eq!(cb.weights()[1], vec![1.0]);

        let mut cb = Codebook::new(vec![vec![0.0], vec![10.0]]).unwrap();
        let i = cb.online_update(&[1.0], 0.5, &mut r).unwrap();
        assert_eq!(i, 0);
        assert_eq!(cb.weights()[0], vec![0.5]);
        assert_eq!(cb.weights()[1], vec![10.0]);
    }

    #[test]
    fn online_update_step_is_bounded_by_eta() {
        let mut r = rng(5);
        for _ in 0..100 {
            let w0: f64 = r.gen_range(-1.0..1.0);
            let v: f64 = r.gen_range(-1.0..1.0);
            let eta: f64 = r.gen_range(0.001..1.0);
            let mut cb = Codebook::new(vec![vec![w0]]).unwrap();
            cb.online_update(&[v], eta, &mut r).unwrap();
            let moved = (cb.weights()[0][0] - w0).abs();
            assert!(moved <= eta * (v - w0).abs() + 1e-15);
        }
    }

    #[test]
    fn voronoi_cells_are_disjoint_and_exhaustive() {
        let mut r = rng(6);
        let data: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..3).map(|_| r.gen_range(0.0..1.0)).collect())
            .collect();
        let cb = Codebook::new(data[..7].to_vec()).unwrap();
        let cells = cb.voronoi_assign(&data, &mut r).unwrap();
        let mut seen = vec![false; data.len()];
        for cell in &cells {
            for &idx in cell {
                assert!(!seen[idx], "datum {idx} in two cells");
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));

        // m=1: a single cell holds everything
        let one = Codebook::new(vec![vec![0.5, 0.5, 0.5]]).unwrap();
        let cells = one.voronoi_assign(&data, &mut r).unwrap();
        assert_eq!(cells[0].len(), data.len());
    }

    #[test]
    fn voronoi_matches_winner_on_separated_clusters() {
        let mut r = rng(7);
        let mut data = Vec::new();
        for _ in 0..50 {
            data.push(vec![0.1 + r.gen_range(-0.01..0.01)]);
        }
        for _ in 0..50 {
            data.push(vec![0.9 + r.gen_range(-0.01..0.01)]);
        }
        let cb = Codebook::new(vec![vec![0.1], vec![0.9]]).unwrap();
        let cells = cb.voronoi_assign(&data, &mut r).unwrap();
        assert_eq!(cells[0], (0..50).collect::<Vec<_>>());
        assert_eq!(cells[1], (50..100).collect::<Vec<_>>());
    }

    #[test]
    fn distortion_values_and_oracle() {
        let cb = Codebook::new(vec![vec![0.5]]).unwrap();
        assert_eq!(cb.distortion(&[vec![0.0], vec![1.0]]).unwrap(), 0.5);

        let data = vec![vec![0.2, 0.4], vec![0.6, 0.8]];
        let exact = Codebook::new(data.clone()).unwrap();
        assert_eq!(exact.distortion(&data).unwrap(), 0.0);

        let mut r = rng(8);
        let data: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..4).map(|_| r.gen_range(0.0..1.0)).collect())
            .collect();
        let cb = Codebook::new(data[..5].to_vec()).unwrap();
        let got = cb.distortion(&data).unwrap();
        let want: f64 = data
            .iter()
            .map(|v| {
                cb.weights()
                    .iter()
                    .map(|w| w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        assert!((got - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn batch_step_fixed_point_at_cell_means() {
        let mut r = rng(9);
        let data: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![r.gen_range(0.0..1.0), r.gen_range(0.0..1.0)])
            .collect();
        let mut cb = Codebook::new(vec![vec![0.25, 0.25], vec![0.75, 0.75]]).unwrap();
        // settle to the local optimum, then verify stationarity
        for _ in 0..50 {
            cb.batch_step(&data, 1.0, &mut r).unwrap();
        }
        let before = cb.clone();
        cb.batch_step(&data, 0.7, &mut r).unwrap();
        for (a, b) in before.weights().iter().zip(cb.weights()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-12, "moved {x} -> {y}");
            }
        }
    }

    #[test]
    fn batch_step_with_unit_eta_jumps_to_mean() {
        let data = vec![vec![0.1], vec![0.3], vec![0.8]];
        let mut cb = Codebook::new(vec![vec![0.45]]).unwrap();
        cb.batch_step(&data, 1.0, &mut rng(10)).unwrap();
        let mean = (0.1 + 0.3 + 0.8) / 3.0;
        assert_eq!(cb.weights()[0][0], mean);
    }

    #[test]
    fn batch_distortion_is_non_increasing() {
        let mut r = rng(11);
        let data: Vec<Vec<f64>> = (0..150)
            .map(|_| (0..2).map(|_| r.gen_range(0.0..1.0)).collect())
            .collect();
        let mut cb = Codebook::new(data[..6].to_vec()).unwrap();
        let mut prev = cb.distortion(&data).unwrap();
        for step in 0..100 {
            let eta = if step % 2 == 0 { 1.0 } else { 0.35 };
            cb.batch_step(&data, eta, &mut r).unwrap();
            let d = cb.distortion(&data).unwrap();
            assert!(d <= prev + 1e-9, "step {step}: {prev} -> {d}");
            prev = d;
        }
    }

    #[test]
    fn empty_cells_stay_in_place() {
        let data = vec![vec![0.1], vec![0.12]];
        let mut cb = Codebook::new(vec![vec![0.11], vec![0.95]]).unwrap();
        cb.batch_step(&data, 1.0, &mut rng(12)).unwrap();
        assert_eq!(cb.weights()[1], vec![0.95]);
    }

    #[test]
    fn training_one_codeword_approaches_the_sample_mean() {
        let mut r = rng(13);
        let data: Vec<Vec<f64>> = (0..500).map(|_| vec![r.gen_range(0.0..1.0)]).collect();
        let mean = data.iter().map(|v| v[0]).sum::<f64>() / data.len() as f64;
        // eta(n) = 1/(1+n) makes the weight the running mean of the draws
        let schedule = LearningSchedule {
            eta0: 1.0,
            tau: 1.0,
            max_steps: 1_000_000,
            seed: 21,
            neighborhood_radius: None,
        };
        let cb = train(&data, 1, &schedule).unwrap();
        assert!((cb.weights()[0][0] - mean).abs() < 1e-3);
    }

    #[test]
    fn training_recovers_two_cluster_means() {
        let mut r = rng(14);
        let mut data = Vec::new();
        for _ in 0..300 {
            data.push(vec![0.1 + 0.01 * r.sample::<f64, _>(rand_distr::StandardNormal)]);
        }
        for _ in 0..300 {
            data.push(vec![0.9 + 0.01 * r.sample::<f64, _>(rand_distr::StandardNormal)]);
        }
        let schedule = LearningSchedule::winner_take_all(60_000, 5);
        let cb = train(&data, 2, &schedule).unwrap();
        let mut ws: Vec<f64> = cb.weights().iter().map(|w| w[0]).collect();
        ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ws[0] - 0.1).abs() < 0.05, "low weight {}", ws[0]);
        assert!((ws[1] - 0.9).abs() < 0.05, "high weight {}", ws[1]);
    }

    #[test]
    fn training_is_deterministic_by_seed() {
        let mut r = rng(15);
        let data: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..2).map(|_| r.gen_range(0.0..1.0)).collect())
            .collect();
        let schedule = LearningSchedule::winner_take_all(5_000, 33);
        assert_eq!(train(&data, 4, &schedule).unwrap(), train(&data, 4, &schedule).unwrap());
    }

    #[test]
    fn neighborhood_mode_converges_too() {
        let mut r = rng(16);
        let data: Vec<Vec<f64>> = (0..200).map(|_| vec![r.gen_range(0.0..1.0)]).collect();
        let schedule = LearningSchedule {
            eta0: 0.5,
            tau: 2_000.0,
            max_steps: 20_000,
            seed: 3,
            neighborhood_radius: Some(2.0),
        };
        let cb = train(&data, 4, &schedule).unwrap();
        let d = cb.distortion(&data).unwrap();
        // far better than a single-codeword quantizer
        let single = Codebook::new(vec![vec![0.5]]).unwrap();
        assert!(d < single.distortion(&data).unwrap());
    }

    #[test]
    fn index_bits_convention() {
        assert_eq!(index_bits(1), 1);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(3), 2);
        assert_eq!(index_bits(16), 4);
        assert_eq!(index_bits(17), 5);
    }

    #[test]
    fn quantize_with_exhaustive_codebook_is_lossless() {
        let mut r = rng(17);
        let mut img = BinaryImage::new(8, 8).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                img.set(x, y, r.gen_bool(0.5));
            }
        }
        let tiling = tile(&img, 4).unwrap();
        let mut blocks: Vec<Vec<f64>> = tiling.blocks().to_vec();
        blocks.dedup();
        let cb = Codebook::new(blocks).unwrap();
        let q = quantize_blocks(&tiling, &cb, 0).unwrap();
        assert_eq!(q.reconstruction, img);
    }

    #[test]
    fn quantize_reconstruction_matches_direct_recomputation() {
        let mut r = rng(18);
        let mut img = BinaryImage::new(16, 12).unwrap();
        for y in 0..12 {
            for x in 0..16 {
                img.set(x, y, r.gen_bool(0.4));
            }
        }
        let tiling = tile(&img, 4).unwrap();
        let schedule = LearningSchedule::winner_take_all(8_000, 9);
        let cb = train(tiling.blocks(), 6, &schedule).unwrap();
        let q = quantize_blocks(&tiling, &cb, 7).unwrap();

        // oracle: independent winner assignment and substitution
        let mut oracle_rng = ChaCha8Rng::seed_from_u64(7);
        let mut recon_blocks = Vec::new();
        for b in tiling.blocks() {
            let i = cb.winner(b, &mut oracle_rng).unwrap();
            recon_blocks.push(binarize(&cb.weights()[i]));
        }
        let want = tiling.reassemble(&recon_blocks).unwrap();
        assert_eq!(q.reconstruction, want);
        assert_eq!(q.compression_ratio, 16.0 / 3.0);
    }

    #[test]
    fn degenerate_single_codeword_ratio() {
        let img = BinaryImage::new(4, 4).unwrap();
        let tiling = tile(&img, 4).unwrap();
        let cb = Codebook::new(vec![vec![0.0; 16]]).unwrap();
        let q = quantize_blocks(&tiling, &cb, 0).unwrap();
        assert_eq!(q.indices, vec![0]);
        // one bit per block by convention
        assert_eq!(q.compression_ratio, 16.0);
    }

    #[test]
    fn train_input_validation() {
        let schedule = LearningSchedule::winner_take_all(10, 0);
        assert!(train(&[], 1, &schedule).is_err());
        assert!(train(&[vec![0.1]], 0, &schedule).is_err());
        assert!(train(&[vec![0.1]], 2, &schedule).is_err());
        let bad = LearningSchedule { eta0: 0.0, ..schedule };
        assert!(train(&[vec![0.1]], 1, &bad).is_err());
    }
}
