//! Block autoencoder: tiles an image into square blocks and compresses each
//! block's intensity vector through an M -> M/2 -> M sigmoid network, a
//! factor 2 per stage; stages can be iterated on the previous stage's codes.

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::net::LayerWeights;
use crate::train::TrainConfig;

pub const DEFAULT_BLOCK_SIDE: usize = 20;

/// Row-major tiling of a zero-padded image into `block_side^2`-component
/// intensity vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTiling {
    block_side: usize,
    width: usize,
    height: usize,
    grid_w: usize,
    grid_h: usize,
    blocks: Vec<Vec<f64>>,
}

/// Pads the image with zeros to multiples of `block_side` and cuts it into
/// row-major blocks; `untile` inverts exactly.
pub fn tile(image: &BinaryImage, block_side: usize) -> Result<BlockTiling> {
    if block_side == 0 {
        return Err(Error::invalid("block side must be at least 1"));
    }
    let (w, h) = (image.width(), image.height());
    let grid_w = w.div_ceil(block_side);
    let grid_h = h.div_ceil(block_side);
    let mut blocks = Vec::with_capacity(grid_w * grid_h);
    for by in 0..grid_h {
        for bx in 0..grid_w {
            let mut block = Vec::with_capacity(block_side * block_side);
            for dy in 0..block_side {
                for dx in 0..block_side {
                    let (x, y) = (bx * block_side + dx, by * block_side + dy);
                    let v = if x < w && y < h && image.get(x, y) { 1.0 } else { 0.0 };
                    block.push(v);
                }
            }
            blocks.push(block);
        }
    }
    Ok(BlockTiling { block_side, width: w, height: h, grid_w, grid_h, blocks })
}

impl BlockTiling {
    pub fn from_parts(
        block_side: usize,
        width: usize,
        height: usize,
        blocks: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if block_side == 0 || width == 0 || height == 0 {
            return Err(Error::invalid("tiling dimensions must be positive"));
        }
        let grid_w = width.div_ceil(block_side);
        let grid_h = height.div_ceil(block_side);
        if blocks.len() != grid_w * grid_h
            || blocks.iter().any(|b| b.len() != block_side * block_side)
        {
            return Err(Error::DimensionMismatch {
                expected: grid_w * grid_h,
                actual: blocks.len(),
            });
        }
        Ok(Self { block_side, width, height, grid_w, grid_h, blocks })
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn block_side(&self) -> usize {
        self.block_side
    }

    /// Components per block.
    pub fn block_len(&self) -> usize {
        self.block_side * self.block_side
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Original (unpadded) image size.
    pub fn image_size(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Zero padding added on the right and bottom edges.
    pub fn padding(&self) -> (usize, usize) {
        (
            self.grid_w * self.block_side - self.width,
            self.grid_h * self.block_side - self.height,
        )
    }

    /// Rebuilds the image from the tiling's own blocks.
    pub fn untile(&self) -> BinaryImage {
        self.reassemble(&self.blocks).expect("own blocks are consistent")
    }

    /// Rebuilds an image from replacement blocks (binarized at 1/2, ties to
    /// zero) and crops the padding away.
    pub fn reassemble(&self, blocks: &[Vec<f64>]) -> Result<BinaryImage> {
        if blocks.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: self.blocks.len(),
                actual: blocks.len(),
            });
        }
        let mut img = BinaryImage::new(self.width, self.height)?;
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != self.block_len() {
                return Err(Error::DimensionMismatch {
                    expected: self.block_len(),
                    actual: block.len(),
                });
            }
            let (bx, by) = (i % self.grid_w, i / self.grid_w);
            for dy in 0..self.block_side {
                for dx in 0..self.block_side {
                    let (x, y) = (bx * self.block_side + dx, by * self.block_side + dy);
                    if x < self.width && y < self.height {
                        img.set(x, y, block[dy * self.block_side + dx] > 0.5);
                    }
                }
            }
        }
        Ok(img)
    }
}

/// Thresholds at 1/2 with ties rounding down to 0.
pub fn binarize(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| if v > 0.5 { 1.0 } else { 0.0 }).collect()
}

/// One compression stage: an M -> floor(M/2) -> M network.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderStage {
    weights: LayerWeights,
}

impl AutoencoderStage {
    pub fn random(input_len: usize, seed: u64) -> Result<Self> {
        if input_len < 2 {
            return Err(Error::invalid(format!(
                "stage input length {input_len} leaves no hidden units"
            )));
        }
        Ok(Self { weights: LayerWeights::random(input_len, input_len / 2, input_len, seed)? })
    }

    /// Wraps existing weights, enforcing the in == out, hidden == in/2 shape.
    pub fn from_weights(weights: LayerWeights) -> Result<Self> {
        let (i, h, o) = weights.dims();
        if i != o || h != i / 2 || h == 0 {
            return Err(Error::invalid(format!(
                "autoencoder stage needs M -> floor(M/2) -> M, got {i}x{h}x{o}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &LayerWeights {
        &self.weights
    }

    pub fn input_len(&self) -> usize {
        self.weights.dims().0
    }

    pub fn code_len(&self) -> usize {
        self.weights.dims().1
    }

    /// First layer only: the compressed code `z`.
    pub fn encode(&self, block: &[f64]) -> Result<Vec<f64>> {
        self.weights.hidden_activations(block)
    }

    /// Second layer only: reconstructs an M-vector in (0,1)^M from a code.
    pub fn decode(&self, code: &[f64]) -> Result<Vec<f64>> {
        self.weights.output_from_hidden(code)
    }
}

/// Reconstruction cost `E = sum_blocks sum_l (x_l - y_l)^2`.
pub fn stage_cost(stage: &AutoencoderStage, blocks: &[Vec<f64>]) -> Result<f64> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("block list"));
    }
    stage.weights.cost_on(blocks, blocks)
}

/// Trains one stage to reproduce the given blocks (one shared network for
/// all blocks). Deterministic by `cfg.seed`, which also draws the initial
/// weights.
pub fn train_stage(blocks: &[Vec<f64>], cfg: &TrainConfig) -> Result<AutoencoderStage> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("block list"));
    }
    let m = blocks[0].len();
    let init = AutoencoderStage::random(m, cfg.seed)?;
    let trained = crate::net::train_pairs(&init.weights, blocks, blocks, cfg)?;
    AutoencoderStage::from_weights(trained)
}

/// Hidden sizes produced by repeated floor-halving from `m`; errors when a
/// stage would have no hidden units.
pub fn stage_dims(m: usize, depth: usize) -> Result<Vec<(usize, usize)>> {
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let mut dims = Vec::with_capacity(depth);
    let mut cur = m;
    for level in 0..depth {
        let hidden = cur / 2;
        if hidden == 0 {
            return Err(Error::invalid(format!(
                "depth {depth} exhausts dimensions at stage {level} (input {cur})"
            )));
        }
        dims.push((cur, hidden));
        cur = hidden;
    }
    Ok(dims)
}

/// Trains `depth` stages, each on the previous stage's code vectors, and
/// returns the stages with the final codes (nominal compression 2^depth).
pub fn iterate_stages(
    blocks: &[Vec<f64>],
    depth: usize,
    cfg: &TrainConfig,
) -> Result<(Vec<AutoencoderStage>, Vec<Vec<f64>>)> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("block list"));
    }
    stage_dims(blocks[0].len(), depth)?;
    let mut stages = Vec::with_capacity(depth);
    let mut data: Vec<Vec<f64>> = blocks.to_vec();
    for level in 0..depth {
        // distinct deterministic seed per stage
        let mut level_cfg = cfg.clone();
        level_cfg.seed = cfg.seed.wrapping_add(level as u64);
        let stage = train_stage(&data, &level_cfg)?;
        data = data
            .iter()
            .map(|b| stage.encode(b))
            .collect::<Result<Vec<_>>>()?;
        stages.push(stage);
    }
    Ok((stages, data))
}

/// Runs the decode chain from final codes back to block vectors
/// (continuous; binarize for image reconstruction).
pub fn decode_stages(stages: &[AutoencoderStage], codes: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut data = codes.to_vec();
    for stage in stages.iter().rev() {
        data = data
            .iter()
            .map(|c| stage.decode(c))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(data)
}

/// Byte ledger comparing the compressed representation (codes + network
/// weights + container header) against the bit-packed original image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ByteAccounting {
    pub original_bytes: u64,
    pub code_bytes: u64,
    pub weight_bytes: u64,
    pub header_bytes: u64,
}

impl ByteAccounting {
    pub fn total_compressed(&self) -> u64 {
        self.code_bytes + self.weight_bytes + self.header_bytes
    }

    /// The compressed representation is no smaller than the original.
    pub fn exceeds_original(&self) -> bool {
        self.total_compressed() >= self.original_bytes
    }
}

/// Accounts bytes for a stage stack over a tiling. `bytes_per_code` is 8 for
/// raw f64 codes or 1 for the quantized byte mode.
pub fn account_bytes(
    tiling: &BlockTiling,
    stages: &[AutoencoderStage],
    codes: &[Vec<f64>],
    bytes_per_code: usize,
    header_bytes: u64,
) -> ByteAccounting {
    let (w, h) = tiling.image_size();
    let original_bytes = (w.div_ceil(8) * h) as u64;
    let code_bytes: u64 = codes.iter().map(|c| (c.len() * bytes_per_code) as u64).sum();
    let weight_bytes: u64 = stages
        .iter()
        .map(|s| ((s.weights().w1().len() + s.weights().w2().len()) * 8) as u64)
        .sum();
    ByteAccounting { original_bytes, code_bytes, weight_bytes, header_bytes }
}
