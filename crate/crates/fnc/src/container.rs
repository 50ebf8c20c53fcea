//! The `FNC1` compressed-container format shared by all codecs.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "FNC1" | version u8 | method u8 | width u32 | height u32
//! | block_side u16 | pad_right u16 | pad_bottom u16
//! | payload_len u64 | payload bytes
//! ```
//!
//! Method bytes: 0 = IFS coefficients, 1 = block autoencoder, 2 = vector
//! quantizer, 3 = network/series models. Payload layouts are defined by the
//! per-method codecs below; coefficients are 64-bit reals throughout.

use crate::autoencoder::AutoencoderStage;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::net::LayerWeights;
use crate::series::{Block, ModelMode, Partition, PiecewiseModel, Rescale};
use crate::vq::{index_bits, Codebook};

pub const MAGIC: [u8; 4] = *b"FNC1";
pub const VERSION: u8 = 1;
/// Fixed header size in bytes.
pub const HEADER_BYTES: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ifs = 0,
    Autoencoder = 1,
    Vq = 2,
    Net = 3,
}

impl Method {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Method::Ifs),
            1 => Ok(Method::Autoencoder),
            2 => Ok(Method::Vq),
            3 => Ok(Method::Net),
            other => Err(Error::UnknownMethod(other)),
        }
    }

    pub fn byte(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Ifs => "ifs",
            Method::Autoencoder => "ae",
            Method::Vq => "vq",
            Method::Net => "net",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub method: Method,
    pub width: u32,
    pub height: u32,
    pub block_side: u16,
    pub pad_right: u16,
    pub pad_bottom: u16,
    pub payload: Vec<u8>,
}

impl Container {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.method.byte());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.block_side.to_le_bytes());
        out.extend_from_slice(&self.pad_right.to_le_bytes());
        out.extend_from_slice(&self.pad_bottom.to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(Error::format(format!("bad container magic {magic:02x?}")));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let method = Method::from_byte(r.u8()?)?;
        let width = r.u32()?;
        let height = r.u32()?;
        let block_side = r.u16()?;
        let pad_right = r.u16()?;
        let pad_bottom = r.u16()?;
        let declared = r.u64()?;
        let actual = (bytes.len() - HEADER_BYTES) as u64;
        if declared != actual {
            return Err(Error::PayloadLength { declared, actual });
        }
        let payload = r.take(declared as usize)?.to_vec();
        Ok(Self { method, width, height, block_side, pad_right, pad_bottom, payload })
    }
}

pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::format(format!(
                "truncated payload: wanted {n} bytes at offset {}",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(8 * n)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::format(format!(
                "{} unexpected trailing payload bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn put_f64s(out: &mut Vec<u8>, vals: &[f64]) {
    for v in vals {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

// ---------------------------------------------------------------- IFS (0)

/// `k u32 | 6k f64` map coefficients.
pub fn encode_ifs_payload(system: &IfsSystem) -> Vec<u8> {
    let coeffs = system.coefficients();
    let mut out = Vec::with_capacity(4 + 8 * coeffs.len());
    out.extend_from_slice(&(system.maps().len() as u32).to_le_bytes());
    put_f64s(&mut out, &coeffs);
    out
}

pub fn decode_ifs_payload(payload: &[u8]) -> Result<IfsSystem> {
    let mut r = ByteReader::new(payload);
    let k = r.u32()? as usize;
    let coeffs = r.f64s(6 * k)?;
    r.finish()?;
    IfsSystem::from_coefficients(&coeffs)
}

// ------------------------------------------------------- autoencoder (1)

/// Code storage: raw 64-bit reals or bytes quantized over [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeMode {
    F64,
    Quantized8,
}

impl CodeMode {
    pub fn bytes_per_code(self) -> usize {
        match self {
            CodeMode::F64 => 8,
            CodeMode::Quantized8 => 1,
        }
    }
}

/// `depth u16 | code_mode u8 | stages | q u32 | code_len u32 | codes`.
/// Each stage: `in u32 | hidden u32 | lambda1 f64 | lambda2 f64 | w1 | w2`.
pub fn encode_ae_payload(
    stages: &[AutoencoderStage],
    codes: &[Vec<f64>],
    mode: CodeMode,
) -> Result<Vec<u8>> {
    if stages.is_empty() {
        return Err(Error::EmptyInput("stage list"));
    }
    let mut out = Vec::new();
    out.extend_from_slice(&(stages.len() as u16).to_le_bytes());
    out.push(match mode {
        CodeMode::F64 => 0,
        CodeMode::Quantized8 => 1,
    });
    for stage in stages {
        let w = stage.weights();
        let (i, h, _) = w.dims();
        out.extend_from_slice(&(i as u32).to_le_bytes());
        out.extend_from_slice(&(h as u32).to_le_bytes());
        let (l1, l2) = w.lambdas();
        put_f64s(&mut out, &[l1, l2]);
        put_f64s(&mut out, w.w1());
        put_f64s(&mut out, w.w2());
    }
    let code_len = stages.last().unwrap().code_len();
    out.extend_from_slice(&(codes.len() as u32).to_le_bytes());
    out.extend_from_slice(&(code_len as u32).to_le_bytes());
    for code in codes {
        if code.len() != code_len {
            return Err(Error::DimensionMismatch { expected: code_len, actual: code.len() });
        }
        match mode {
            CodeMode::F64 => put_f64s(&mut out, code),
            CodeMode::Quantized8 => {
                for &v in code {
                    out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
                }
            }
        }
    }
    Ok(out)
}

pub fn decode_ae_payload(payload: &[u8]) -> Result<(Vec<AutoencoderStage>, Vec<Vec<f64>>, CodeMode)> {
    let mut r = ByteReader::new(payload);
    let depth = r.u16()? as usize;
    let mode = match r.u8()? {
        0 => CodeMode::F64,
        1 => CodeMode::Quantized8,
        other => return Err(Error::format(format!("unknown code mode {other}"))),
    };
    let mut stages = Vec::with_capacity(depth);
    for _ in 0..depth {
        let i = r.u32()? as usize;
        let h = r.u32()? as usize;
        let l1 = r.f64()?;
        let l2 = r.f64()?;
        let w1 = r.f64s(h * i)?;
        let w2 = r.f64s(i * h)?;
        stages.push(AutoencoderStage::from_weights(LayerWeights::from_parts(
            i, h, i, w1, w2, l1, l2,
        )?)?);
    }
    let q = r.u32()? as usize;
    let code_len = r.u32()? as usize;
    let mut codes = Vec::with_capacity(q);
    for _ in 0..q {
        let code = match mode {
            CodeMode::F64 => r.f64s(code_len)?,
            CodeMode::Quantized8 => {
                r.take(code_len)?.iter().map(|&b| b as f64 / 255.0).collect()
            }
        };
        codes.push(code);
    }
    r.finish()?;
    Ok((stages, codes, mode))
}

// ---------------------------------------------------------------- VQ (2)

/// `d u32 | m u32 | m*d f64 codebook | q u32 | packed indices`, indices
/// packed LSB-first at `index_bits(m)` bits each.
pub fn encode_vq_payload(codebook: &Codebook, indices: &[usize]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(&(codebook.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(codebook.len() as u32).to_le_bytes());
    for w in codebook.weights() {
        put_f64s(&mut out, w);
    }
    out.extend_from_slice(&(indices.len() as u32).to_le_bytes());
    let bits = index_bits(codebook.len()) as usize;
    let mut acc = 0u64;
    let mut nbits = 0usize;
    for &idx in indices {
        if idx >= codebook.len() {
            return Err(Error::invalid(format!("index {idx} outside codebook")));
        }
        acc |= (idx as u64) << nbits;
        nbits += bits;
        while nbits >= 8 {
            out.push((acc & 0xff) as u8);
            acc >>= 8;
            nbits -= 8;
        }
    }
    if nbits > 0 {
        out.push((acc & 0xff) as u8);
    }
    Ok(out)
}

pub fn decode_vq_payload(payload: &[u8]) -> Result<(Codebook, Vec<usize>)> {
    let mut r = ByteReader::new(payload);
    let d = r.u32()? as usize;
    let m = r.u32()? as usize;
    if m == 0 || d == 0 {
        return Err(Error::format("empty codebook in payload"));
    }
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        weights.push(r.f64s(d)?);
    }
    let codebook = Codebook::new(weights)?;
    let q = r.u32()? as usize;
    let bits = index_bits(m) as usize;
    let packed = r.take((q * bits).div_ceil(8))?;
    r.finish()?;
    let mut indices = Vec::with_capacity(q);
    let mut acc = 0u64;
    let mut nbits = 0usize;
    let mut next = 0usize;
    let mask = (1u64 << bits) - 1;
    for _ in 0..q {
        while nbits < bits {
            acc |= (packed[next] as u64) << nbits;
            next += 1;
            nbits += 8;
        }
        let idx = (acc & mask) as usize;
        if idx >= m {
            return Err(Error::format(format!("packed index {idx} outside codebook of {m}")));
        }
        indices.push(idx);
        acc >>= bits;
        nbits -= bits;
    }
    Ok((codebook, indices))
}

// --------------------------------------------------- net / series (3)

const NET_KIND_SERIES: u8 = 0;
const NET_KIND_WEIGHTS: u8 = 1;

/// `kind 0 | mode u8 | offset f64 | scale f64 | training_error f64 | m u32 |
/// blocks (lower, upper, count u64, mean, variance) | coefficients`.
pub fn encode_series_payload(
    model: &PiecewiseModel,
    rescale: &Rescale,
    training_error: f64,
) -> Vec<u8> {
    let mut out = vec![NET_KIND_SERIES];
    out.push(match model.mode() {
        ModelMode::Constant => 0,
        ModelMode::Linear => 1,
    });
    put_f64s(&mut out, &[rescale.offset, rescale.scale, training_error]);
    let blocks = model.partition().blocks();
    out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for b in blocks {
        put_f64s(&mut out, &[b.lower, b.upper]);
        out.extend_from_slice(&(b.count as u64).to_le_bytes());
        put_f64s(&mut out, &[b.mean, b.variance]);
    }
    put_f64s(&mut out, model.coeffs());
    out
}

pub fn decode_series_payload(payload: &[u8]) -> Result<(PiecewiseModel, Rescale, f64)> {
    let mut r = ByteReader::new(payload);
    if r.u8()? != NET_KIND_SERIES {
        return Err(Error::format("payload is not a series model"));
    }
    let mode = match r.u8()? {
        0 => ModelMode::Constant,
        1 => ModelMode::Linear,
        other => return Err(Error::format(format!("unknown model mode {other}"))),
    };
    let offset = r.f64()?;
    let scale = r.f64()?;
    let training_error = r.f64()?;
    let m = r.u32()? as usize;
    let mut blocks = Vec::with_capacity(m);
    for _ in 0..m {
        let lower = r.f64()?;
        let upper = r.f64()?;
        let count = r.u64()? as usize;
        let mean = r.f64()?;
        let variance = r.f64()?;
        blocks.push(Block { lower, upper, count, mean, variance });
    }
    let ncoef = match mode {
        ModelMode::Constant => m,
        ModelMode::Linear => 2 * m,
    };
    let coeffs = r.f64s(ncoef)?;
    r.finish()?;
    let model = PiecewiseModel::new(Partition::from_blocks(blocks)?, mode, coeffs)?;
    Ok((model, Rescale { offset, scale }, training_error))
}

/// `kind 1 | in u32 | hidden u32 | out u32 | lambda1 | lambda2 | w1 | w2`.
pub fn encode_net_payload(weights: &LayerWeights) -> Vec<u8> {
    let (i, h, o) = weights.dims();
    let mut out = vec![NET_KIND_WEIGHTS];
    out.extend_from_slice(&(i as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&(o as u32).to_le_bytes());
    let (l1, l2) = weights.lambdas();
    put_f64s(&mut out, &[l1, l2]);
    put_f64s(&mut out, weights.w1());
    put_f64s(&mut out, weights.w2());
    out
}

pub fn decode_net_payload(payload: &[u8]) -> Result<LayerWeights> {
    let mut r = ByteReader::new(payload);
    if r.u8()? != NET_KIND_WEIGHTS {
        return Err(Error::format("payload is not a weight file"));
    }
    let i = r.u32()? as usize;
    let h = r.u32()? as usize;
    let o = r.u32()? as usize;
    let l1 = r.f64()?;
    let l2 = r.f64()?;
    let w1 = r.f64s(h * i)?;
    let w2 = r.f64s(o * h)?;
    r.finish()?;
    LayerWeights::from_parts(i, h, o, w1, w2, l1, l2)
}
