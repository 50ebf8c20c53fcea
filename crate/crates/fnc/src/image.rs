//! Binary raster images and the plane viewport they are sampled from.

use crate::error::{Error, Result};

/// Rectangular lattice of {0,1} pixels, bit-packed row-major.
///
/// Unused bits past `width * height` in the last word are kept at zero so
/// popcount-based distances stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

impl BinaryImage {
    /// All-zero image. Dimensions must be positive.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let nbits = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("image dimension overflow"))?;
        let words = vec![0u64; nbits.div_ceil(64)];
        Ok(Self { width, height, words })
    }

    pub fn filled(width: usize, height: usize) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for w in img.words.iter_mut() {
            *w = u64::MAX;
        }
        img.clear_tail();
        Ok(img)
    }

    /// Builds from one value per pixel, row-major; any nonzero value sets the bit.
    pub fn from_bits(width: usize, height: usize, bits: &[u8]) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: bits.len(),
            });
        }
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                img.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let i = y * self.width + x;
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        debug_assert!(x < self.width && y < self.height);
        let i = y * self.width + x;
        if value {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    /// Number of set pixels.
    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn fraction_set(&self) -> f64 {
        self.ones() as f64 / self.pixel_count() as f64
    }

    /// Pixels that differ from `other`.
    pub fn diff_count(&self, other: &Self) -> Result<usize> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                expected: self.pixel_count(),
                actual: other.pixel_count(),
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Coordinates of set pixels in row-major order.
    pub fn set_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.ones());
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let nbits = self.width * self.height;
        let rem = nbits % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Axis-aligned window of the plane that a raster samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Viewport {
    pub const UNIT: Viewport = Viewport {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let vp = Viewport { x0, y0, x1, y1 };
        vp.validate()?;
        Ok(vp)
    }

    pub fn validate(&self) -> Result<()> {
        let finite =
            self.x0.is_finite() && self.y0.is_finite() && self.x1.is_finite() && self.y1.is_finite();
        if !finite || self.x0 >= self.x1 || self.y0 >= self.y1 {
            return Err(Error::invalid(format!("degenerate viewport {self:?}")));
        }
        Ok(())
    }

    /// Pixel containing the point, by floor of the normalized coordinate.
    ///
    /// The exact right/top boundary belongs to the last pixel so that points
    /// on the viewport edge (e.g. map fixed points at corners) still raster.
    /// Points outside the viewport return `None`.
    #[inline]
    pub fn pixel_of(&self, p: (f64, f64), width: usize, height: usize) -> Option<(usize, usize)> {
        let u = (p.0 - self.x0) / (self.x1 - self.x0);
        let v = (p.1 - self.y0) / (self.y1 - self.y0);
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return None;
        }
        let x = ((u * width as f64).floor() as usize).min(width - 1);
        let y = ((v * height as f64).floor() as usize).min(height - 1);
        Some((x, y))
    }

    /// Plane coordinates of a pixel center.
    #[inline]
    pub fn center_of(&self, x: usize, y: usize, width: usize, height: usize) -> (f64, f64) {
        (
            self.x0 + (x as f64 + 0.5) / width as f64 * (self.x1 - self.x0),
            self.y0 + (y as f64 + 0.5) / height as f64 * (self.y1 - self.y0),
        )
    }
}
