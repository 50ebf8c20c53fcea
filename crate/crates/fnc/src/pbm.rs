//! Portable bitmap/graymap reading and writing.
//!
//! PBM (P1 ascii, P4 packed) maps directly onto [`BinaryImage`], bit value 1
//! meaning a set (black) pixel. PGM (P2/P5) is accepted on input and
//! binarized against a threshold fraction of the maxval; dark pixels become
//! set bits.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Output encoding for [`write_pbm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmMode {
    /// ASCII `P1`.
    Plain,
    /// Packed binary `P4`, rows padded to byte boundaries.
    Packed,
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format("unexpected end of header"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        let s = std::str::from_utf8(tok).map_err(|_| Error::format(format!("bad {what} token")))?;
        let v: u64 = s
            .parse()
            .map_err(|_| Error::format(format!("bad {what} value {s:?}")))?;
        if v == 0 || v > u32::MAX as u64 {
            return Err(Error::format(format!("{what} {v} out of range")));
        }
        Ok(v as usize)
    }
}

/// Parses P1/P4 bitmaps. For graymaps use [`parse_pgm`] or [`parse_image`].
pub fn parse_pbm(bytes: &[u8]) -> Result<BinaryImage> {
    let mut sc = Scanner::new(bytes);
    match sc.token()? {
        b"P1" => parse_p1(&mut sc),
        b"P4" => parse_p4(&mut sc),
        other => Err(Error::format(format!(
            "not a PBM file (magic {:?})",
            String::from_utf8_lossy(other)
        ))),
    }
}

/// Parses P2/P5 graymaps and binarizes: a pixel is set when its gray value is
/// darker than `threshold` times the maxval.
pub fn parse_pgm(bytes: &[u8], threshold: f64) -> Result<BinaryImage> {
    let mut sc = Scanner::new(bytes);
    match sc.token()? {
        b"P2" => parse_gray(&mut sc, false, threshold),
        b"P5" => parse_gray(&mut sc, true, threshold),
        other => Err(Error::format(format!(
            "not a PGM file (magic {:?})",
            String::from_utf8_lossy(other)
        ))),
    }
}

/// Dispatches on the magic across P1/P2/P4/P5.
pub fn parse_image(bytes: &[u8], gray_threshold: f64) -> Result<BinaryImage> {
    let mut sc = Scanner::new(bytes);
    match sc.token()? {
        b"P1" | b"P4" => parse_pbm(bytes),
        b"P2" | b"P5" => parse_pgm(bytes, gray_threshold),
        other => Err(Error::format(format!(
            "unsupported netpbm magic {:?}",
            String::from_utf8_lossy(other)
        ))),
    }
}

fn parse_p1(sc: &mut Scanner) -> Result<BinaryImage> {
    let width = sc.number("width")?;
    let height = sc.number("height")?;
    let mut img = BinaryImage::new(width, height)?;
    let mut count = 0usize;
    let total = width * height;
    // P1 pixel digits need not be whitespace-separated.
    while count < total {
        sc.skip_space_and_comments();
        if sc.pos >= sc.bytes.len() {
            return Err(Error::format(format!(
                "truncated P1 payload: {count} of {total} pixels"
            )));
        }
        let b = sc.bytes[sc.pos];
        sc.pos += 1;
        let bit = match b {
            b'0' => false,
            b'1' => true,
            _ => return Err(Error::format(format!("bad P1 pixel byte {b:#x}"))),
        };
        img.set(count % width, count / width, bit);
        count += 1;
    }
    Ok(img)
}

fn parse_p4(sc: &mut Scanner) -> Result<BinaryImage> {
    let width = sc.number("width")?;
    let height = sc.number("height")?;
    // exactly one whitespace byte separates header from payload
    if sc.pos >= sc.bytes.len() || !sc.bytes[sc.pos].is_ascii_whitespace() {
        return Err(Error::format("missing separator before P4 payload"));
    }
    sc.pos += 1;
    let row_bytes = width.div_ceil(8);
    let need = row_bytes * height;
    let payload = &sc.bytes[sc.pos..];
    if payload.len() < need {
        return Err(Error::format(format!(
            "truncated P4 payload: {} of {need} bytes",
            payload.len()
        )));
    }
    let mut img = BinaryImage::new(width, height)?;
    for y in 0..height {
        let row = &payload[y * row_bytes..(y + 1) * row_bytes];
        for x in 0..width {
            let byte = row[x / 8];
            if (byte >> (7 - x % 8)) & 1 == 1 {
                img.set(x, y, true);
            }
        }
    }
    Ok(img)
}

fn parse_gray(sc: &mut Scanner, packed: bool, threshold: f64) -> Result<BinaryImage> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "gray threshold {threshold} outside [0,1]"
        )));
    }
    let width = sc.number("width")?;
    let height = sc.number("height")?;
    let maxval = sc.number("maxval")?;
    if maxval > 65535 {
        return Err(Error::format(format!("maxval {maxval} out of range")));
    }
    let cutoff = threshold * maxval as f64;
    let mut img = BinaryImage::new(width, height)?;
    let total = width * height;
    if packed {
        if sc.pos >= sc.bytes.len() || !sc.bytes[sc.pos].is_ascii_whitespace() {
            return Err(Error::format("missing separator before P5 payload"));
        }
        sc.pos += 1;
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let payload = &sc.bytes[sc.pos..];
        if payload.len() < total * bytes_per {
            return Err(Error::format("truncated P5 payload"));
        }
        for i in 0..total {
            let v = if bytes_per == 2 {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as f64
            } else {
                payload[i] as f64
            };
            if v < cutoff {
                img.set(i % width, i / width, true);
            }
        }
    } else {
        for i in 0..total {
            let tok = sc.token().map_err(|_| {
                Error::format(format!("truncated P2 payload: {i} of {total} pixels"))
            })?;
            let s = std::str::from_utf8(tok).map_err(|_| Error::format("bad P2 token"))?;
            let v: f64 = s
                .parse()
                .map_err(|_| Error::format(format!("bad P2 value {s:?}")))?;
            if v < cutoff {
                img.set(i % width, i / width, true);
            }
        }
    }
    Ok(img)
}

/// Serializes bit-exactly; `parse_pbm(write_pbm(img, m)) == img` for both modes.
pub fn write_pbm(img: &BinaryImage, mode: PbmMode) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    match mode {
        PbmMode::Plain => {
            let mut out = format!("P1\n{w} {h}\n").into_bytes();
            for y in 0..h {
                let mut line = String::with_capacity(2 * w);
                for x in 0..w {
                    if x > 0 {
                        line.push(' ');
                    }
                    line.push(if img.get(x, y) { '1' } else { '0' });
                }
                line.push('\n');
                out.extend_from_slice(line.as_bytes());
            }
            out
        }
        PbmMode::Packed => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            let row_bytes = w.div_ceil(8);
            for y in 0..h {
                let mut row = vec![0u8; row_bytes];
                for x in 0..w {
                    if img.get(x, y) {
                        row[x / 8] |= 1 << (7 - x % 8);
                    }
                }
                out.extend_from_slice(&row);
            }
            out
        }
    }
}
