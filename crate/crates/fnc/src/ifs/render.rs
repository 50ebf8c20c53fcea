//! Attractor rendering: the stochastic chaos game and the deterministic
//! set-iteration of the Hutchinson (union) operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Viewport};

use super::IfsSystem;

/// Renders the attractor by iterating `p <- w_i(p)` with `i` uniform over the
/// maps, setting the pixel of every point visited after `burn_in` steps.
pub fn chaos_game(
    ifs: &IfsSystem,
    iterations: usize,
    burn_in: usize,
    viewport: &Viewport,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<BinaryImage> {
    viewport.validate()?;
    if iterations <= burn_in {
        return Err(Error::invalid(format!(
            "iterations ({iterations}) must exceed burn_in ({burn_in})"
        )));
    }
    let mut img = BinaryImage::new(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = (
        rng.gen_range(viewport.x0..viewport.x1),
        rng.gen_range(viewport.y0..viewport.y1),
    );
    let maps = ifs.maps();
    for step in 0..iterations {
        let i = rng.gen_range(0..maps.len());
        p = maps[i].apply(p);
        if step >= burn_in {
            if let Some((x, y)) = viewport.pixel_of(p, width, height) {
                img.set(x, y, true);
            }
        }
    }
    Ok(img)
}

/// One application of the union operator to a raster set: every set pixel's
/// center is pushed through every map and rasterized back.
pub fn hutchinson_step(ifs: &IfsSystem, set: &BinaryImage, viewport: &Viewport) -> BinaryImage {
    let (w, h) = (set.width(), set.height());
    let mut out = BinaryImage::new(w, h).expect("source image has valid dimensions");
    for (px, py) in set.set_pixels() {
        let center = viewport.center_of(px, py, w, h);
        for map in ifs.maps() {
            if let Some((x, y)) = viewport.pixel_of(map.apply(center), w, h) {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Iterates [`hutchinson_step`] from `start`. With contraction factor below 1
/// the raster set settles; iterating past that point is harmless.
pub fn deterministic_attractor(
    ifs: &IfsSystem,
    start: &BinaryImage,
    viewport: &Viewport,
    iterations: usize,
) -> Result<BinaryImage> {
    viewport.validate()?;
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let mut set = start.clone();
    for _ in 0..iterations {
        set = hutchinson_step(ifs, &set, viewport);
    }
    Ok(set)
}
