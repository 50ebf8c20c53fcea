//! Distances between binary images and finite point sets.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Normalized Hamming distance: fraction of pixels that differ, in [0, 1].
pub fn hamming_distance(a: &BinaryImage, b: &BinaryImage) -> Result<f64> {
    let diff = a.diff_count(b)?;
    Ok(diff as f64 / a.pixel_count() as f64)
}

/// Set pixels as plane points `(x, y)` in pixel units.
pub fn image_points(img: &BinaryImage) -> Vec<(f64, f64)> {
    img.set_pixels()
        .into_iter()
        .map(|(x, y)| (x as f64, y as f64))
        .collect()
}

/// Hausdorff distance between nonempty finite point sets:
/// `max(sup_a inf_b d(a,b), sup_b inf_a d(b,a))`.
pub fn hausdorff_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("point set"));
    }
    Ok(directed(a, b).max(directed(b, a)).sqrt())
}

// squared sup-inf distance; sqrt once at the end
fn directed(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    let mut sup = 0.0f64;
    for &p in from {
        let mut inf = f64::INFINITY;
        for &q in to {
            let d2 = (p.0 - q.0) * (p.0 - q.0) + (p.1 - q.1) * (p.1 - q.1);
            if d2 < inf {
                inf = d2;
                if inf <= sup {
                    // cannot raise the sup, skip the rest of the row
                    break;
                }
            }
        }
        if inf > sup {
            sup = inf;
        }
    }
    sup
}
