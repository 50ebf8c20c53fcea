//! Affine iterated function systems: contraction checks, attractor
//! rendering, image metrics and the annealed inverse coefficient search.

mod metrics;
mod render;
mod search;

pub use metrics::{hamming_distance, hausdorff_distance, image_points};
pub use render::{chaos_game, deterministic_attractor, hutchinson_step};
pub use search::{inverse_search, DistanceMetric, SearchOutcome};

use crate::error::{Error, Result};

/// Plane map `w(x, y) = (a x + b y + c, d x + e y + f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl AffineMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self { a, b, c, d, e, f }
    }

    #[inline]
    pub fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        (
            self.a * p.0 + self.b * p.1 + self.c,
            self.d * p.0 + self.e * p.1 + self.f,
        )
    }

    /// Operator norm (largest singular value) of the linear part
    /// `[[a, b], [d, e]]`; the tightest Lipschitz constant of the map.
    pub fn contraction_factor(&self) -> f64 {
        let sq = self.a * self.a + self.b * self.b + self.d * self.d + self.e * self.e;
        let det = self.a * self.e - self.b * self.d;
        // singular values s satisfy s^4 - sq*s^2 + det^2 = 0
        let disc = (sq * sq - 4.0 * det * det).max(0.0);
        (0.5 * (sq + disc.sqrt())).sqrt()
    }

    /// Fixed point `(I - A)^(-1) t`, when the linear part has no unit
    /// eigenvalue. Every contractive map has one.
    pub fn fixed_point(&self) -> Option<(f64, f64)> {
        let m00 = 1.0 - self.a;
        let m01 = -self.b;
        let m10 = -self.d;
        let m11 = 1.0 - self.e;
        let det = m00 * m11 - m01 * m10;
        if det.abs() < 1e-12 {
            return None;
        }
        Some((
            (m11 * self.c - m01 * self.f) / det,
            (-m10 * self.c + m00 * self.f) / det,
        ))
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn from_coefficients(c: &[f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }
}

/// Validated family of contractive maps sharing the contraction factor `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
    s: f64,
}

impl IfsSystem {
    /// Checks `0 < s < 1` where `s` is the largest per-map contraction factor.
    pub fn validate(maps: Vec<AffineMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyInput("ifs map list"));
        }
        let s = maps
            .iter()
            .map(|m| m.contraction_factor())
            .fold(0.0f64, f64::max);
        if !s.is_finite() || s >= 1.0 {
            return Err(Error::NotContractive { factor: s });
        }
        Ok(Self { maps, s })
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn contraction(&self) -> f64 {
        self.s
    }

    /// Flat coefficient list, 6 per map.
    pub fn coefficients(&self) -> Vec<f64> {
        self.maps.iter().flat_map(|m| m.coefficients()).collect()
    }

    pub fn from_coefficients(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 6 != 0 {
            return Err(Error::invalid(format!(
                "coefficient list length {} is not a positive multiple of 6",
                coeffs.len()
            )));
        }
        let maps = coeffs
            .chunks_exact(6)
            .map(|c| AffineMap::new(c[0], c[1], c[2], c[3], c[4], c[5]))
            .collect();
        Self::validate(maps)
    }

    /// The three half-scale maps whose fixed points sit at the corners
    /// (0,0), (1,0), (0,1) of the unit viewport.
    pub fn sierpinski() -> Self {
        Self::validate(vec![
            AffineMap::new(0.5, 0.0, 0.0, 0.0, 0.5, 0.0),
            AffineMap::new(0.5, 0.0, 0.5, 0.0, 0.5, 0.0),
            AffineMap::new(0.5, 0.0, 0.0, 0.0, 0.5, 0.5),
        ])
        .expect("reference system is contractive")
    }
}

/// Collage theorem bound `eps / (1 - s)` on the attractor distance.
pub fn collage_bound(eps: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("contraction factor {s} outside (0,1)")));
    }
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("collage distance {eps} negative")));
    }
    Ok(eps / (1.0 - s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn apply_identity_and_scale() {
        let id = AffineMap::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(id.apply((2.0, 3.0)), (2.0, 3.0));
        let half = AffineMap::new(0.5, 0.0, 0.0, 0.0, 0.5, 0.0);
        assert_eq!(half.apply((2.0, 4.0)), (1.0, 2.0));
    }

    #[test]
    fn apply_matches_direct_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let m = AffineMap::new(c[0], c[1], c[2], c[3], c[4], c[5]);
            let p = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let direct = (c[0] * p.0 + c[1] * p.1 + c[2], c[3] * p.0 + c[4] * p.1 + c[5]);
            assert_eq!(m.apply(p), direct);
        }
    }

    #[test]
    fn contraction_factor_known_cases() {
        let half = AffineMap::new(0.5, 0.0, 0.0, 0.0, 0.5, 0.0);
        assert!((half.contraction_factor() - 0.5).abs() < 1e-15);
        let swap = AffineMap::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0);
        assert!((swap.contraction_factor() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shear_norm_is_golden_ratio() {
        // oracle: maximize |Mv| over a fine angular grid of unit vectors
        let shear = AffineMap::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.0);
        let mut best = 0.0f64;
        for i in 0..200_000 {
            let t = i as f64 / 200_000.0 * std::f64::consts::TAU;
            let (vx, vy) = (t.cos(), t.sin());
            let (ix, iy) = (vx + vy, vy);
            best = best.max((ix * ix + iy * iy).sqrt());
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((shear.contraction_factor() - phi).abs() < 1e-12);
        assert!((shear.contraction_factor() - best).abs() < 1e-8);
    }

    #[test]
    fn factor_bounds_point_pair_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let m = AffineMap::new(
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
            );
            let s = m.contraction_factor();
            for _ in 0..100 {
                let p: (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let q: (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let dpq = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
                let (ip, iq) = (m.apply(p), m.apply(q));
                let dim = ((ip.0 - iq.0).powi(2) + (ip.1 - iq.1).powi(2)).sqrt();
                assert!(dim <= s * dpq + 1e-12, "factor {s} violated: {dim} > {}", s * dpq);
            }
        }
    }

    #[test]
    fn validate_takes_max_factor() {
        let sys = IfsSystem::validate(vec![
            AffineMap::new(0.3, 0.0, 0.0, 0.0, 0.3, 0.0),
            AffineMap::new(0.7, 0.0, 0.2, 0.0, 0.7, 0.2),
        ])
        .unwrap();
        assert!((sys.contraction() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn swap_map_rejected() {
        let res = IfsSystem::validate(vec![
            AffineMap::new(0.5, 0.0, 0.0, 0.0, 0.5, 0.0),
            AffineMap::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0),
        ]);
        assert!(matches!(res, Err(Error::NotContractive { .. })));
    }

    #[test]
    fn sierpinski_reference() {
        let sys = IfsSystem::sierpinski();
        assert_eq!(sys.maps().len(), 3);
        assert!((sys.contraction() - 0.5).abs() < 1e-15);
        let fps: Vec<_> = sys.maps().iter().map(|m| m.fixed_point().unwrap()).collect();
        assert_eq!(fps, vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
    }

    #[test]
    fn coefficient_roundtrip() {
        let sys = IfsSystem::sierpinski();
        let again = IfsSystem::from_coefficients(&sys.coefficients()).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn collage_bound_values() {
        assert!((collage_bound(0.01, 0.5).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(collage_bound(0.0, 0.9).unwrap(), 0.0);
        // the reported reconstruction floor through the bound
        assert!((collage_bound(0.64, 0.5).unwrap() - 1.28).abs() < 1e-15);
        assert!(collage_bound(0.1, 1.0).is_err());
        assert!(collage_bound(0.1, 0.0).is_err());
        assert!(collage_bound(-0.1, 0.5).is_err());
    }
}
