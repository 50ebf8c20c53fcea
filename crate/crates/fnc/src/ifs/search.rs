//! Metropolis/annealing search for IFS coefficients approximating a target
//! image, using the one-step collage distance `d(W(L), L)` as cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anneal::{acceptance_probability, AnnealSchedule};
use crate::error::{Error, Result};
use crate::image::{BinaryImage, Viewport};

use super::metrics::{hausdorff_distance, image_points};
use super::{AffineMap, IfsSystem};

/// Cost metric for the collage distance inside the search loop. Hamming is
/// one pass over the raster; Hausdorff costs O(N^2) point operations and is
/// kept for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    Hamming,
    Hausdorff,
}

/// Result of [`inverse_search`].
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub system: IfsSystem,
    /// Best collage distance reached.
    pub best_delta: f64,
    /// Best-so-far collage distance, recorded at the start and after every
    /// sweep; non-increasing by construction.
    pub trace: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

// coefficient slot layout within a map: a b c d e f
const LINEAR_SLOTS: [bool; 6] = [true, true, false, true, true, false];

struct CostContext<'a> {
    target: &'a BinaryImage,
    target_points: Vec<(f64, f64)>,
    centers: Vec<(f64, f64)>,
    viewport: Viewport,
    metric: DistanceMetric,
}

impl<'a> CostContext<'a> {
    fn new(target: &'a BinaryImage, viewport: &Viewport, metric: DistanceMetric) -> Self {
        let (w, h) = (target.width(), target.height());
        let centers = target
            .set_pixels()
            .into_iter()
            .map(|(x, y)| viewport.center_of(x, y, w, h))
            .collect();
        let target_points = match metric {
            DistanceMetric::Hausdorff => image_points(target),
            DistanceMetric::Hamming => Vec::new(),
        };
        Self { target, target_points, centers, viewport: *viewport, metric }
    }

    /// `d(W(L), L)` where `W(L)` unions the images of the target's set
    /// pixels under all maps.
    fn collage_cost(&self, maps: &[AffineMap]) -> f64 {
        let (w, h) = (self.target.width(), self.target.height());
        let mut collage = BinaryImage::new(w, h).expect("target has valid dimensions");
        for &c in &self.centers {
            for map in maps {
                if let Some((x, y)) = self.viewport.pixel_of(map.apply(c), w, h) {
                    collage.set(x, y, true);
                }
            }
        }
        match self.metric {
            DistanceMetric::Hamming => {
                self.target.diff_count(&collage).expect("same dimensions") as f64
                    / self.target.pixel_count() as f64
            }
            DistanceMetric::Hausdorff => {
                let pts = image_points(&collage);
                if pts.is_empty() {
                    // every image point left the viewport; worst possible state
                    return f64::INFINITY;
                }
                hausdorff_distance(&pts, &self.target_points).expect("nonempty sets")
            }
        }
    }
}

fn slot_bounds(slot: usize, viewport: &Viewport) -> (f64, f64) {
    if LINEAR_SLOTS[slot] {
        (-1.0, 1.0)
    } else if slot == 2 {
        (viewport.x0, viewport.x1)
    } else {
        (viewport.y0, viewport.y1)
    }
}

fn random_grid_value(rng: &mut ChaCha8Rng, lo: f64, hi: f64, h: f64) -> f64 {
    let n = ((hi - lo) / h).floor() as u64;
    (lo + h * rng.gen_range(0..=n) as f64).min(hi)
}

fn random_contractive_map(
    rng: &mut ChaCha8Rng,
    viewport: &Viewport,
    h: f64,
) -> Result<AffineMap> {
    for _ in 0..10_000 {
        let mut c = [0.0f64; 6];
        for (slot, v) in c.iter_mut().enumerate() {
            let (lo, hi) = slot_bounds(slot, viewport);
            *v = random_grid_value(rng, lo, hi, h);
        }
        let map = AffineMap::from_coefficients(&c);
        if map.contraction_factor() < 1.0 {
            return Ok(map);
        }
    }
    Err(Error::invalid(
        "could not draw a contractive initial map; step too coarse?",
    ))
}

/// Walks the discretized coefficient space with single-coefficient `+-step`
/// proposals accepted by the Glauber rule on the collage-distance change.
/// Proposals that leave the coefficient box or break `s < 1` count as
/// rejected moves. Returns the best system seen, its collage distance, and
/// the per-sweep best trace; bit-identical for identical seeds.
pub fn inverse_search(
    target: &BinaryImage,
    k: usize,
    schedule: &AnnealSchedule,
    init: Option<&[AffineMap]>,
    metric: DistanceMetric,
    viewport: &Viewport,
) -> Result<SearchOutcome> {
    schedule.validate()?;
    viewport.validate()?;
    if k == 0 {
        return Err(Error::invalid("map count k must be at least 1"));
    }
    if target.ones() == 0 {
        return Err(Error::EmptyInput("search target image"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let h = schedule.step;

    let mut maps: Vec<AffineMap> = match init {
        Some(given) => {
            if given.len() != k {
                return Err(Error::DimensionMismatch { expected: k, actual: given.len() });
            }
            let system = IfsSystem::validate(given.to_vec())?;
            system.maps().to_vec()
        }
        None => (0..k)
            .map(|_| random_contractive_map(&mut rng, viewport, h))
            .collect::<Result<_>>()?,
    };
    let mut factors: Vec<f64> = maps.iter().map(|m| m.contraction_factor()).collect();

    let ctx = CostContext::new(target, viewport, metric);
    let mut cost = ctx.collage_cost(&maps);
    let mut best_cost = cost;
    let mut best_maps = maps.clone();

    let mut trace = Vec::with_capacity(schedule.sweeps + 1);
    trace.push(best_cost);
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    for sweep in 0..schedule.sweeps {
        let beta = schedule.beta_at(sweep);
        for _ in 0..6 * k {
            let coeff = rng.gen_range(0..6 * k);
            let (map_idx, slot) = (coeff / 6, coeff % 6);
            let delta = if rng.gen::<bool>() { h } else { -h };

            let mut cand = maps[map_idx].coefficients();
            cand[slot] += delta;
            let (lo, hi) = slot_bounds(slot, viewport);
            if cand[slot] < lo || cand[slot] > hi {
                rejected += 1;
                continue;
            }
            let cand_map = AffineMap::from_coefficients(&cand);
            let cand_factor = cand_map.contraction_factor();
            if LINEAR_SLOTS[slot] && cand_factor >= 1.0 {
                rejected += 1;
                continue;
            }

            let old = maps[map_idx];
            maps[map_idx] = cand_map;
            let cand_cost = ctx.collage_cost(&maps);
            let diff = cand_cost - cost;
            if rng.gen::<f64>() < acceptance_probability(diff, beta) {
                accepted += 1;
                cost = cand_cost;
                factors[map_idx] = cand_factor;
                if cost < best_cost {
                    best_cost = cost;
                    best_maps = maps.clone();
                }
            } else {
                rejected += 1;
                maps[map_idx] = old;
            }
        }
        trace.push(best_cost);
    }

    let system = IfsSystem::validate(best_maps)?;
    Ok(SearchOutcome { system, best_delta: best_cost, trace, accepted, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::chaos_game;

    fn sierpinski_target(size: usize) -> BinaryImage {
        chaos_game(&IfsSystem::sierpinski(), 120_000, 20, &Viewport::UNIT, size, size, 42).unwrap()
    }

    #[test]
    fn warm_start_stays_near_true_coefficients() {
        let target = sierpinski_target(64);
        let schedule = AnnealSchedule::new(50.0, 1.01, 40, 1.0 / 64.0, 3).unwrap();
        let init = IfsSystem::sierpinski();
        let out = inverse_search(
            &target,
            3,
            &schedule,
            Some(init.maps()),
            DistanceMetric::Hamming,
            &Viewport::UNIT,
        )
        .unwrap();
        assert!(out.best_delta <= 0.05, "best delta {}", out.best_delta);
        for pair in out.trace.windows(2) {
            assert!(pair[1] <= pair[0], "best-so-far trace increased");
        }
    }

    #[test]
    fn single_map_search_finds_small_collage_distance() {
        // one-map target: attractor is a single pixel
        let m = AffineMap::new(0.25, 0.0, 0.375, 0.0, 0.25, 0.375);
        let sys = IfsSystem::validate(vec![m]).unwrap();
        let target = chaos_game(&sys, 20_000, 50, &Viewport::UNIT, 32, 32, 9).unwrap();
        let schedule = AnnealSchedule::new(2.0, 1.002, 2_000, 1.0 / 64.0, 17).unwrap();
        let out = inverse_search(
            &target,
            1,
            &schedule,
            None,
            DistanceMetric::Hamming,
            &Viewport::UNIT,
        )
        .unwrap();
        assert!(out.best_delta < 0.1, "best delta {}", out.best_delta);
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let target = sierpinski_target(32);
        let schedule = AnnealSchedule::new(5.0, 1.01, 30, 1.0 / 32.0, 11).unwrap();
        let run = || {
            inverse_search(
                &target,
                2,
                &schedule,
                None,
                DistanceMetric::Hamming,
                &Viewport::UNIT,
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.system, b.system);
        assert_eq!(a.accepted, b.accepted);
    }

    #[test]
    fn hausdorff_metric_also_runs() {
        let target = sierpinski_target(16);
        let schedule = AnnealSchedule::new(5.0, 1.01, 10, 1.0 / 16.0, 5).unwrap();
        let out = inverse_search(
            &target,
            2,
            &schedule,
            None,
            DistanceMetric::Hausdorff,
            &Viewport::UNIT,
        )
        .unwrap();
        assert!(out.best_delta.is_finite());
        for pair in out.trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn rejects_empty_target_and_bad_k() {
        let empty = BinaryImage::new(8, 8).unwrap();
        let schedule = AnnealSchedule::new(1.0, 1.0, 1, 0.1, 0).unwrap();
        assert!(inverse_search(&empty, 1, &schedule, None, DistanceMetric::Hamming, &Viewport::UNIT).is_err());
        let target = sierpinski_target(16);
        assert!(inverse_search(&target, 0, &schedule, None, DistanceMetric::Hamming, &Viewport::UNIT).is_err());
    }
}
