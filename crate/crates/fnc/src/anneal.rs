//! Glauber acceptance rule and annealing schedules shared by the stochastic
//! searches (IFS coefficient search, Monte-Carlo trainers).

use crate::error::{Error, Result};

/// Probability of accepting a move with cost change `delta` at inverse
/// temperature `beta`: `1 / (1 + exp(beta * delta))`.
///
/// Equals 1/2 at `delta == 0`, decreases in `delta`, and satisfies
/// `p(delta) + p(-delta) == 1` exactly in floating point (both branches share
/// the same computed exponential).
pub fn acceptance_probability(delta: f64, beta: f64) -> f64 {
    debug_assert!(beta > 0.0);
    let mag = beta * delta.abs();
    // exp saturates to +inf for large mag; 1/(1+inf) == 0, so the limits hold.
    let q = 1.0 / (1.0 + mag.exp());
    if delta >= 0.0 {
        q
    } else {
        1.0 - q
    }
}

/// Geometric inverse-temperature ramp for a fixed-step coefficient walk.
#[derive(Debug, Clone)]
pub struct AnnealSchedule {
    /// Starting inverse temperature.
    pub beta0: f64,
    /// Multiplicative growth per sweep (>= 1 keeps the ramp non-decreasing).
    pub growth: f64,
    /// Number of sweeps; one sweep proposes one move per state coefficient.
    pub sweeps: usize,
    /// Coefficient step for discrete proposals.
    pub step: f64,
    pub seed: u64,
}

impl AnnealSchedule {
    pub fn new(beta0: f64, growth: f64, sweeps: usize, step: f64, seed: u64) -> Result<Self> {
        let s = Self { beta0, growth, sweeps, step, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta0 > 0.0) || !self.beta0.is_finite() {
            return Err(Error::invalid(format!("beta0 must be positive, got {}", self.beta0)));
        }
        if !(self.growth >= 1.0) || !self.growth.is_finite() {
            return Err(Error::invalid(format!("growth must be >= 1, got {}", self.growth)));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid(format!("step must be positive, got {}", self.step)));
        }
        Ok(())
    }

    /// `beta0 * growth^sweep`, non-decreasing in the sweep index.
    pub fn beta_at(&self, sweep: usize) -> f64 {
        self.beta0 * self.growth.powi(sweep as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_at_zero() {
        for beta in [0.1, 1.0, 10.0, 1e6] {
            assert_eq!(acceptance_probability(0.0, beta), 0.5);
        }
    }

    #[test]
    fn closed_form_quarter() {
        // beta=1, delta=ln 3 -> 1/(1+3) = 1/4
        let p = acceptance_probability(3f64.ln(), 1.0);
        assert!((p - 0.25).abs() < 1e-15, "p={p}");
    }

    #[test]
    fn limits() {
        assert_eq!(acceptance_probability(f64::INFINITY, 1.0), 0.0);
        assert_eq!(acceptance_probability(1e6, 1.0), 0.0);
        assert_eq!(acceptance_probability(f64::NEG_INFINITY, 1.0), 1.0);
        assert_eq!(acceptance_probability(-1e6, 1.0), 1.0);
    }

    #[test]
    fn complement_is_exact() {
        let deltas = [0.0, 1e-300, 1e-12, 0.3, 1.0, 7.5, 100.0, 1e4];
        for &d in &deltas {
            for &beta in &[0.01, 1.0, 3.7, 50.0] {
                let sum = acceptance_probability(d, beta) + acceptance_probability(-d, beta);
                assert_eq!(sum, 1.0, "delta={d} beta={beta}");
            }
        }
    }

    #[test]
    fn monotone_decreasing_in_delta() {
        let mut prev = f64::INFINITY;
        for i in -100..=100 {
            let p = acceptance_probability(i as f64 * 0.1, 2.0);
            assert!(p <= prev);
            assert!(p > 0.0 && p < 1.0);
            prev = p;
        }
    }

    #[test]
    fn beta_ramp_non_decreasing() {
        let s = AnnealSchedule::new(0.5, 1.01, 100, 0.01, 1).unwrap();
        let mut prev = 0.0;
        for n in 0..100 {
            let b = s.beta_at(n);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn bad_schedules_rejected() {
        assert!(AnnealSchedule::new(0.0, 1.0, 1, 0.1, 0).is_err());
        assert!(AnnealSchedule::new(1.0, 0.9, 1, 0.1, 0).is_err());
        assert!(AnnealSchedule::new(1.0, 1.0, 1, 0.0, 0).is_err());
    }
}
