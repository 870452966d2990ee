use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest learning rate the probing analysis covers.
pub const MAX_ETA: f64 = 0.4;

/// Default optimistic-variance weight for the k=3 explore-exploit policy.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Tunable parameters shared by the policies. Not every policy reads every
/// field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgoParams {
    /// Privacy / learning rate.
    pub eta: f64,
    /// Weight on the sample variance in the explore-exploit index.
    pub epsilon: f64,
    /// Probability of following the hint in the imperfect-hint policy.
    pub hint_prob: f64,
    /// Number of hints that may be corrupted.
    pub budget: u64,
    /// Probes per step.
    pub probes: usize,
    /// Bound on the gradient norm of convex losses.
    pub grad_bound: f64,
    /// Bound on the largest Hessian eigenvalue of convex losses.
    pub hessian_bound: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            eta: MAX_ETA,
            epsilon: DEFAULT_EPSILON,
            hint_prob: 1.0,
            budget: 0,
            probes: 2,
            grad_bound: 1.0,
            hessian_bound: 0.0,
        }
    }
}

impl AlgoParams {
    pub fn with_eta(eta: f64) -> Result<Self> {
        let p = Self {
            eta,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    /// `eta = 1 / (5 sqrt(B + 1))`, `p = 5 eta`.
    pub fn imperfect_hints(budget: u64) -> Self {
        let eta = 1.0 / (5.0 * ((budget + 1) as f64).sqrt());
        Self {
            eta,
            hint_prob: 5.0 * eta,
            budget,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= MAX_ETA) {
            return Err(Error::param("eta", format!("{} outside (0, {MAX_ETA}]", self.eta)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be a nonnegative finite real"));
        }
        if !(0.0..=1.0).contains(&self.hint_prob) {
            return Err(Error::param("hint_prob", "must lie in [0, 1]"));
        }
        if !(2..=4).contains(&self.probes) {
            return Err(Error::param("probes", "k must be 2, 3 or 4"));
        }
        if !(self.grad_bound > 0.0 && self.grad_bound.is_finite()) {
            return Err(Error::param("grad_bound", "must be a positive finite real"));
        }
        if !(self.hessian_bound >= 0.0 && self.hessian_bound.is_finite()) {
            return Err(Error::param("hessian_bound", "must be a nonnegative finite real"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn imperfect_hint_schedule() {
        let p = AlgoParams::imperfect_hints(0);
        assert_abs_diff_eq!(p.eta, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.hint_prob, 1.0, epsilon = 1e-15);
        let p = AlgoParams::imperfect_hints(24);
        assert_abs_diff_eq!(p.eta, 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(p.hint_prob, 0.2, epsilon = 1e-15);
        p.validate().unwrap();
    }

    #[test]
    fn eta_range_enforced() {
        assert!(AlgoParams::with_eta(0.4).is_ok());
        assert!(AlgoParams::with_eta(0.41).is_err());
        assert!(AlgoParams::with_eta(0.0).is_err());
        let bad = AlgoParams {
            probes: 5,
            ..AlgoParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
