//! Four probes per step for correlated arms: a round-robin pair feeds mean
//! and pairwise-gain estimates, and the exploit pair is the arm with the best
//! mean estimate plus the partner with the largest estimated gain over it.

use super::meta_ucbv::pairs;
use super::{observed, BanditPolicy, FeedbackMode, Observation, Plan};
use crate::base::stats::SampleStats;
use crate::error::{Error, Result};

/// Estimates `mu_i` and `G_ji = E[(X_j - X_i)_+]` from joint pair samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n: usize,
    means: Vec<SampleStats>,
    /// Row-major `gains[j * n + i]` for `G_ji`.
    gains: Vec<SampleStats>,
}

impl GainMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            means: vec![SampleStats::default(); n],
            gains: vec![SampleStats::default(); n * n],
        }
    }

    /// Folds in one joint observation `(x_i, x_j)` of the pair.
    pub fn update(&mut self, i: usize, j: usize, xi: f64, xj: f64) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::param("pair", format!("({i}, {j}) is not a pair of distinct arms")));
        }
        self.means[i].update(xi)?;
        self.means[j].update(xj)?;
        self.gains[j * self.n + i].update((xj - xi).max(0.0))?;
        self.gains[i * self.n + j].update((xi - xj).max(0.0))?;
        Ok(())
    }

    /// `mu_hat_i`, if sampled.
    pub fn mean(&self, i: usize) -> Option<f64> {
        self.means[i].mean()
    }

    /// `G_hat_ji`, if sampled.
    pub fn gain(&self, j: usize, i: usize) -> Option<f64> {
        self.gains[j * self.n + i].mean()
    }

    pub fn mean_count(&self, i: usize) -> u64 {
        self.means[i].count()
    }

    pub fn gain_count(&self, j: usize, i: usize) -> u64 {
        self.gains[j * self.n + i].count()
    }

    /// Arm with the largest mean estimate; unsampled arms rank first, ties go
    /// to the lowest index.
    pub fn primary(&self) -> usize {
        let scores: Vec<f64> = (0..self.n)
            .map(|i| self.mean(i).unwrap_or(f64::INFINITY))
            .collect();
        super::argmax_skip(&scores, None)
    }

    /// `argmax_{j != i} G_hat_ji`, with the same conventions.
    pub fn partner(&self, i: usize) -> usize {
        let scores: Vec<f64> = (0..self.n)
            .map(|j| self.gain(j, i).unwrap_or(f64::INFINITY))
            .collect();
        super::argmax_skip(&scores, Some(i))
    }
}

#[derive(Debug, Clone)]
pub struct CorrExploit {
    pairs: Vec<(usize, usize)>,
    gains: GainMatrix,
    last_primary: usize,
}

impl CorrExploit {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "need at least 2 arms"));
        }
        Ok(Self {
            pairs: pairs(n),
            gains: GainMatrix::new(n),
            last_primary: 0,
        })
    }

    pub fn gains(&self) -> &GainMatrix {
        &self.gains
    }

    /// Exploration pair for step `t`, cycling lexicographically.
    pub fn explore_pair(&self, t: usize) -> (usize, usize) {
        self.pairs[(t - 1) % self.pairs.len()]
    }

    /// Primary arm chosen by the latest [`plan`](BanditPolicy::plan).
    pub fn last_primary(&self) -> usize {
        self.last_primary
    }
}

impl BanditPolicy for CorrExploit {
    fn arms(&self) -> usize {
        self.gains.n
    }

    fn mode(&self) -> FeedbackMode {
        FeedbackMode::AllProbe
    }

    fn plan(&mut self, t: usize) -> Plan {
        let primary = self.gains.primary();
        let partner = self.gains.partner(primary);
        self.last_primary = primary;
        let (i, j) = self.explore_pair(t);
        Plan {
            exploit: vec![primary, partner],
            explore: vec![i, j],
        }
    }

    fn observe(&mut self, _t: usize, plan: &Plan, obs: &Observation) -> Result<()> {
        let (i, j) = (plan.explore[0], plan.explore[1]);
        let (xi, xj) = (observed(obs, i)?, observed(obs, j)?);
        self.gains.update(i, j, xi, xj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::all_probe;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gain_update_example() {
        let mut g = GainMatrix::new(3);
        g.update(0, 1, 0.3, 0.8).unwrap();
        assert_abs_diff_eq!(g.gain(1, 0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(g.gain(0, 1), Some(0.0));
        assert_eq!(g.gain(2, 0), None);
        assert!(g.update(1, 1, 0.0, 0.0).is_err());
    }

    #[test]
    fn comonotone_gain_is_zero() {
        let mut g = GainMatrix::new(2);
        for x in [0.1, 0.7, 0.3] {
            g.update(0, 1, x, x).unwrap();
        }
        assert_eq!(g.gain(1, 0), Some(0.0));
        assert_eq!(g.gain(0, 1), Some(0.0));
    }

    #[test]
    fn primary_and_partner() {
        let mut g = GainMatrix::new(3);
        g.update(0, 1, 0.9, 0.1).unwrap();
        g.update(0, 2, 0.9, 0.95).unwrap();
        g.update(1, 2, 0.1, 0.1).unwrap();
        assert_eq!(g.primary(), 0);
        // G_10 = 0 < G_20 = 0.05
        assert_eq!(g.partner(0), 2);
    }

    #[test]
    fn pairs_cycle_lexicographically() {
        let mut p = CorrExploit::new(4).unwrap();
        let rewards = [0.2, 0.4, 0.6, 0.8];
        let mut seen = Vec::new();
        for t in 1..=12 {
            let plan = p.plan(t);
            seen.push((plan.explore[0], plan.explore[1]));
            let obs = Observation {
                feedback: all_probe(&rewards, &plan.probes()).unwrap(),
                played: plan.exploit[0],
                reward: 0.0,
            };
            p.observe(t, &plan, &obs).unwrap();
        }
        assert_eq!(&seen[..6], &pairs(4)[..]);
        assert_eq!(&seen[6..], &pairs(4)[..]);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(p.gains().gain_count(j, i), 2);
                }
            }
        }
        assert_eq!(p.plan(13).exploit[0], 3);
    }
}
