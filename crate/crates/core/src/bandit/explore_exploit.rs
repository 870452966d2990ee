//! Three probes per step: one round-robin exploration probe that feeds the
//! statistics, and the two arms with the highest optimistic index.

use super::{observed, BanditPolicy, FeedbackMode, Observation, Plan};
use crate::base::params::DEFAULT_EPSILON;
use crate::base::stats::SampleStats;
use crate::error::{Error, Result};

/// `m + eps V`.
pub fn allprobe_index(m: f64, v: f64, epsilon: f64) -> f64 {
    m + epsilon * v
}

#[derive(Debug, Clone)]
pub struct ExploreExploit {
    epsilon: f64,
    stats: Vec<SampleStats>,
    scores: Vec<f64>,
}

impl ExploreExploit {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "need at least 2 arms"));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be nonnegative and finite"));
        }
        Ok(Self {
            epsilon,
            stats: vec![SampleStats::default(); n],
            scores: vec![0.0; n],
        })
    }

    pub fn with_default_epsilon(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_EPSILON)
    }

    pub fn stats(&self) -> &[SampleStats] {
        &self.stats
    }

    /// Exploration arm for step `t`.
    pub fn explore_arm(&self, t: usize) -> usize {
        (t - 1) % self.stats.len()
    }

    /// Two arms with the largest index; ties go to lower indices.
    pub fn top_two(&mut self) -> (usize, usize) {
        for (s, st) in self.scores.iter_mut().zip(&self.stats) {
            *s = match (st.mean(), st.variance()) {
                (Some(m), Some(v)) => allprobe_index(m, v, self.epsilon),
                _ => f64::INFINITY,
            };
        }
        let first = super::argmax_skip(&self.scores, None);
        let second = super::argmax_skip(&self.scores, Some(first));
        (first.min(second), first.max(second))
    }
}

impl BanditPolicy for ExploreExploit {
    fn arms(&self) -> usize {
        self.stats.len()
    }

    fn mode(&self) -> FeedbackMode {
        FeedbackMode::AllProbe
    }

    fn plan(&mut self, t: usize) -> Plan {
        let (a, b) = self.top_two();
        Plan {
            exploit: vec![a, b],
            explore: vec![self.explore_arm(t)],
        }
    }

    fn observe(&mut self, _t: usize, plan: &Plan, obs: &Observation) -> Result<()> {
        let arm = plan.explore[0];
        let x = observed(obs, arm)?;
        self.stats[arm].update(x)
    }
}
