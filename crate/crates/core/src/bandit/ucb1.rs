//! Baseline: probe the two arms with the highest UCB1 scores and play the
//! better. Every probed value is observed.

use super::{observed, BanditPolicy, FeedbackMode, Observation, Plan};
use crate::base::stats::SampleStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Ucb1TopTwo {
    stats: Vec<SampleStats>,
    scores: Vec<f64>,
}

impl Ucb1TopTwo {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "need at least 2 arms"));
        }
        Ok(Self {
            stats: vec![SampleStats::default(); n],
            scores: vec![0.0; n],
        })
    }
}

impl BanditPolicy for Ucb1TopTwo {
    fn arms(&self) -> usize {
        self.stats.len()
    }

    fn mode(&self) -> FeedbackMode {
        FeedbackMode::AllProbe
    }

    fn plan(&mut self, t: usize) -> Plan {
        let lt = (t.max(1) as f64).ln();
        for (s, st) in self.scores.iter_mut().zip(&self.stats) {
            *s = match st.mean() {
                Some(m) => m + (2.0 * lt / st.count() as f64).sqrt(),
                None => f64::INFINITY,
            };
        }
        let a = super::argmax_skip(&self.scores, None);
        let b = super::argmax_skip(&self.scores, Some(a));
        Plan {
            exploit: vec![a.min(b), a.max(b)],
            explore: Vec::new(),
        }
    }

    fn observe(&mut self, _t: usize, plan: &Plan, obs: &Observation) -> Result<()> {
        for &arm in &plan.exploit {
            let x = observed(obs, arm)?;
            self.stats[arm].update(x)?;
        }
        if plan.exploit.is_empty() {
            return Err(Error::ProbeContract("empty plan".into()));
        }
        Ok(())
    }
}
