//! Stochastic bandit policies that probe several arms per step.

pub mod corr;
pub mod explore_exploit;
pub mod meta_ucbv;
pub mod ucb1;

use serde::{Deserialize, Serialize};

use crate::env::ProbeFeedback;
use crate::error::Result;

pub use corr::{CorrExploit, GainMatrix};
pub use explore_exploit::{allprobe_index, ExploreExploit};
pub use meta_ucbv::{pair_count, pairs, ucbv_index, MetaUcbv};
pub use ucb1::Ucb1TopTwo;

/// Which probe oracle a policy runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackMode {
    /// Only the identity of the best exploit probe; the played arm's reward
    /// is then observed.
    BestProbe,
    /// Realized values of every probe.
    AllProbe,
}

/// Probes for one step. The best exploit probe is played; explore probes
/// only feed statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub exploit: Vec<usize>,
    pub explore: Vec<usize>,
}

impl Plan {
    /// Exploit probes followed by explore probes.
    pub fn probes(&self) -> Vec<usize> {
        self.exploit.iter().chain(&self.explore).copied().collect()
    }
}

/// What the policy learns at the end of a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub feedback: ProbeFeedback,
    pub played: usize,
    pub reward: f64,
}

pub trait BanditPolicy {
    fn arms(&self) -> usize;

    fn mode(&self) -> FeedbackMode;

    fn plan(&mut self, t: usize) -> Plan;

    fn observe(&mut self, t: usize, plan: &Plan, obs: &Observation) -> Result<()>;
}

/// Highest score; ties go to the lowest index. NaN never wins.
pub(crate) fn argmax_skip(scores: &[f64], skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in scores.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if best == usize::MAX || v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Looks up a probed arm's value in all-values feedback.
pub(crate) fn observed(obs: &Observation, arm: usize) -> Result<f64> {
    obs.feedback.value_of(arm).ok_or_else(|| {
        crate::error::Error::ProbeContract(format!("no value reported for probed arm {arm}"))
    })
}
