//! Probe oracles: which option in a probed set is best, or all probed values.

use serde::{Deserialize, Serialize};

use super::adversarial::CorruptionSchedule;
use crate::error::{Error, Result};

/// Most probes any policy issues in one step.
pub const MAX_PROBES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFeedback {
    /// Identity of the best probed option; no values revealed.
    Best(usize),
    /// `(option, realized value)` for every probed option, in probe order.
    AllValues(Vec<(usize, f64)>),
}

impl ProbeFeedback {
    pub fn best(&self) -> Option<usize> {
        match self {
            ProbeFeedback::Best(i) => Some(*i),
            ProbeFeedback::AllValues(_) => None,
        }
    }

    pub fn value_of(&self, option: usize) -> Option<f64> {
        match self {
            ProbeFeedback::AllValues(vs) => vs.iter().find(|(i, _)| *i == option).map(|p| p.1),
            ProbeFeedback::Best(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    MaxReward,
    MinLoss,
}

impl Direction {
    #[inline]
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::MaxReward => a > b,
            Direction::MinLoss => a < b,
        }
    }
}

/// Best candidate among `(option, value)` pairs; ties go to the lowest option.
pub fn best_of(candidates: &[(usize, f64)], direction: Direction) -> Result<usize> {
    let Some(&(mut best, mut best_v)) = candidates.first() else {
        return Err(Error::ProbeContract("empty probe set".into()));
    };
    for &(i, v) in &candidates[1..] {
        if direction.better(v, best_v) || (v == best_v && i < best) {
            best = i;
            best_v = v;
        }
    }
    Ok(best)
}

fn check_set(values: &[f64], set: &[usize]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::ProbeContract("empty probe set".into()));
    }
    if set.len() > MAX_PROBES {
        return Err(Error::ProbeContract(format!(
            "{} probes exceed the limit of {MAX_PROBES}",
            set.len()
        )));
    }
    if let Some(i) = set.iter().find(|i| **i >= values.len()) {
        return Err(Error::ProbeContract(format!("probe index {i} out of range")));
    }
    Ok(())
}

/// Index in `set` with the best realized value.
pub fn best_probe(values: &[f64], set: &[usize], direction: Direction) -> Result<ProbeFeedback> {
    check_set(values, set)?;
    let cands: Vec<(usize, f64)> = set.iter().map(|&i| (i, values[i])).collect();
    best_of(&cands, direction).map(ProbeFeedback::Best)
}

/// Like [`best_probe`], but on corrupted steps answers with the other member
/// of a two-element set, including on ties.
pub fn best_probe_corrupted(
    values: &[f64],
    set: &[usize],
    direction: Direction,
    schedule: &CorruptionSchedule,
    t: usize,
) -> Result<ProbeFeedback> {
    let honest = best_probe(values, set, direction)?;
    if !schedule.is_corrupted(t) {
        return Ok(honest);
    }
    if set.len() != 2 {
        return Err(Error::ProbeContract(format!(
            "corruption needs exactly two probes, got {}",
            set.len()
        )));
    }
    let winner = honest.best().expect("best-index feedback");
    Ok(ProbeFeedback::Best(flip(set, winner)))
}

/// The member of a two-element set that is not `winner`; a degenerate set
/// `{a, a}` has only `a` to offer.
pub(crate) fn flip(set: &[usize], winner: usize) -> usize {
    if set[0] == winner {
        set[1]
    } else {
        set[0]
    }
}

pub fn all_probe(values: &[f64], set: &[usize]) -> Result<ProbeFeedback> {
    check_set(values, set)?;
    Ok(ProbeFeedback::AllValues(
        set.iter().map(|&i| (i, values[i])).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_probe_examples() {
        let r = [0.0, 0.3, 0.7, 0.1];
        assert_eq!(
            best_probe(&r, &[1, 2], Direction::MaxReward).unwrap(),
            ProbeFeedback::Best(2)
        );
        let tie = [0.0, 0.5, 0.5];
        assert_eq!(
            best_probe(&tie, &[2, 1], Direction::MaxReward).unwrap(),
            ProbeFeedback::Best(1)
        );
        assert_eq!(
            best_probe(&r, &[3], Direction::MaxReward).unwrap(),
            ProbeFeedback::Best(3)
        );
        assert_eq!(
            best_probe(&r, &[1, 2], Direction::MinLoss).unwrap(),
            ProbeFeedback::Best(1)
        );
    }

    #[test]
    fn best_probe_contract() {
        let r = [0.1, 0.2];
        assert!(best_probe(&r, &[], Direction::MaxReward).is_err());
        assert!(best_probe(&r, &[2], Direction::MaxReward).is_err());
        assert!(best_probe(&[0.0; 6], &[0, 1, 2, 3, 4], Direction::MaxReward).is_err());
    }

    #[test]
    fn corruption_flips_the_answer() {
        let sched = CorruptionSchedule::from_steps(1, vec![2]).unwrap();
        let losses = [0.2, 0.8];
        let honest = best_probe_corrupted(&losses, &[0, 1], Direction::MinLoss, &sched, 1).unwrap();
        assert_eq!(honest, ProbeFeedback::Best(0));
        let lied = best_probe_corrupted(&losses, &[0, 1], Direction::MinLoss, &sched, 2).unwrap();
        assert_eq!(lied, ProbeFeedback::Best(1));
        let tie = [0.5, 0.5];
        let lied = best_probe_corrupted(&tie, &[0, 1], Direction::MinLoss, &sched, 2).unwrap();
        assert_eq!(lied, ProbeFeedback::Best(1));
        assert!(best_probe_corrupted(&[0.1, 0.2, 0.3], &[0, 1, 2], Direction::MinLoss, &sched, 2)
            .is_err());
    }

    #[test]
    fn all_probe_examples() {
        let r = [0.1, 0.5, 0.9];
        let fb = all_probe(&r, &[0, 2]).unwrap();
        assert_eq!(fb, ProbeFeedback::AllValues(vec![(0, 0.1), (2, 0.9)]));
        assert_eq!(fb.value_of(2), Some(0.9));
        assert_eq!(fb.value_of(1), None);
        let full = all_probe(&r, &[0, 1, 2]).unwrap();
        assert_eq!(full, ProbeFeedback::AllValues(vec![(0, 0.1), (1, 0.5), (2, 0.9)]));
        assert_eq!(all_probe(&r, &[0, 2]).unwrap(), fb);
    }
}
