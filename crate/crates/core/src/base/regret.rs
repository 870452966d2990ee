//! Regret accounting recomputed from stored traces.

use super::options::{dot, CumulativeLoss, OptionSet};
use super::trace::{Choice, Trace};
use crate::error::{Error, Result};

fn choice_loss(options: &OptionSet, choice: &Choice, loss: &[f64]) -> Result<f64> {
    match choice {
        Choice::Index(id) => {
            if options.len().is_some_and(|n| *id >= n) {
                return Err(Error::param("played", format!("option {id} out of range")));
            }
            Ok(options.inner(*id, loss))
        }
        Choice::Point(p) => {
            if p.len() != loss.len() {
                return Err(Error::DimensionMismatch {
                    expected: loss.len(),
                    got: p.len(),
                });
            }
            Ok(dot(p, loss))
        }
    }
}

/// `sum_t <l^t, w^t> - min_w <L^T, w>`.
pub fn regret_linear(trace: &Trace, options: &OptionSet, losses: &[Vec<f64>]) -> Result<f64> {
    if trace.len() != losses.len() {
        return Err(Error::LengthMismatch {
            expected: losses.len(),
            got: trace.len(),
        });
    }
    let mut total = CumulativeLoss::zeros(options.dim());
    let mut incurred = 0.0;
    for (step, loss) in trace.steps.iter().zip(losses) {
        incurred += choice_loss(options, &step.played, loss)?;
        total.add(loss)?;
    }
    let best = options.argmin(total.as_slice())?;
    Ok(incurred - options.inner(best, total.as_slice()))
}

/// `T max_i mu_i - sum_t E[reward_t | probed set]`, using the recorded exact
/// expectation when present, the played arm's mean for single-arm plays, and
/// the realized reward otherwise.
pub fn pseudo_regret_mab(trace: &Trace, means: &[f64]) -> Result<f64> {
    if let Some(n) = trace.arms {
        if n != means.len() {
            return Err(Error::LengthMismatch {
                expected: n,
                got: means.len(),
            });
        }
    }
    if means.is_empty() {
        return Err(Error::param("means", "no arms"));
    }
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut regret = 0.0;
    for step in &trace.steps {
        let gained = match (step.expected, step.probed.as_slice()) {
            (Some(e), _) => e,
            (None, [Choice::Index(i)]) => *means
                .get(*i)
                .ok_or_else(|| Error::param("probed", format!("arm {i} out of range")))?,
            _ => step.value,
        };
        regret += best - gained;
    }
    Ok(regret)
}
