//! Full-information policies that probe two candidates per step and play the
//! one the oracle reports as better.

pub mod convex;
pub mod hedge;
pub mod lwc;

use rand::Rng;

use crate::base::options::{OptionId, OptionSet};
use crate::error::{Error, Result};

pub use convex::{ConvexDomain, Cwc, QuadraticLoss, QuadraticSum, SolverOptions};
pub use hedge::{Hedge, HedgeState, Hwc};
pub use lwc::{action_dp_check, Btrl, DpCheck, DpFixture, Lwc, LwcImperfect};

/// What a policy did in one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Options sent to the oracle; two entries, possibly equal.
    pub probed: Vec<OptionId>,
    /// The oracle's answer, if it was consulted.
    pub hinted: Option<OptionId>,
    pub played: OptionId,
}

/// Answers "which of these is better this step" with a member of the set.
pub type ProbeOracle<'a> = dyn FnMut(&[OptionId]) -> Result<OptionId> + 'a;

pub trait LinearPolicy {
    fn options(&self) -> &OptionSet;

    fn decide<R: Rng + ?Sized>(
        &mut self,
        t: usize,
        oracle: &mut ProbeOracle<'_>,
        rng: &mut R,
    ) -> Result<Decision>;

    /// Full-information feedback for the step just decided.
    fn observe(&mut self, loss: &[f64]) -> Result<()>;
}

/// Sends `probes` to the oracle and checks the answer is one of them.
pub(crate) fn ask(oracle: &mut ProbeOracle<'_>, probes: &[OptionId]) -> Result<OptionId> {
    let answer = oracle(probes)?;
    if !probes.contains(&answer) {
        return Err(Error::ProbeContract(format!(
            "oracle answered {answer}, which was not probed"
        )));
    }
    Ok(answer)
}
