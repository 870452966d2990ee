//! Exponential weights over experts, with and without a two-sample probe.

use rand::Rng;

use super::{ask, Decision, LinearPolicy, ProbeOracle};
use crate::base::options::OptionSet;
use crate::base::params::AlgoParams;
use crate::error::{Error, Result};

/// Weights `W_i = exp(-eta L_i)`, kept as log-weights shifted so the largest
/// is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeState {
    eta: f64,
    log_w: Vec<f64>,
    probs: Vec<f64>,
}

impl HedgeState {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "need at least one expert"));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", "must be a positive finite real"));
        }
        Ok(Self::from_log_weights(eta, vec![0.0; n]))
    }

    /// Starts from arbitrary positive weights.
    pub fn with_weights(weights: &[f64], eta: f64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::param("weights", "must be positive and finite"));
        }
        Ok(Self::from_log_weights(eta, weights.iter().map(|w| w.ln()).collect()))
    }

    fn from_log_weights(eta: f64, log_w: Vec<f64>) -> Self {
        let mut s = Self {
            eta,
            probs: vec![0.0; log_w.len()],
            log_w,
        };
        s.refresh();
        s
    }

    fn refresh(&mut self) {
        let top = self.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for lw in &mut self.log_w {
            *lw -= top;
        }
        let mut total = 0.0;
        for (p, lw) in self.probs.iter_mut().zip(&self.log_w) {
            *p = lw.exp();
            total += *p;
        }
        for p in &mut self.probs {
            *p /= total;
        }
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Weights up to a common positive factor.
    pub fn weights(&self) -> Vec<f64> {
        self.log_w.iter().map(|lw| lw.exp()).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `W_i <- W_i exp(-eta l_i)`.
    pub fn update(&mut self, loss: &[f64]) -> Result<()> {
        if loss.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: loss.len(),
            });
        }
        for (lw, l) in self.log_w.iter_mut().zip(loss) {
            *lw -= self.eta * l;
        }
        self.refresh();
        Ok(())
    }

    /// Inverse-CDF draw from the current distribution.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

/// Functional form of [`HedgeState::update`].
pub fn hedge_update(state: &HedgeState, loss: &[f64]) -> Result<HedgeState> {
    let mut next = state.clone();
    next.update(loss)?;
    Ok(next)
}

fn check_experts_loss(loss: &[f64]) -> Result<()> {
    if let Some(x) = loss.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::param("loss", format!("expert loss {x} outside [0, 1]")));
    }
    Ok(())
}

/// Plain exponential weights: one draw per step, no probing.
#[derive(Debug, Clone)]
pub struct Hedge {
    options: OptionSet,
    state: HedgeState,
}

impl Hedge {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        Ok(Self {
            options: OptionSet::simplex(n)?,
            state: HedgeState::new(n, eta)?,
        })
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }
}

impl LinearPolicy for Hedge {
    fn options(&self) -> &OptionSet {
        &self.options
    }

    fn decide<R: Rng + ?Sized>(
        &mut self,
        _t: usize,
        _oracle: &mut ProbeOracle<'_>,
        rng: &mut R,
    ) -> Result<Decision> {
        let a = self.state.sample_with(rng.random::<f64>());
        Ok(Decision {
            probed: vec![a],
            hinted: None,
            played: a,
        })
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_experts_loss(loss)?;
        self.state.update(loss)
    }
}

/// Hedge with choice: two independent draws, probe both, play the better.
#[derive(Debug, Clone)]
pub struct Hwc {
    options: OptionSet,
    state: HedgeState,
}

impl Hwc {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        AlgoParams::with_eta(eta)?;
        Ok(Self {
            options: OptionSet::simplex(n)?,
            state: HedgeState::new(n, eta)?,
        })
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }
}

impl LinearPolicy for Hwc {
    fn options(&self) -> &OptionSet {
        &self.options
    }

    fn decide<R: Rng + ?Sized>(
        &mut self,
        _t: usize,
        oracle: &mut ProbeOracle<'_>,
        rng: &mut R,
    ) -> Result<Decision> {
        let a = self.state.sample_with(rng.random::<f64>());
        let b = self.state.sample_with(rng.random::<f64>());
        let w = ask(oracle, &[a, b])?;
        Ok(Decision {
            probed: vec![a, b],
            hinted: Some(w),
            played: w,
        })
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_experts_loss(loss)?;
        self.state.update(loss)
    }
}
