//! Monte-Carlo frequencies of sample-mean and sample-variance deviations,
//! with the exponential bounds they are checked against.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::DiscreteDistribution;
use crate::base::stats::SampleStats;
use crate::error::{Error, Result};

/// Smallest deviation multiplier the mean and upper-variance bounds cover.
pub const MIN_Q: f64 = 1.0 / 18.0;

/// Fewest trials accepted by the estimators.
pub const MIN_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailEvent {
    /// `|m - mu| > q sigma^2`
    MeanDev,
    /// `V > (1 + q) sigma^2`
    VarUpper,
    /// `V < 0.65 sigma^2`
    VarLower,
}

impl TailEvent {
    pub const ALL: [TailEvent; 3] = [TailEvent::MeanDev, TailEvent::VarUpper, TailEvent::VarLower];

    fn uses_q(self) -> bool {
        !matches!(self, TailEvent::VarLower)
    }

    fn occurs(self, stats: &SampleStats, mu: f64, sigma2: f64, q: f64) -> bool {
        let m = stats.mean().unwrap_or(mu);
        let v = stats.variance().unwrap_or(0.0);
        match self {
            TailEvent::MeanDev => (m - mu).abs() > q * sigma2,
            TailEvent::VarUpper => v > (1.0 + q) * sigma2,
            TailEvent::VarLower => v < 0.65 * sigma2,
        }
    }
}

/// `3 exp(-q sigma^2 s / 23)` for the first two events, `3 exp(-0.01 sigma^2 s)`
/// for the lower variance event.
pub fn tail_bound(event: TailEvent, sigma2: f64, s: usize, q: f64) -> f64 {
    let s = s as f64;
    match event {
        TailEvent::MeanDev | TailEvent::VarUpper => 3.0 * (-q * sigma2 * s / 23.0).exp(),
        TailEvent::VarLower => 3.0 * (-0.01 * sigma2 * s).exp(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub event: TailEvent,
    pub s: usize,
    pub q: f64,
    pub trials: usize,
    pub rate: f64,
    /// Monte-Carlo standard error `sqrt(rate (1 - rate) / trials)`.
    pub stderr: f64,
    pub bound: f64,
}

impl TailEstimate {
    /// `rate <= bound + 3 stderr`.
    pub fn within_bound(&self) -> bool {
        self.rate <= self.bound + 3.0 * self.stderr
    }
}

fn check_args(event: TailEvent, q: f64, s: usize, trials: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::param("s", "need at least one sample"));
    }
    if trials < MIN_TRIALS {
        return Err(Error::param("trials", format!("need at least {MIN_TRIALS}")));
    }
    if event.uses_q() && !(q >= MIN_Q && q.is_finite()) {
        return Err(Error::param("q", format!("{q} below 1/18")));
    }
    Ok(())
}

fn check_support(d: &DiscreteDistribution) -> Result<()> {
    if !d.support_within(0.0, 1.0) {
        return Err(Error::InvalidDistribution("support must lie in [0, 1]".into()));
    }
    Ok(())
}

fn sample_stats<R: Rng + ?Sized>(d: &DiscreteDistribution, s: usize, rng: &mut R) -> SampleStats {
    let mut st = SampleStats::default();
    for _ in 0..s {
        st.push(d.sample_with(rng.random::<f64>()));
    }
    st
}

/// Frequency of `event` over `trials` independent experiments of `s` draws.
pub fn tail_violation_rate<R: Rng + ?Sized>(
    d: &DiscreteDistribution,
    s: usize,
    event: TailEvent,
    q: f64,
    trials: usize,
    rng: &mut R,
) -> Result<TailEstimate> {
    Ok(tail_violation_rates(d, s, &[(event, q)], trials, rng)?.remove(0))
}

/// Several events over the same experiments; one estimate per `(event, q)`.
pub fn tail_violation_rates<R: Rng + ?Sized>(
    d: &DiscreteDistribution,
    s: usize,
    events: &[(TailEvent, f64)],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<TailEstimate>> {
    check_support(d)?;
    for &(e, q) in events {
        check_args(e, q, s, trials)?;
    }
    let (mu, sigma2) = (d.mean(), d.variance());
    let mut hits = vec![0usize; events.len()];
    for _ in 0..trials {
        let st = sample_stats(d, s, rng);
        for (h, &(e, q)) in hits.iter_mut().zip(events) {
            if e.occurs(&st, mu, sigma2, q) {
                *h += 1;
            }
        }
    }
    Ok(events
        .iter()
        .zip(hits)
        .map(|(&(event, q), h)| {
            let rate = h as f64 / trials as f64;
            TailEstimate {
                event,
                s,
                q,
                trials,
                rate,
                stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
                bound: tail_bound(event, sigma2, s, q),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bound_values() {
        assert_abs_diff_eq!(
            tail_bound(TailEvent::MeanDev, 0.25, 200, 1.0),
            3.0 * (-50.0f64 / 23.0).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            tail_bound(TailEvent::VarLower, 0.25, 2000, 1.0),
            3.0 * (-5.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn point_mass_never_violates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = DiscreteDistribution::point(0.7);
        let events: Vec<_> = TailEvent::ALL.iter().map(|e| (*e, 1.0)).collect();
        for est in tail_violation_rates(&d, 50, &events, MIN_TRIALS, &mut rng).unwrap() {
            assert_eq!(est.rate, 0.0, "{:?}", est.event);
        }
    }

    #[test]
    fn bernoulli_mean_deviation_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = DiscreteDistribution::bernoulli(0.5).unwrap();
        let est = tail_violation_rate(&d, 200, TailEvent::MeanDev, 1.0, MIN_TRIALS, &mut rng)
            .unwrap();
        assert!(est.within_bound(), "{est:?}");
        assert_abs_diff_eq!(est.bound, 0.3417, epsilon = 1e-3);
    }

    #[test]
    fn argument_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = DiscreteDistribution::bernoulli(0.5).unwrap();
        assert!(tail_violation_rate(&d, 10, TailEvent::MeanDev, 0.01, MIN_TRIALS, &mut rng).is_err());
        assert!(tail_violation_rate(&d, 10, TailEvent::MeanDev, 1.0, 10, &mut rng).is_err());
        assert!(tail_violation_rate(&d, 0, TailEvent::VarLower, 0.0, MIN_TRIALS, &mut rng).is_err());
        let wide = DiscreteDistribution::new([(2.0, 1.0)]).unwrap();
        assert!(tail_violation_rate(&wide, 10, TailEvent::VarLower, 0.0, MIN_TRIALS, &mut rng).is_err());
    }
}
