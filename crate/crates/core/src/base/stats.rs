//! Running sample statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Count, sample mean and biased (divide-by-count) sample variance of the
/// observations of one arm or meta-arm, maintained with Welford's update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl SampleStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `None` until the first observation.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    pub fn variance(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.m2 / self.count as f64).max(0.0))
    }

    /// Adds an observation from the [0, 1] reward range.
    pub fn update(&mut self, observation: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&observation) {
            return Err(Error::ObservationOutOfRange(observation));
        }
        self.push(observation);
        Ok(())
    }

    #[inline]
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }
}

/// Functional form of [`SampleStats::update`].
pub fn update_stats(stats: SampleStats, observation: f64) -> Result<SampleStats> {
    let mut next = stats;
    next.update(observation)?;
    Ok(next)
}

/// Unbounded running moments with an order-fixed merge, used to aggregate
/// replications.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn of(x: f64) -> Self {
        Self {
            count: 1,
            mean: x,
            m2: 0.0,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Self { count, mean, m2 }
    }

    /// Pairwise (tree) reduction in slice order.
    pub fn from_slice(xs: &[f64]) -> Self {
        match xs.len() {
            0 => Self::default(),
            1 => Self::of(xs[0]),
            n => {
                let (a, b) = xs.split_at(n / 2);
                Self::from_slice(a).merge(Self::from_slice(b))
            }
        }
    }

    /// Unbiased sample standard deviation; zero with fewer than two samples.
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0).sqrt()
        }
    }

    pub fn std_err(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.std_dev() / (self.count as f64).sqrt()
        }
    }
}
