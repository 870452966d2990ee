//! Randomized sweeps of the reverse prophet inequalities, checked by exact
//! enumeration on generated instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::{DiscreteDistribution, JointDistribution};
use super::exact::{
    dp_ratio, expect_max, expect_min_two_iid, expect_mixed_min, gain_exact, pair_summaries,
};
use crate::error::{Error, Result};

/// Floating-point slack on every exact comparison.
pub const SLACK: f64 = 1e-12;

/// Largest support generated for random distributions.
pub const MAX_SUPPORT: usize = 6;

/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen; negative beyond the slack means a violation.
    pub min_margin: f64,
    /// First violating instance, serialized for replay.
    pub first_failure: Option<serde_json::Value>,
}

impl SweepOutcome {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            instances: 0,
            violations: 0,
            min_margin: f64::INFINITY,
            first_failure: None,
        }
    }

    fn check(&mut self, lhs: f64, rhs: f64, instance: impl FnOnce() -> serde_json::Value) {
        self.instances += 1;
        let margin = rhs - lhs;
        self.min_margin = self.min_margin.min(margin);
        if margin < -SLACK {
            self.violations += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(instance());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random law with support size in `1..=MAX_SUPPORT` on `[lo, hi]`. Values
/// are drawn on a coarse grid half the time so ties and shared atoms occur.
pub fn random_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    lo: f64,
    hi: f64,
) -> DiscreteDistribution {
    let k = rng.random_range(1..=MAX_SUPPORT);
    let grid = rng.random_bool(0.5);
    let values: Vec<f64> = (0..k)
        .map(|_| {
            if grid {
                lo + (hi - lo) * rng.random_range(0..=10) as f64 / 10.0
            } else {
                rng.random_range(lo..=hi)
            }
        })
        .collect();
    let weights = random_weights(rng, k);
    DiscreteDistribution::new(values.into_iter().zip(weights)).expect("normalized weights")
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    normalize(w)
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// A pair `(D1, D2)` on a common support with `dp_ratio(D1, D2) <= eta`:
/// `P1(w) ∝ P2(w) e^{u_w eta}` with `u_w` uniform on `[-1, 1]`, redrawn until
/// the renormalized ratio stays within `eta`.
pub fn random_dp_pair<R: Rng + ?Sized>(
    rng: &mut R,
    eta: f64,
    lo: f64,
    hi: f64,
) -> (DiscreteDistribution, DiscreteDistribution) {
    loop {
        let k = rng.random_range(1..=MAX_SUPPORT);
        let mut values: Vec<f64> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let p2 = random_weights(rng, values.len());
        let p1 = normalize(
            p2.iter()
                .map(|p| p * (rng.random_range(-1.0..=1.0) * eta).exp())
                .collect(),
        );
        let d1 = DiscreteDistribution::new(values.iter().copied().zip(p1)).expect("normalized");
        let d2 = DiscreteDistribution::new(values.iter().copied().zip(p2)).expect("normalized");
        if dp_ratio(&d1, &d2).is_ok_and(|r| r <= eta) {
            return (d1, d2);
        }
    }
}

fn pair_json(d1: &DiscreteDistribution, d2: &DiscreteDistribution, extra: serde_json::Value) -> serde_json::Value {
    serde_json::json!({ "d1": d1.to_literal(), "d2": d2.to_literal(), "params": extra })
}

/// `E[min(A, B)] <= E[C]` for `A, B ~ D1` i.i.d. and `C ~ D2`, over pairs
/// that are `eta`-close in ratio.
pub fn sweep_min_two<R: Rng + ?Sized>(rng: &mut R, eta: f64, instances: usize) -> SweepOutcome {
    let mut out = SweepOutcome::new(format!("min-of-two eta={eta}"));
    for _ in 0..instances {
        let (d1, d2) = random_dp_pair(rng, eta, -1.0, 1.0);
        out.check(expect_min_two_iid(&d1), d2.mean(), || {
            pair_json(&d1, &d2, serde_json::json!({ "eta": eta }))
        });
    }
    out
}

/// `(1 - p) E[A] + p E[min(A, B)] <= E[C]` for pairs `eta`-close with
/// `eta < p / 4`; `eta` is drawn uniformly below `p / 4`.
pub fn sweep_mixed_min<R: Rng + ?Sized>(rng: &mut R, p: f64, instances: usize) -> SweepOutcome {
    let mut out = SweepOutcome::new(format!("mixed-min p={p}"));
    for _ in 0..instances {
        let eta = rng.random_range(0.0..p / 4.0).max(1e-6);
        let (d1, d2) = random_dp_pair(rng, eta, -1.0, 1.0);
        let lhs = expect_mixed_min(&d1, p).expect("p in range");
        out.check(lhs, d2.mean(), || {
            pair_json(&d1, &d2, serde_json::json!({ "eta": eta, "p": p }))
        });
    }
    out
}

/// `E[max(X, Y)] >= mu_X + sigma_X^2 / 2` for independent `X, Y` on `[0, 1]`
/// with `mu_Y >= mu_X`.
pub fn sweep_max_pair<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SweepOutcome {
    let mut out = SweepOutcome::new("max-of-pair");
    for _ in 0..instances {
        let mut x = random_distribution(rng, 0.0, 1.0);
        let mut y = random_distribution(rng, 0.0, 1.0);
        if y.mean() < x.mean() {
            std::mem::swap(&mut x, &mut y);
        }
        let lhs = x.mean() + x.variance() / 2.0;
        let rhs = expect_max(&x, &y, None).expect("independent");
        out.check(lhs, rhs, || pair_json(&x, &y, serde_json::Value::Null));
    }
    out
}

/// `M* - mu_ij >= sigma_ij^2 / 4` for every pair with `mu_ij < mu*`, over
/// independent instances with 2 to 5 arms. Each instance counts once.
pub fn sweep_pair_gap<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SweepOutcome {
    let mut out = SweepOutcome::new("pair-gap");
    for _ in 0..instances {
        let n = rng.random_range(2..=5);
        let arms: Vec<_> = (0..n).map(|_| random_distribution(rng, 0.0, 1.0)).collect();
        let joint = JointDistribution::independent(&arms).expect("product law");
        let pairs = pair_summaries(&joint).expect("valid joint");
        let mu_star = arms.iter().map(|a| a.mean()).fold(f64::NEG_INFINITY, f64::max);
        let m_star = pairs.iter().map(|p| p.mean).fold(f64::NEG_INFINITY, f64::max);
        // worst slack over the qualifying pairs; a pair whose max equals the
        // best arm up to rounding does not qualify
        let worst = pairs
            .iter()
            .filter(|p| p.mean < mu_star - SLACK)
            .map(|p| (m_star - p.mean) - p.variance / 4.0)
            .fold(f64::INFINITY, f64::min);
        let worst = if worst.is_finite() { worst } else { 0.0 };
        out.check(0.0, worst, || {
            serde_json::json!({ "arms": arms.iter().map(|a| a.to_literal()).collect::<Vec<_>>() })
        });
    }
    out
}

/// Random joint law of two coordinates on `[0, 1]`.
pub fn random_joint_pair<R: Rng + ?Sized>(rng: &mut R) -> JointDistribution {
    let k = rng.random_range(1..=MAX_SUPPORT * 2);
    let w = random_weights(rng, k);
    let atoms = w.into_iter().map(|p| {
        let v = if rng.random_bool(0.5) {
            vec![rng.random_range(0..=4) as f64 / 4.0, rng.random_range(0..=4) as f64 / 4.0]
        } else {
            vec![rng.random::<f64>(), rng.random::<f64>()]
        };
        (v, p)
    });
    JointDistribution::new(atoms).expect("normalized")
}

/// `E[max(X_i, X_j)] = E[X_i] + G_ji` on arbitrary joints, checked both ways.
pub fn sweep_gain_identity<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SweepOutcome {
    let mut out = SweepOutcome::new("max-equals-mean-plus-gain");
    for _ in 0..instances {
        let joint = random_joint_pair(rng);
        let xi = joint.marginal(0).expect("dim 2");
        let xj = joint.marginal(1).expect("dim 2");
        let swapped = joint.pair(1, 0).expect("dim 2");
        let lhs = expect_max(&xi, &xj, Some(&joint)).expect("consistent marginals");
        let rhs = xi.mean() + gain_exact(&xj, &xi, Some(&swapped)).expect("consistent marginals");
        let gap = (lhs - rhs).abs();
        out.check(gap, 0.0, || serde_json::to_value(&joint).unwrap_or_default());
    }
    out
}

/// The total-variation-only counterexample: `D1` is a point mass at `d`, `D2`
/// is `d` with probability `1 - eta` and 0 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub d: f64,
    pub eta: f64,
    pub expect_min: f64,
    pub expect_c: f64,
    /// Whether the ratio check rejected the pair as outside the hypothesis.
    pub hypothesis_violated: bool,
}

pub fn counterexample(d: f64, eta: f64) -> Result<Counterexample> {
    if !(d > 0.0 && d.is_finite()) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("counterexample", "need d > 0 and eta in (0, 1)"));
    }
    let d1 = DiscreteDistribution::point(d);
    let d2 = DiscreteDistribution::new([(0.0, eta), (d, 1.0 - eta)])?;
    let hypothesis_violated = matches!(dp_ratio(&d1, &d2), Err(Error::UndefinedRatio { .. }));
    Ok(Counterexample {
        d,
        eta,
        expect_min: expect_min_two_iid(&d1),
        expect_c: d2.mean(),
        hypothesis_violated,
    })
}
