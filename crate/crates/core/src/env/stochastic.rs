//! Stochastic reward environments: independent arms, arbitrary joint laws and
//! the correlated three-arm instance that defeats pair-gain estimation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::dist::{DiscreteDistribution, JointDistribution};
use crate::oracle::exact::max_distribution;

/// Reward model of an arm set.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmLaw {
    Independent(Vec<DiscreteDistribution>),
    Joint(JointDistribution),
    Tight(TightInstance),
}

/// Arm 0 is `X` uniform on {1/3, 2/3}; arm 1 is `Y = X + A`; arm 2 is
/// `Z = X + B`; arms 3.. are constant 0. One uniform `u` couples the bumps:
/// `A = 1/3` iff `u < 3 delta`, `B = 1/3` iff `u < 3 delta (1 - sqrt(delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightInstance {
    pub n: usize,
    pub delta: f64,
}

impl TightInstance {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("n", "tight instance needs at least 3 arms"));
        }
        if !(delta > 0.0 && delta <= 1.0 / 9.0) {
            return Err(Error::param("delta", format!("{delta} outside (0, 1/9]")));
        }
        Ok(Self { n, delta })
    }

    fn p_a(&self) -> f64 {
        3.0 * self.delta
    }

    fn p_b(&self) -> f64 {
        3.0 * self.delta * (1.0 - self.delta.sqrt())
    }

    pub fn means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n];
        m[0] = 0.5;
        m[1] = 0.5 + self.delta;
        m[2] = 0.5 + self.delta * (1.0 - self.delta.sqrt());
        m
    }

    /// Joint law of all arms, for exact expectations.
    pub fn joint(&self) -> JointDistribution {
        let (pa, pb) = (self.p_a(), self.p_b());
        let mut atoms = Vec::with_capacity(6);
        for x in [1.0 / 3.0, 2.0 / 3.0] {
            for (a, b, p) in [(1.0 / 3.0, 1.0 / 3.0, pb), (1.0 / 3.0, 0.0, pa - pb), (0.0, 0.0, 1.0 - pa)] {
                let mut o = vec![0.0; self.n];
                o[0] = x;
                o[1] = x + a;
                o[2] = x + b;
                atoms.push((o, 0.5 * p));
            }
        }
        JointDistribution::new(atoms).expect("tight instance atoms are a distribution")
    }

    fn realize(&self, u_x: f64, u: f64, out: &mut [f64]) {
        let x = if u_x < 0.5 { 1.0 / 3.0 } else { 2.0 / 3.0 };
        let a = if u < self.p_a() { 1.0 / 3.0 } else { 0.0 };
        let b = if u < self.p_b() { 1.0 / 3.0 } else { 0.0 };
        out.fill(0.0);
        out[0] = x;
        out[1] = x + a;
        out[2] = x + b;
    }
}

/// `n` arms with rewards in [0, 1], drawn i.i.d. across steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticEnv {
    law: ArmLaw,
    means: Vec<f64>,
    /// `E[max(X_i, X_j)]`, row-major `n x n`; the diagonal holds the means.
    pair_max: Vec<f64>,
}

impl StochasticEnv {
    pub fn independent(arms: Vec<DiscreteDistribution>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::param("arms", "need at least one arm"));
        }
        if let Some(i) = arms.iter().position(|a| !a.support_within(0.0, 1.0)) {
            return Err(Error::InvalidDistribution(format!("arm {i} has support outside [0, 1]")));
        }
        Self::build(ArmLaw::Independent(arms))
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        Self::independent(
            means
                .iter()
                .map(|&p| DiscreteDistribution::bernoulli(p))
                .collect::<Result<_>>()?,
        )
    }

    pub fn joint(joint: JointDistribution) -> Result<Self> {
        if joint.atoms().any(|(o, p)| p > 0.0 && o.iter().any(|v| !(0.0..=1.0).contains(v))) {
            return Err(Error::InvalidDistribution("joint support outside [0, 1]^n".into()));
        }
        Self::build(ArmLaw::Joint(joint))
    }

    pub fn tight(instance: TightInstance) -> Result<Self> {
        Self::build(ArmLaw::Tight(instance))
    }

    fn build(law: ArmLaw) -> Result<Self> {
        let n = match &law {
            ArmLaw::Independent(a) => a.len(),
            ArmLaw::Joint(j) => j.dim(),
            ArmLaw::Tight(t) => t.n,
        };
        let means = match &law {
            ArmLaw::Independent(a) => a.iter().map(DiscreteDistribution::mean).collect(),
            ArmLaw::Joint(j) => (0..n).map(|i| j.expect(|o| o[i])).collect(),
            ArmLaw::Tight(t) => t.means(),
        };
        let mut env = Self {
            law,
            means,
            pair_max: vec![0.0; n * n],
        };
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    env.means[i]
                } else {
                    env.expected_max_uncached(&[i, j])?
                };
                env.pair_max[i * n + j] = v;
                env.pair_max[j * n + i] = v;
            }
        }
        Ok(env)
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn best_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn law(&self) -> &ArmLaw {
        &self.law
    }

    pub fn is_correlated(&self) -> bool {
        !matches!(self.law, ArmLaw::Independent(_))
    }

    /// Uniform draws consumed per step; fixed, so the stream position after
    /// `t` steps does not depend on anything the policy does.
    pub fn draws_per_step(&self) -> usize {
        match &self.law {
            ArmLaw::Independent(a) => a.len(),
            ArmLaw::Joint(_) => 1,
            ArmLaw::Tight(_) => 2,
        }
    }

    /// One reward vector for the step.
    pub fn realize_step<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.law {
            ArmLaw::Independent(arms) => {
                for (o, a) in out.iter_mut().zip(arms) {
                    *o = a.sample_with(rng.random::<f64>());
                }
            }
            ArmLaw::Joint(j) => out.copy_from_slice(j.sample_with(rng.random::<f64>())),
            ArmLaw::Tight(t) => {
                let u_x = rng.random::<f64>();
                let u = rng.random::<f64>();
                t.realize(u_x, u, out);
            }
        }
    }

    /// `E[max_{i in set} X_i]`, exact.
    pub fn expected_max(&self, set: &[usize]) -> Result<f64> {
        let n = self.arms();
        match set {
            [] => Err(Error::ProbeContract("empty probe set".into())),
            [i] if *i < n => Ok(self.means[*i]),
            [i, j] if *i < n && *j < n => Ok(self.pair_max[i * n + j]),
            _ => self.expected_max_uncached(set),
        }
    }

    fn expected_max_uncached(&self, set: &[usize]) -> Result<f64> {
        if let Some(i) = set.iter().find(|i| **i >= self.arms()) {
            return Err(Error::ProbeContract(format!("arm {i} out of range")));
        }
        let max_of = |o: &[f64]| set.iter().map(|&i| o[i]).fold(f64::NEG_INFINITY, f64::max);
        match &self.law {
            ArmLaw::Independent(arms) => {
                let mut acc = arms[set[0]].clone();
                for &i in &set[1..] {
                    acc = max_distribution(&acc, &arms[i], None)?;
                }
                Ok(acc.mean())
            }
            ArmLaw::Joint(j) => Ok(j.expect(max_of)),
            ArmLaw::Tight(t) => Ok(t.joint().expect(max_of)),
        }
    }
}
