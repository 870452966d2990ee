//! Finite-support distributions and their text literal format.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Probability mass on finitely many real values, sorted by value with
/// duplicates merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    /// Running cumulative mass, for inverse-CDF sampling.
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite value {v}")));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidDistribution(format!("bad probability {p} at {v}")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            if values.last() == Some(&v) {
                *probs.last_mut().unwrap() += p;
            } else {
                values.push(v);
                probs.push(p);
            }
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            values,
            probs,
            cumulative,
        })
    }

    pub fn point(value: f64) -> Self {
        Self::new([(value, 1.0)]).expect("point mass is valid")
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("Bernoulli parameter {p}")));
        }
        Self::new([(0.0, 1.0 - p), (1.0, p)])
    }

    /// Uniform over the given values.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let w = 1.0 / values.len() as f64;
        Self::new(values.iter().map(|&v| (v, w)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms().map(|(v, p)| p * (v - m) * (v - m)).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `P[X >= x]`.
    pub fn survival(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|v| *v < x);
        self.probs[k..].iter().sum()
    }

    /// Probability of exactly `x`.
    pub fn mass(&self, x: f64) -> f64 {
        match self.values.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// Inverse-CDF sample for `u` in [0, 1).
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        for (i, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return self.values[i];
            }
        }
        // u landed in the rounding gap above the last cumulative sum
        let last = self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        self.values[last]
    }

    pub fn support_within(&self, lo: f64, hi: f64) -> bool {
        self.atoms().all(|(v, p)| p == 0.0 || (lo..=hi).contains(&v))
    }

    /// Parses the fixture format: one `value probability` pair per line,
    /// blank lines and `#` comments ignored.
    pub fn parse_literal(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| {
                    Error::InvalidDistribution(format!("line {}: expected two fields", lineno + 1))
                })?
                .parse::<f64>()
                .map_err(|e| Error::InvalidDistribution(format!("line {}: {e}", lineno + 1)))
            };
            let v = parse(it.next())?;
            let p = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "line {}: trailing fields",
                    lineno + 1
                )));
            }
            atoms.push((v, p));
        }
        Self::new(atoms)
    }

    pub fn to_literal(&self) -> String {
        let mut out = String::new();
        for (v, p) in self.atoms() {
            let _ = writeln!(out, "{v} {p}");
        }
        out
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<DiscreteDistribution> for Vec<(f64, f64)> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms().collect()
    }
}

/// Joint law of a reward vector over finitely many outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    dim: usize,
    outcomes: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(atoms: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self> {
        let (outcomes, probs): (Vec<Vec<f64>>, Vec<f64>) = atoms.into_iter().unzip();
        let Some(dim) = outcomes.first().map(Vec::len) else {
            return Err(Error::InvalidDistribution("empty joint support".into()));
        };
        if dim == 0 {
            return Err(Error::InvalidDistribution("zero-dimensional outcomes".into()));
        }
        for (o, p) in outcomes.iter().zip(&probs) {
            if o.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: o.len(),
                });
            }
            if o.iter().any(|v| !v.is_finite()) || !(*p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidDistribution("non-finite joint atom".into()));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            dim,
            outcomes,
            probs,
        })
    }

    /// Product law of independent marginals.
    pub fn independent(marginals: &[DiscreteDistribution]) -> Result<Self> {
        let mut atoms: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for m in marginals {
            atoms = atoms
                .into_iter()
                .flat_map(|(o, p)| {
                    m.atoms().map(move |(v, q)| {
                        let mut o = o.clone();
                        o.push(v);
                        (o, p * q)
                    })
                })
                .collect();
        }
        Self::new(atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.outcomes
            .iter()
            .map(Vec::as_slice)
            .zip(self.probs.iter().copied())
    }

    pub fn marginal(&self, i: usize) -> Result<DiscreteDistribution> {
        if i >= self.dim {
            return Err(Error::param("coordinate", format!("{i} >= dim {}", self.dim)));
        }
        DiscreteDistribution::new(self.atoms().map(|(o, p)| (o[i], p)))
    }

    /// Joint law of coordinates `(i, j)`.
    pub fn pair(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.dim || j >= self.dim {
            return Err(Error::param("coordinate", "pair index out of range"));
        }
        Self::new(self.atoms().map(|(o, p)| (vec![o[i], o[j]], p)))
    }

    /// Inverse-CDF draw of a whole outcome for `u` in [0, 1).
    pub fn sample_with(&self, u: f64) -> &[f64] {
        let mut acc = 0.0;
        for (o, p) in self.atoms() {
            acc += p;
            if u < acc {
                return o;
            }
        }
        let last = self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        &self.outcomes[last]
    }

    /// Exact expectation of `f(outcome)`.
    pub fn expect(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.atoms().map(|(o, p)| p * f(o)).sum()
    }
}
