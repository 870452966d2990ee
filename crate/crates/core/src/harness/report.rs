//! Aggregated results of a replicated experiment.

use serde::{Deserialize, Serialize};

use super::config::{ArmSpec, EnvSpec, ExperimentConfig, PolicyKind};
use super::runner::Replication;
use crate::base::noise::gumbel_cdf;
use crate::base::options::OptionSet;
use crate::base::params::AlgoParams;
use crate::base::stats::Moments;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: usize,
    pub mean_regret: f64,
    pub stderr: f64,
}

/// A reference regret bound evaluated at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub name: String,
    pub formula: String,
    pub value: f64,
    /// Mean final regret is at most `value`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub replications: usize,
    pub mean_regret: f64,
    /// Sample standard deviation over `sqrt(R)`; zero when `R = 1`.
    pub stderr: f64,
    pub final_regrets: Vec<f64>,
    pub checkpoints: Vec<CurvePoint>,
    pub bounds: Vec<BoundComparison>,
    /// Full curve on the run grid; written as CSV, not embedded in JSON.
    #[serde(skip)]
    pub curve: Vec<CurvePoint>,
}

impl Report {
    pub fn build(cfg: &ExperimentConfig, grid: &[usize], reps: &[Replication]) -> Result<Self> {
        if reps.is_empty() {
            return Err(Error::param("replications", "nothing to aggregate"));
        }
        let mut sorted: Vec<&Replication> = reps.iter().collect();
        sorted.sort_by_key(|r| r.rep);
        let finals: Vec<f64> = sorted.iter().map(|r| r.final_regret).collect();
        let total = Moments::from_slice(&finals);
        let mut curve = Vec::with_capacity(grid.len());
        for (k, &t) in grid.iter().enumerate() {
            let column: Vec<f64> = sorted.iter().filter_map(|r| r.curve.get(k).copied()).collect();
            if column.len() != sorted.len() {
                return Err(Error::LengthMismatch {
                    expected: sorted.len(),
                    got: column.len(),
                });
            }
            let m = Moments::from_slice(&column);
            curve.push(CurvePoint {
                t,
                mean_regret: m.mean,
                stderr: m.std_err(),
            });
        }
        let wanted = cfg.checkpoints_in_horizon();
        let checkpoints = curve.iter().filter(|p| wanted.contains(&p.t)).cloned().collect();
        let bounds = reference_bounds(cfg)?
            .into_iter()
            .map(|(name, formula, value)| BoundComparison {
                name,
                formula,
                value,
                holds: total.mean <= value,
            })
            .collect();
        Ok(Self {
            config: cfg.clone(),
            replications: finals.len(),
            mean_regret: total.mean,
            stderr: total.std_err(),
            final_regrets: finals,
            checkpoints,
            bounds,
            curve,
        })
    }

    pub fn checkpoint(&self, t: usize) -> Option<&CurvePoint> {
        self.curve.iter().find(|p| p.t == t)
    }
}

/// `1 + 1/2 + ... + 1/d`.
pub fn harmonic(d: usize) -> f64 {
    (1..=d).map(|k| 1.0 / k as f64).sum()
}

/// `E[max_j |x_j|]` for `n` i.i.d. Gumbel draws of scale `1/eta`, by
/// integrating the survival function.
pub fn expected_max_abs_gumbel(n: usize, eta: f64) -> f64 {
    let cdf_abs = |x: f64| (gumbel_cdf(eta, x) - gumbel_cdf(eta, -x)).max(0.0);
    let survival = |x: f64| 1.0 - cdf_abs(x).powi(n as i32);
    let upper = ((n as f64).ln() + 45.0) / eta;
    let steps = 40_000;
    let h = upper / steps as f64;
    let mut acc = survival(0.0) + survival(upper);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * survival(k as f64 * h);
    }
    acc * h / 3.0
}

/// Reference bound for the perturbed leader with Laplace noise of scale
/// `d / eta`: `D * (d / eta) * H_d`, where `D` is the l1 diameter.
pub fn laplace_leader_bound(options: &OptionSet, eta: f64) -> f64 {
    let d = options.dim();
    options.l1_diameter() * d as f64 / eta * harmonic(d)
}

fn reference_bounds(cfg: &ExperimentConfig) -> Result<Vec<(String, String, f64)>> {
    let t = cfg.horizon as f64;
    let eta = cfg.params.eta;
    let mut out = Vec::new();
    match (&cfg.env, cfg.policy) {
        (EnvSpec::Adversarial { dim, options, corruption, .. }, p) => {
            let opts = match options {
                Some(o) => o.clone(),
                None => OptionSet::simplex(*dim)?,
            };
            match p {
                PolicyKind::Lwc | PolicyKind::Btrl => out.push((
                    "leader".into(),
                    "D * (d / eta) * H_d".into(),
                    laplace_leader_bound(&opts, eta),
                )),
                PolicyKind::LwcImperfect => {
                    let budget = corruption.as_ref().map_or(cfg.params.budget, |c| c.budget);
                    let tuned = AlgoParams::imperfect_hints(budget);
                    out.push((
                        "leader".into(),
                        "D * (d / eta_B) * H_d, eta_B = 1 / (5 sqrt(B + 1))".into(),
                        laplace_leader_bound(&opts, tuned.eta),
                    ));
                }
                PolicyKind::Hwc => out.push((
                    "leader".into(),
                    "2 * E[max_j |Gumbel(1/eta)_j|]".into(),
                    2.0 * expected_max_abs_gumbel(*dim, eta),
                )),
                _ => {}
            }
        }
        (EnvSpec::Convex { domain, .. }, PolicyKind::Cwc) => {
            let d = domain.dim() as f64;
            out.push((
                "convex".into(),
                "gamma * d + beta * d^1.5".into(),
                cfg.params.hessian_bound * d + cfg.params.grad_bound * d.powf(1.5),
            ));
        }
        (EnvSpec::Stochastic { arms, .. }, PolicyKind::MetaUcbv) => {
            let n = match arms {
                ArmSpec::Bernoulli { means } => means.len(),
                ArmSpec::Discrete { arms } => arms.len(),
                ArmSpec::Joint { joint } => joint.dim(),
                ArmSpec::Tight { n, .. } => *n,
            } as f64;
            out.push(("meta-arms".into(), "50 * n^2 * ln T".into(), 50.0 * n * n * t.ln()));
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::noise::sample_gumbel;
    use crate::harness::runner::Replication;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gumbel_max_quadrature_matches_simulation() {
        let (n, eta) = (10, 0.4);
        let exact = expected_max_abs_gumbel(n, eta);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 200_000;
        let mut m = Moments::default();
        for _ in 0..trials {
            let x = (0..n)
                .map(|_| sample_gumbel(eta, rng.random_range(f64::EPSILON..1.0)).unwrap().abs())
                .fold(0.0, f64::max);
            m = m.merge(Moments::of(x));
        }
        assert!((m.mean - exact).abs() < 4.0 * m.std_err(), "{} vs {exact}", m.mean);
        // one standard Gumbel: E|G| by the same route, located at Euler's constant
        assert!(expected_max_abs_gumbel(1, 1.0) > 0.5772);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(1), 1.0);
        assert_relative_eq!(harmonic(4), 25.0 / 12.0, max_relative = 1e-15);
    }

    #[test]
    fn aggregation_is_order_independent() {
        let cfg = ExperimentConfig::from_toml_str(
            "policy = \"lwc\"\nhorizon = 10\ncheckpoints = [5]\n[env]\nkind = \"adversarial\"\ndim = 2\ngenerator = { name = \"signs\" }\n",
        )
        .unwrap();
        let reps: Vec<Replication> = (0..4)
            .map(|r| Replication {
                rep: r,
                final_regret: r as f64,
                curve: vec![0.5 * r as f64, r as f64],
            })
            .collect();
        let mut shuffled = reps.clone();
        shuffled.reverse();
        let a = Report::build(&cfg, &[5, 10], &reps).unwrap();
        let b = Report::build(&cfg, &[5, 10], &shuffled).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_regret, 1.5);
        assert_eq!(a.checkpoints.len(), 1);
        assert_eq!(a.checkpoints[0].mean_regret, 0.75);
        assert_relative_eq!(a.stderr, (5.0f64 / 3.0).sqrt() / 2.0, max_relative = 1e-12);
        assert_eq!(a.bounds.len(), 1);
    }
}
