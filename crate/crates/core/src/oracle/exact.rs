//! Exact expectations over finite supports.

use serde::{Deserialize, Serialize};

use super::dist::{DiscreteDistribution, JointDistribution};
use crate::error::{Error, Result};

/// Tolerance for joint marginals against declared marginals.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

pub fn expect(d: &DiscreteDistribution) -> f64 {
    d.mean()
}

pub fn variance(d: &DiscreteDistribution) -> f64 {
    d.variance()
}

/// `E[min(A, B)]` for `A, B` i.i.d. from `d`, as `sum_k v_k (G_k^2 - G_{k+1}^2)`
/// with `G_k = P[X >= v_k]`.
pub fn expect_min_two_iid(d: &DiscreteDistribution) -> f64 {
    let probs = d.probs();
    let mut tail = 0.0;
    let mut total = 0.0;
    // walk from the top so each survival value is a partial sum
    for (k, v) in d.values().iter().enumerate().rev() {
        let above = tail;
        tail += probs[k];
        total += v * (tail * tail - above * above);
    }
    total
}

/// `(1 - p) E[A] + p E[min(A, B)]`.
pub fn expect_mixed_min(d: &DiscreteDistribution, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} outside [0, 1]")));
    }
    Ok((1.0 - p) * d.mean() + p * expect_min_two_iid(d))
}

/// Smallest `eta'` with `e^{-eta'} <= P1(w) / P2(w) <= e^{eta'}` on the union
/// of both supports.
pub fn dp_ratio(d1: &DiscreteDistribution, d2: &DiscreteDistribution) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in union_support(d1, d2) {
        let (p1, p2) = (d1.mass(v), d2.mass(v));
        if p1 <= 0.0 || p2 <= 0.0 {
            return Err(Error::UndefinedRatio { value: v });
        }
        worst = worst.max((p1 / p2).ln().abs());
    }
    Ok(worst)
}

fn union_support(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Vec<f64> {
    let mut vs: Vec<f64> = a.values().iter().chain(b.values()).copied().collect();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    vs
}

fn check_joint(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    joint: &JointDistribution,
) -> Result<()> {
    if joint.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: joint.dim(),
        });
    }
    for (which, declared, coord) in [("first", x, 0), ("second", y, 1)] {
        let m = joint.marginal(coord)?;
        let deviation = union_support(declared, &m)
            .into_iter()
            .map(|v| (declared.mass(v) - m.mass(v)).abs())
            .fold(0.0, f64::max);
        if deviation > MARGINAL_TOLERANCE {
            return Err(Error::MarginalMismatch { which, deviation });
        }
    }
    Ok(())
}

/// Law of `max(X, Y)`; independent unless a joint table over `(X, Y)` is
/// given.
pub fn max_distribution(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    joint: Option<&JointDistribution>,
) -> Result<DiscreteDistribution> {
    match joint {
        Some(j) => {
            check_joint(x, y, j)?;
            DiscreteDistribution::new(j.atoms().map(|(o, p)| (o[0].max(o[1]), p)))
        }
        None => {
            // P[max <= v] = F_X(v) F_Y(v)
            let mut prev = 0.0;
            let mut atoms = Vec::new();
            for v in union_support(x, y) {
                let f = x.cdf(v) * y.cdf(v);
                atoms.push((v, f - prev));
                prev = f;
            }
            // absorb rounding so the masses sum to one exactly enough
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            for a in &mut atoms {
                a.1 /= total;
            }
            DiscreteDistribution::new(atoms)
        }
    }
}

pub fn expect_max(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    joint: Option<&JointDistribution>,
) -> Result<f64> {
    match joint {
        Some(j) => {
            check_joint(x, y, j)?;
            Ok(j.expect(|o| o[0].max(o[1])))
        }
        None => Ok(max_distribution(x, y, None)?.mean()),
    }
}

/// Mean and variance of the meta-arm reward `max(X_i, X_j)`.
pub fn meta_stats(
    xi: &DiscreteDistribution,
    xj: &DiscreteDistribution,
    joint: Option<&JointDistribution>,
) -> Result<(f64, f64)> {
    let m = max_distribution(xi, xj, joint)?;
    Ok((m.mean(), m.variance()))
}

/// `G_ji = E[(X_j - X_i)_+]`; a joint table, if given, is over `(X_j, X_i)`.
pub fn gain_exact(
    xj: &DiscreteDistribution,
    xi: &DiscreteDistribution,
    joint: Option<&JointDistribution>,
) -> Result<f64> {
    match joint {
        Some(j) => {
            check_joint(xj, xi, j)?;
            Ok(j.expect(|o| (o[0] - o[1]).max(0.0)))
        }
        None => Ok(xj
            .atoms()
            .map(|(a, pa)| {
                pa * xi
                    .atoms()
                    .map(|(b, pb)| pb * (a - b).max(0.0))
                    .sum::<f64>()
            })
            .sum()),
    }
}

/// Pairwise quantities of a joint arm law, indexed by unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    pub pair: (usize, usize),
    pub mean: f64,
    pub variance: f64,
}

/// Exact meta-arm means and variances for every pair `i < j`, in
/// lexicographic order.
pub fn pair_summaries(joint: &JointDistribution) -> Result<Vec<PairSummary>> {
    let n = joint.dim();
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let m = DiscreteDistribution::new(joint.atoms().map(|(o, p)| (o[i].max(o[j]), p)))?;
            out.push(PairSummary {
                pair: (i, j),
                mean: m.mean(),
                variance: m.variance(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChernoffRegime {
    /// `0 <= delta <= 1`.
    Small,
    /// `delta >= 1`.
    Large,
}

/// Upper-tail Chernoff bound `P[X >= (1 + delta) mu]` for sums of independent
/// `[0, 1]` variables with mean `mu`.
pub fn chernoff_bound(mu: f64, delta: f64, regime: ChernoffRegime) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::param("mu", "must be a nonnegative finite real"));
    }
    match regime {
        ChernoffRegime::Small if (0.0..=1.0).contains(&delta) => {
            Ok((-mu * delta * delta / 3.0).exp())
        }
        ChernoffRegime::Large if delta >= 1.0 && delta.is_finite() => Ok((-mu * delta / 3.0).exp()),
        _ => Err(Error::param(
            "delta",
            format!("{delta} does not match the {regime:?} regime"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ber(p: f64) -> DiscreteDistribution {
        DiscreteDistribution::bernoulli(p).unwrap()
    }

    #[test]
    fn min_of_two_iid() {
        let u01 = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(expect_min_two_iid(&u01), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            expect_min_two_iid(&DiscreteDistribution::point(0.3)),
            0.3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn mixed_min() {
        let u01 = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(expect_mixed_min(&u01, 0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(expect_mixed_min(&u01, 1.0).unwrap(), 0.25);
        assert_abs_diff_eq!(expect_mixed_min(&u01, 0.5).unwrap(), 0.375, epsilon = 1e-15);
        assert!(expect_mixed_min(&u01, 1.5).is_err());
    }

    #[test]
    fn dp_ratio_cases() {
        let a = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(dp_ratio(&a, &a).unwrap(), 0.0);
        let z = 1.0 + 0.2f64.exp();
        let b = DiscreteDistribution::new([(0.0, 1.0 / z), (1.0, 0.2f64.exp() / z)]).unwrap();
        assert!(dp_ratio(&a, &b).unwrap() > 0.0);
        // one atom at ratio e^{0.2}, one at e^{-0.2}, the third takes the rest
        let third = [0.0, 0.5, 1.0];
        let u3 = DiscreteDistribution::uniform(&third).unwrap();
        let (hi, lo) = (0.2f64.exp() / 3.0, (-0.2f64).exp() / 3.0);
        let c = DiscreteDistribution::new([(0.0, hi), (0.5, lo), (1.0, 1.0 - hi - lo)]).unwrap();
        assert_abs_diff_eq!(dp_ratio(&c, &u3).unwrap(), 0.2, epsilon = 1e-12);
        let point = DiscreteDistribution::point(1.0);
        assert!(matches!(
            dp_ratio(&point, &a),
            Err(Error::UndefinedRatio { .. })
        ));
    }

    #[test]
    fn expect_max_cases() {
        assert_abs_diff_eq!(expect_max(&ber(0.5), &ber(0.5), None).unwrap(), 0.75);
        assert_abs_diff_eq!(
            expect_max(&ber(0.3), &DiscreteDistribution::point(1.0), None).unwrap(),
            1.0
        );
        let (m, v) = meta_stats(&ber(0.5), &ber(0.5), None).unwrap();
        assert_abs_diff_eq!(m, 0.75);
        assert_abs_diff_eq!(v, 0.1875);
        let (m, v) = meta_stats(
            &DiscreteDistribution::point(0.4),
            &DiscreteDistribution::point(0.4),
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(m, 0.4);
        assert_abs_diff_eq!(v, 0.0);
    }

    #[test]
    fn joint_marginals_checked() {
        let comonotone =
            JointDistribution::new([(vec![0.0, 0.0], 0.5), (vec![1.0, 1.0], 0.5)]).unwrap();
        assert_abs_diff_eq!(expect_max(&ber(0.5), &ber(0.5), Some(&comonotone)).unwrap(), 0.5);
        assert_abs_diff_eq!(gain_exact(&ber(0.5), &ber(0.5), Some(&comonotone)).unwrap(), 0.0);
        assert!(matches!(
            expect_max(&ber(0.4), &ber(0.5), Some(&comonotone)),
            Err(Error::MarginalMismatch { which: "first", .. })
        ));
    }

    #[test]
    fn gains() {
        assert_abs_diff_eq!(gain_exact(&ber(0.5), &ber(0.5), None).unwrap(), 0.25);
        let d = ber(0.3);
        let lhs = expect_max(&d, &ber(0.6), None).unwrap();
        let rhs = d.mean() + gain_exact(&ber(0.6), &d, None).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-15);
    }

    #[test]
    fn pair_summaries_lexicographic() {
        let j = JointDistribution::independent(&[ber(0.5), ber(0.5), DiscreteDistribution::point(0.0)])
            .unwrap();
        let s = pair_summaries(&j).unwrap();
        let pairs: Vec<_> = s.iter().map(|p| p.pair).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_abs_diff_eq!(s[0].mean, 0.75);
        assert_abs_diff_eq!(s[1].mean, 0.5);
    }

    #[test]
    fn chernoff() {
        use ChernoffRegime::*;
        assert_eq!(chernoff_bound(5.0, 0.0, Small).unwrap(), 1.0);
        assert_abs_diff_eq!(chernoff_bound(12.0, 0.5, Small).unwrap(), (-1.0f64).exp());
        assert_abs_diff_eq!(chernoff_bound(3.0, 2.0, Large).unwrap(), (-2.0f64).exp());
        assert!(chernoff_bound(3.0, 2.0, Small).is_err());
        assert!(chernoff_bound(3.0, 0.5, Large).is_err());
    }
}
