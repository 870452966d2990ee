//! Follow-the-perturbed-leader with a two-sample probe, its hint-robust
//! variant, and the one-shot-noise leader used as an analysis reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ask, Decision, LinearPolicy, ProbeOracle};
use crate::base::noise::fill_laplace;
use crate::base::options::{CumulativeLoss, OptionId, OptionSet};
use crate::base::params::AlgoParams;
use crate::error::{Error, Result};

/// Perturbed leader state: `L^{t-1}` plus scratch buffers.
#[derive(Debug, Clone)]
struct Leader {
    options: OptionSet,
    cum: CumulativeLoss,
    scale: f64,
    noise: Vec<f64>,
    cost: Vec<f64>,
}

impl Leader {
    fn new(options: OptionSet, eta: f64) -> Result<Self> {
        options.validate()?;
        AlgoParams::with_eta(eta)?;
        let d = options.dim();
        Ok(Self {
            scale: d as f64 / eta,
            cum: CumulativeLoss::zeros(d),
            noise: vec![0.0; d],
            cost: vec![0.0; d],
            options,
        })
    }

    /// `argmin <L^{t-1} + x, w>` for a fresh Laplace draw `x`.
    fn perturbed_argmin<R: Rng + ?Sized>(&mut self, rng: &mut R) -> OptionId {
        fill_laplace(self.scale, &mut self.noise, rng);
        for ((c, l), x) in self.cost.iter_mut().zip(self.cum.as_slice()).zip(&self.noise) {
            *c = l + x;
        }
        self.options.argmin_unchecked(&self.cost)
    }
}

/// Draws two perturbed leaders each step, probes both and plays the winner.
#[derive(Debug, Clone)]
pub struct Lwc {
    leader: Leader,
}

impl Lwc {
    pub fn new(options: OptionSet, eta: f64) -> Result<Self> {
        Ok(Self {
            leader: Leader::new(options, eta)?,
        })
    }

    /// Laplace scale `d / eta`.
    pub fn noise_scale(&self) -> f64 {
        self.leader.scale
    }

    pub fn cumulative(&self) -> &[f64] {
        self.leader.cum.as_slice()
    }
}

impl LinearPolicy for Lwc {
    fn options(&self) -> &OptionSet {
        &self.leader.options
    }

    fn decide<R: Rng + ?Sized>(
        &mut self,
        _t: usize,
        oracle: &mut ProbeOracle<'_>,
        rng: &mut R,
    ) -> Result<Decision> {
        let a = self.leader.perturbed_argmin(rng);
        let b = self.leader.perturbed_argmin(rng);
        let w = ask(oracle, &[a, b])?;
        Ok(Decision {
            probed: vec![a, b],
            hinted: Some(w),
            played: w,
        })
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        self.leader.cum.add(loss)
    }
}

/// Follows the hint with probability `p`, else plays the first perturbed
/// leader. Tracks how often the hint turned out wrong.
#[derive(Debug, Clone)]
pub struct LwcImperfect {
    leader: Leader,
    hint_prob: f64,
    last: Option<(OptionId, OptionId, OptionId)>,
    mispredictions: u64,
}

impl LwcImperfect {
    /// Uses `eta = 1 / (5 sqrt(B + 1))` and `p = 5 eta`.
    pub fn for_budget(options: OptionSet, budget: u64) -> Result<Self> {
        let p = AlgoParams::imperfect_hints(budget);
        Self::new(options, p.eta, p.hint_prob)
    }

    pub fn new(options: OptionSet, eta: f64, hint_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&hint_prob) {
            return Err(Error::param("hint_prob", "must lie in [0, 1]"));
        }
        Ok(Self {
            leader: Leader::new(options, eta)?,
            hint_prob,
            last: None,
            mispredictions: 0,
        })
    }

    pub fn hint_prob(&self) -> f64 {
        self.hint_prob
    }

    pub fn eta(&self) -> f64 {
        self.leader.options.dim() as f64 / self.leader.scale
    }

    /// Steps on which the hinted option was strictly worse than the other
    /// probe.
    pub fn mispredictions(&self) -> u64 {
        self.mispredictions
    }
}

impl LinearPolicy for LwcImperfect {
    fn options(&self) -> &OptionSet {
        &self.leader.options
    }

    fn decide<R: Rng + ?Sized>(
        &mut self,
        _t: usize,
        oracle: &mut ProbeOracle<'_>,
        rng: &mut R,
    ) -> Result<Decision> {
        let a = self.leader.perturbed_argmin(rng);
        let b = self.leader.perturbed_argmin(rng);
        let w = ask(oracle, &[a, b])?;
        let follow = rng.random::<f64>() < self.hint_prob;
        self.last = Some((a, b, w));
        Ok(Decision {
            probed: vec![a, b],
            hinted: Some(w),
            played: if follow { w } else { a },
        })
    }

    fn observe(&mut self, loss: &[f64]) -> Result<()> {
        if let Some((a, b, w)) = self.last.take() {
            let other = if w == a { b } else { a };
            let opts = &self.leader.options;
            if opts.inner(w, loss) > opts.inner(other, loss) {
                self.mispredictions += 1;
            }
        }
        self.leader.cum.add(loss)
    }
}

/// Plays `argmin <L^{t-1} + l^t + x, w>` with one noise vector `x` drawn up
/// front. Needs the current loss before acting, so it only serves as a
/// benchmark.
#[derive(Debug, Clone)]
pub struct Btrl {
    options: OptionSet,
    cum: CumulativeLoss,
    noise: Vec<f64>,
    cost: Vec<f64>,
}

impl Btrl {
    pub fn new<R: Rng + ?Sized>(options: OptionSet, eta: f64, rng: &mut R) -> Result<Self> {
        options.validate()?;
        AlgoParams::with_eta(eta)?;
        let d = options.dim();
        let mut noise = vec![0.0; d];
        fill_laplace(d as f64 / eta, &mut noise, rng);
        Self::with_noise(options, noise)
    }

    /// Uses the given noise vector, e.g. zero for the plain leader.
    pub fn with_noise(options: OptionSet, noise: Vec<f64>) -> Result<Self> {
        if noise.len() != options.dim() {
            return Err(Error::DimensionMismatch {
                expected: options.dim(),
                got: noise.len(),
            });
        }
        let d = options.dim();
        Ok(Self {
            options,
            cum: CumulativeLoss::zeros(d),
            noise,
            cost: vec![0.0; d],
        })
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    pub fn options(&self) -> &OptionSet {
        &self.options
    }

    /// Folds `l^t` into the leader and returns `c^t`.
    pub fn act(&mut self, loss: &[f64]) -> Result<OptionId> {
        self.cum.add(loss)?;
        for ((c, l), x) in self.cost.iter_mut().zip(self.cum.as_slice()).zip(&self.noise) {
            *c = l + x;
        }
        Ok(self.options.argmin_unchecked(&self.cost))
    }
}

/// Neighbouring cumulative losses `L` and `L + l` over a small option set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpFixture {
    pub name: String,
    pub options: OptionSet,
    pub cumulative: Vec<f64>,
    pub loss: Vec<f64>,
    pub eta: f64,
}

impl DpFixture {
    /// Fixtures with `d <= 3` and `|l|_inf <= 1`. The first has ratio exactly
    /// `e^{eta}` on its `+1` option.
    pub fn standard() -> Vec<DpFixture> {
        vec![
            DpFixture {
                name: "two-points-tight".into(),
                options: OptionSet::explicit(vec![vec![-1.0], vec![1.0]]).expect("valid"),
                cumulative: vec![3.0],
                loss: vec![1.0],
                eta: 0.4,
            },
            DpFixture {
                name: "square".into(),
                options: OptionSet::hypercube(2).expect("valid"),
                cumulative: vec![1.0, -0.5],
                loss: vec![1.0, -1.0],
                eta: 0.4,
            },
            DpFixture {
                name: "simplex-3".into(),
                options: OptionSet::simplex(3).expect("valid"),
                cumulative: vec![0.5, 0.0, 1.0],
                loss: vec![1.0, 0.0, -1.0],
                eta: 0.4,
            },
        ]
    }
}

/// Per-option outcome of a ratio check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpOptionRatio {
    pub option: OptionId,
    pub p_before: f64,
    pub p_after: f64,
    pub ratio: f64,
    /// Relative standard error of `ratio` by the delta method.
    pub rel_stderr: f64,
    pub lo: f64,
    pub hi: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpCheck {
    pub fixture: String,
    pub draws: u64,
    pub scale_multiplier: f64,
    pub options: Vec<DpOptionRatio>,
}

impl DpCheck {
    pub fn passed(&self) -> bool {
        self.options.iter().all(|o| o.holds)
    }
}

fn action_counts(
    options: &OptionSet,
    cum: &[f64],
    scale: f64,
    draws: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<u64> {
    let n = options.len().expect("small option set");
    let mut counts = vec![0u64; n];
    let mut noise = vec![0.0; cum.len()];
    let mut cost = vec![0.0; cum.len()];
    for _ in 0..draws {
        fill_laplace(scale, &mut noise, rng);
        for ((c, l), x) in cost.iter_mut().zip(cum).zip(&noise) {
            *c = l + x;
        }
        counts[options.argmin_unchecked(&cost)] += 1;
    }
    counts
}

/// Estimates the perturbed-leader action laws under `L` and `L + l` from
/// independent draws and checks every option's probability ratio lies in
/// `[e^{-eta}(1 - 3s), e^{eta}(1 + 3s)]`. `scale_multiplier` scales the
/// Laplace noise away from `d / eta`, which should break the check when
/// below one.
pub fn action_dp_check(
    fixture: &DpFixture,
    draws: u64,
    seed: u64,
    scale_multiplier: f64,
) -> Result<DpCheck> {
    let d = fixture.options.dim();
    if fixture.cumulative.len() != d || fixture.loss.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: fixture.cumulative.len().min(fixture.loss.len()),
        });
    }
    if fixture.loss.iter().any(|x| x.abs() > 1.0) {
        return Err(Error::param("loss", "neighbouring losses need |l|_inf <= 1"));
    }
    if fixture.options.len().is_none_or(|n| n > 64) {
        return Err(Error::param("options", "ratio check needs at most 64 options"));
    }
    AlgoParams::with_eta(fixture.eta)?;
    let scale = d as f64 / fixture.eta * scale_multiplier;
    let after: Vec<f64> = fixture
        .cumulative
        .iter()
        .zip(&fixture.loss)
        .map(|(l, x)| l + x)
        .collect();
    let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
    let mut rng_b = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    let before = action_counts(&fixture.options, &fixture.cumulative, scale, draws, &mut rng_a);
    let after = action_counts(&fixture.options, &after, scale, draws, &mut rng_b);
    let n = draws as f64;
    let (lo_base, hi_base) = ((-fixture.eta).exp(), fixture.eta.exp());
    let options = before
        .iter()
        .zip(&after)
        .enumerate()
        .filter(|(_, (b, a))| **b > 0 || **a > 0)
        .map(|(option, (&b, &a))| {
            let (p1, p2) = (b as f64 / n, a as f64 / n);
            let (ratio, rel_stderr) = if b == 0 || a == 0 {
                (if a == 0 { f64::INFINITY } else { 0.0 }, 0.0)
            } else {
                (p1 / p2, ((1.0 - p1) / (n * p1) + (1.0 - p2) / (n * p2)).sqrt())
            };
            let lo = lo_base * (1.0 - 3.0 * rel_stderr);
            let hi = hi_base * (1.0 + 3.0 * rel_stderr);
            DpOptionRatio {
                option,
                p_before: p1,
                p_after: p2,
                ratio,
                rel_stderr,
                lo,
                hi,
                holds: ratio >= lo && ratio <= hi,
            }
        })
        .collect();
    Ok(DpCheck {
        fixture: fixture.name.clone(),
        draws,
        scale_multiplier,
        options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::options::dot;
    use crate::env::{best_of, Direction};

    fn honest<'a>(options: &'a OptionSet, loss: &'a [f64]) -> impl FnMut(&[OptionId]) -> Result<OptionId> + 'a {
        move |set: &[OptionId]| {
            let c: Vec<_> = set.iter().map(|&i| (i, options.inner(i, loss))).collect();
            best_of(&c, Direction::MinLoss)
        }
    }

    #[test]
    fn constant_loss_converges_to_minus_one() {
        let w = OptionSet::explicit(vec![vec![-1.0], vec![1.0]]).unwrap();
        let mut lwc = Lwc::new(w.clone(), 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let loss = [1.0];
        let mut incurred = 0.0;
        let t_max = 10_000;
        for t in 1..=t_max {
            let d = lwc.decide(t, &mut honest(&w, &loss), &mut rng).unwrap();
            incurred += w.inner(d.played, &loss);
            lwc.observe(&loss).unwrap();
        }
        // regret against always -1
        let regret = incurred + t_max as f64;
        assert!(regret < 20.0, "regret {regret}");
    }

    #[test]
    fn degenerate_probe_plays_the_shared_leader() {
        let w = OptionSet::explicit(vec![vec![-1.0], vec![1.0]]).unwrap();
        let mut lwc = Lwc::new(w.clone(), 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            lwc.observe(&[1.0]).unwrap();
        }
        let d = lwc.decide(501, &mut honest(&w, &[1.0]), &mut rng).unwrap();
        assert_eq!(d.probed, vec![0, 0]);
        assert_eq!(d.played, 0);
    }

    #[test]
    fn same_seed_same_choices() {
        let w = OptionSet::hypercube(3).unwrap();
        let run = |seed| {
            let mut lwc = Lwc::new(w.clone(), 0.3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let loss = [0.5, -0.2, 0.1];
            (1..=100)
                .map(|t| {
                    let d = lwc.decide(t, &mut honest(&w, &loss), &mut rng).unwrap();
                    lwc.observe(&loss).unwrap();
                    d
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn oracle_contract_enforced() {
        let w = OptionSet::explicit(vec![vec![-1.0], vec![1.0], vec![0.0]]).unwrap();
        let mut lwc = Lwc::new(w, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut liar = |set: &[OptionId]| Ok(set.iter().max().unwrap() + 1);
        assert!(matches!(
            lwc.decide(1, &mut liar, &mut rng),
            Err(Error::ProbeContract(_))
        ));
    }

    #[test]
    fn imperfect_with_zero_budget_matches_lwc() {
        let w = OptionSet::hypercube(2).unwrap();
        let mut plain = Lwc::new(w.clone(), 0.2).unwrap();
        let mut hinted = LwcImperfect::for_budget(w.clone(), 0).unwrap();
        assert_eq!(hinted.hint_prob(), 1.0);
        let mut r1 = ChaCha8Rng::seed_from_u64(8);
        let mut r2 = ChaCha8Rng::seed_from_u64(8);
        let loss = [0.3, -0.4];
        for t in 1..=200 {
            let a = plain.decide(t, &mut honest(&w, &loss), &mut r1).unwrap();
            let b = hinted.decide(t, &mut honest(&w, &loss), &mut r2).unwrap();
            assert_eq!(a.played, b.played);
            assert_eq!(a.probed, b.probed);
            // the hint coin uses one extra draw per step
            let _: f64 = r1.random();
            plain.observe(&loss).unwrap();
            hinted.observe(&loss).unwrap();
        }
        assert_eq!(hinted.mispredictions(), 0);
    }

    #[test]
    fn imperfect_counts_wrong_hints() {
        let w = OptionSet::explicit(vec![vec![-1.0], vec![1.0]]).unwrap();
        let mut pol = LwcImperfect::new(w.clone(), 0.4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let loss = [1.0];
        let mut wrong = 0;
        for t in 1..=50 {
            let mut lie = |set: &[OptionId]| {
                let c: Vec<_> = set.iter().map(|&i| (i, -w.inner(i, &loss))).collect();
                best_of(&c, Direction::MinLoss)
            };
            let d = pol.decide(t, &mut lie, &mut rng).unwrap();
            if d.probed[0] != d.probed[1] {
                wrong += 1;
            }
            pol.observe(&loss).unwrap();
        }
        assert_eq!(pol.mispredictions(), wrong);
    }

    #[test]
    fn btrl_zero_noise_follows_the_leader() {
        let w = OptionSet::explicit(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let mut b = Btrl::with_noise(w.clone(), vec![0.0, 0.0]).unwrap();
        let losses = [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0]];
        let mut cum = [0.0; 2];
        for l in losses {
            cum[0] += l[0];
            cum[1] += l[1];
            let c = b.act(&l).unwrap();
            let leader = w.argmin(&cum).unwrap();
            assert_eq!(c, leader);
            assert!(dot(&w.point(c), &cum) <= dot(&w.point(1 - c), &cum));
        }
    }

    #[test]
    fn btrl_constant_stream_is_constant() {
        let w = OptionSet::hypercube(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut b = Btrl::new(w, 0.4, &mut rng).unwrap();
        let first = b.act(&[0.2, -0.3, 0.1]).unwrap();
        for _ in 0..100 {
            assert_eq!(b.act(&[0.2, -0.3, 0.1]).unwrap(), first);
        }
    }

    #[test]
    fn dp_check_passes_and_detects_halved_noise() {
        let fx = &DpFixture::standard()[0];
        let ok = action_dp_check(fx, 200_000, 1, 1.0).unwrap();
        assert!(ok.passed(), "{ok:?}");
        let broken = action_dp_check(fx, 200_000, 1, 0.5).unwrap();
        assert!(!broken.passed(), "{broken:?}");
    }
}
