//! Single runs and replicated experiments.

use rand::Rng;
use rayon::prelude::*;

use super::config::{ArmSpec, Benchmark, ConvexLosses, EnvSpec, ExperimentConfig, PolicyKind};
use super::report::Report;
use super::seed::{derive, rng_for, streams};
use crate::bandit::{
    BanditPolicy, CorrExploit, ExploreExploit, FeedbackMode, MetaUcbv, Observation, Ucb1TopTwo,
};
use crate::base::options::{CumulativeLoss, OptionSet};
use crate::base::trace::{Choice, Objective, Recorder, RegretCurve, StepRecord, Trace};
use crate::env::probe::flip;
use crate::env::{
    all_probe, best_of, best_probe, AdversarialStream, CorruptionSchedule, Direction,
    ProbeFeedback, StochasticEnv, TightInstance,
};
use crate::error::{Error, Result};
use crate::linear::{
    Btrl, ConvexDomain, Cwc, Hedge, Hwc, LinearPolicy, Lwc, LwcImperfect, QuadraticLoss,
    QuadraticSum, SolverOptions,
};

/// Plays a full-information policy against a loss stream. On corrupted
/// steps a two-probe query is answered with the worse option.
pub fn drive_linear<P, R, Rec>(
    policy: &mut P,
    stream: &AdversarialStream,
    corruption: &CorruptionSchedule,
    rng: &mut R,
    rec: &mut Rec,
) -> Result<f64>
where
    P: LinearPolicy,
    R: Rng + ?Sized,
    Rec: Recorder,
{
    let options = policy.options().clone();
    check_stream(&options, stream)?;
    let mut loss = vec![0.0; stream.dim()];
    let mut cum = CumulativeLoss::zeros(stream.dim());
    let mut incurred = 0.0;
    for t in 1..=stream.horizon() {
        stream.loss_at(t, &mut loss);
        let corrupted = corruption.is_corrupted(t);
        let decision = {
            let (opts, loss) = (&options, &loss);
            let mut oracle = |probes: &[usize]| -> Result<usize> {
                let cands: Vec<(usize, f64)> =
                    probes.iter().map(|&id| (id, opts.inner(id, loss))).collect();
                let honest = best_of(&cands, Direction::MinLoss)?;
                Ok(if corrupted && probes.len() == 2 {
                    flip(probes, honest)
                } else {
                    honest
                })
            };
            policy.decide(t, &mut oracle, rng)?
        };
        let value = options.inner(decision.played, &loss);
        incurred += value;
        cum.add(&loss)?;
        let regret = incurred - options.inner(options.argmin(cum.as_slice())?, cum.as_slice());
        let detail = rec.detailed().then(|| StepRecord {
            t,
            probed: decision.probed.iter().map(|&i| Choice::Index(i)).collect(),
            explored: Vec::new(),
            feedback: decision.hinted.map(ProbeFeedback::Best),
            played: Choice::Index(decision.played),
            value,
            expected: None,
            regret,
        });
        rec.record(t, regret, detail);
        policy.observe(&loss)?;
    }
    Ok(incurred - options.inner(options.argmin(cum.as_slice())?, cum.as_slice()))
}

/// Plays the look-ahead reference leader, which sees `l^t` before acting.
pub fn drive_btrl<Rec: Recorder>(
    policy: &mut Btrl,
    stream: &AdversarialStream,
    rec: &mut Rec,
) -> Result<f64> {
    let options = policy.options().clone();
    check_stream(&options, stream)?;
    let mut loss = vec![0.0; stream.dim()];
    let mut cum = CumulativeLoss::zeros(stream.dim());
    let mut incurred = 0.0;
    let mut regret = 0.0;
    for t in 1..=stream.horizon() {
        stream.loss_at(t, &mut loss);
        let played = policy.act(&loss)?;
        let value = options.inner(played, &loss);
        incurred += value;
        cum.add(&loss)?;
        regret = incurred - options.inner(options.argmin(cum.as_slice())?, cum.as_slice());
        let detail = rec.detailed().then(|| StepRecord {
            t,
            probed: vec![Choice::Index(played)],
            explored: Vec::new(),
            feedback: None,
            played: Choice::Index(played),
            value,
            expected: None,
            regret,
        });
        rec.record(t, regret, detail);
    }
    Ok(regret)
}

fn check_stream(options: &OptionSet, stream: &AdversarialStream) -> Result<()> {
    if options.dim() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: options.dim(),
            got: stream.dim(),
        });
    }
    Ok(())
}

/// Plays CwC on `l^t(w) = |w - v^t|^2`, with centers drawn by `centers`.
pub fn drive_convex<R, Rec>(
    policy: &mut Cwc,
    horizon: usize,
    mut centers: impl FnMut(usize, &mut [f64]),
    solver: &SolverOptions,
    rng: &mut R,
    rec: &mut Rec,
) -> Result<f64>
where
    R: Rng + ?Sized,
    Rec: Recorder,
{
    let domain = policy.domain().clone();
    let mut center = vec![0.0; domain.dim()];
    let mut hindsight = QuadraticSum::zeros(domain.dim());
    let mut incurred = 0.0;
    let mut regret = 0.0;
    for t in 1..=horizon {
        centers(t, &mut center);
        let loss = QuadraticLoss::squared_distance(&center);
        let mut oracle = |a: &[f64], b: &[f64]| loss.value(b) < loss.value(a);
        let decision = policy.decide(&mut oracle, rng)?;
        let second = decision.played == decision.b && decision.a != decision.b;
        let value = loss.value(&decision.played);
        incurred += value;
        hindsight.add(&loss);
        let (_, best) = hindsight.minimize(&domain, solver)?;
        regret = incurred - best;
        let detail = rec.detailed().then(|| StepRecord {
            t,
            probed: vec![Choice::Point(decision.a.clone()), Choice::Point(decision.b.clone())],
            explored: Vec::new(),
            feedback: Some(ProbeFeedback::Best(usize::from(second))),
            played: Choice::Point(decision.played.clone()),
            value,
            expected: None,
            regret,
        });
        rec.record(t, regret, detail);
        policy.observe(&loss)?;
    }
    Ok(regret)
}

/// Expected reward the bandit pseudo-regret is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    pub value: f64,
    /// Charge `max(0, value - E[reward])` instead of the signed gap.
    pub clipped: bool,
}

impl Baseline {
    pub fn signed(value: f64) -> Self {
        Self {
            value,
            clipped: false,
        }
    }

    #[inline]
    pub fn charge(&self, expected: f64) -> f64 {
        let gap = self.value - expected;
        if self.clipped {
            gap.max(0.0)
        } else {
            gap
        }
    }
}

/// Plays a bandit policy for `horizon` steps, charging the baseline gap to
/// `E[max over the exploit probes]` each step. `inspect` sees the policy
/// right after it plans step `t`.
pub fn drive_bandit<P, R, Rec>(
    policy: &mut P,
    env: &StochasticEnv,
    benchmark: Baseline,
    horizon: usize,
    rng: &mut R,
    rec: &mut Rec,
    mut inspect: impl FnMut(usize, &P),
) -> Result<f64>
where
    P: BanditPolicy,
    R: Rng + ?Sized,
    Rec: Recorder,
{
    if policy.arms() != env.arms() {
        return Err(Error::LengthMismatch {
            expected: env.arms(),
            got: policy.arms(),
        });
    }
    let mut values = vec![0.0; env.arms()];
    let mut regret = 0.0;
    for t in 1..=horizon {
        let plan = policy.plan(t);
        inspect(t, policy);
        env.realize_step(rng, &mut values);
        let feedback = match policy.mode() {
            FeedbackMode::BestProbe => best_probe(&values, &plan.exploit, Direction::MaxReward)?,
            FeedbackMode::AllProbe => all_probe(&values, &plan.probes())?,
        };
        let played = match &feedback {
            ProbeFeedback::Best(i) => *i,
            ProbeFeedback::AllValues(_) => {
                let cands: Vec<(usize, f64)> = plan.exploit.iter().map(|&i| (i, values[i])).collect();
                best_of(&cands, Direction::MaxReward)?
            }
        };
        let expected = env.expected_max(&plan.exploit)?;
        regret += benchmark.charge(expected);
        let obs = Observation {
            feedback,
            played,
            reward: values[played],
        };
        let detail = rec.detailed().then(|| StepRecord {
            t,
            probed: plan.exploit.iter().map(|&i| Choice::Index(i)).collect(),
            explored: plan.explore.iter().map(|&i| Choice::Index(i)).collect(),
            feedback: Some(obs.feedback.clone()),
            played: Choice::Index(played),
            value: obs.reward,
            expected: Some(expected),
            regret,
        });
        rec.record(t, regret, detail);
        policy.observe(t, &plan, &obs)?;
    }
    Ok(regret)
}

pub fn build_stochastic(arms: &ArmSpec) -> Result<StochasticEnv> {
    match arms {
        ArmSpec::Bernoulli { means } => StochasticEnv::bernoulli(means),
        ArmSpec::Discrete { arms } => StochasticEnv::independent(arms.clone()),
        ArmSpec::Joint { joint } => StochasticEnv::joint(joint.clone()),
        ArmSpec::Tight { n, delta } => StochasticEnv::tight(TightInstance::new(*n, *delta)?),
    }
}

/// `max_i mu_i` or `max_{i<j} E[max(X_i, X_j)]`.
pub fn baseline(env: &StochasticEnv, benchmark: Benchmark) -> Result<Baseline> {
    match benchmark {
        Benchmark::BestArm => Ok(Baseline::signed(env.best_mean())),
        Benchmark::BestArmClipped => Ok(Baseline {
            value: env.best_mean(),
            clipped: true,
        }),
        Benchmark::BestPair => {
            let n = env.arms();
            let mut best = env.best_mean();
            for i in 0..n {
                for j in i + 1..n {
                    best = best.max(env.expected_max(&[i, j])?);
                }
            }
            Ok(Baseline::signed(best))
        }
    }
}

/// The loss stream and corruption schedule replication `rep` sees.
pub fn build_adversarial(
    cfg: &ExperimentConfig,
    rep: usize,
) -> Result<(AdversarialStream, CorruptionSchedule)> {
    let EnvSpec::Adversarial { dim, generator, corruption, .. } = &cfg.env else {
        return Err(Error::Incompatible("not an adversarial environment".into()));
    };
    let schedule = match corruption {
        Some(c) => CorruptionSchedule::generate(
            c.budget,
            c.placement,
            cfg.horizon,
            derive(cfg.seed, rep as u64, streams::CORRUPTION),
        ),
        None => CorruptionSchedule::none(),
    };
    let stream = AdversarialStream::new(
        generator,
        *dim,
        cfg.horizon,
        derive(cfg.seed, rep as u64, streams::ENV),
        Some(&schedule),
    )?;
    Ok((stream, schedule))
}

fn linear_options(cfg: &ExperimentConfig) -> Result<OptionSet> {
    match &cfg.env {
        EnvSpec::Adversarial { options: Some(o), .. } => Ok(o.clone()),
        EnvSpec::Adversarial { dim, .. } => OptionSet::simplex(*dim),
        _ => Err(Error::Incompatible("not an adversarial environment".into())),
    }
}

/// Budget the imperfect-hint policy is tuned for: the corruption budget when
/// one is configured, else `params.budget`.
fn hint_budget(cfg: &ExperimentConfig) -> u64 {
    match &cfg.env {
        EnvSpec::Adversarial { corruption: Some(c), .. } => c.budget,
        _ => cfg.params.budget,
    }
}

/// Runs replication `rep` of `cfg`, feeding every step to `rec`. Returns the
/// final regret.
pub fn run_replication<Rec: Recorder>(
    cfg: &ExperimentConfig,
    rep: usize,
    rec: &mut Rec,
) -> Result<f64> {
    cfg.validate()?;
    let mut policy_rng = rng_for(cfg.seed, rep as u64, streams::POLICY);
    let eta = cfg.params.eta;
    match &cfg.env {
        EnvSpec::Adversarial { .. } => {
            let (stream, schedule) = build_adversarial(cfg, rep)?;
            let options = linear_options(cfg)?;
            let n = options.dim();
            match cfg.policy {
                PolicyKind::Lwc => drive_linear(
                    &mut Lwc::new(options, eta)?,
                    &stream,
                    &schedule,
                    &mut policy_rng,
                    rec,
                ),
                PolicyKind::LwcImperfect => drive_linear(
                    &mut LwcImperfect::for_budget(options, hint_budget(cfg))?,
                    &stream,
                    &schedule,
                    &mut policy_rng,
                    rec,
                ),
                PolicyKind::Hedge => drive_linear(
                    &mut Hedge::new(n, eta)?,
                    &stream,
                    &schedule,
                    &mut policy_rng,
                    rec,
                ),
                PolicyKind::Hwc => drive_linear(
                    &mut Hwc::new(n, eta)?,
                    &stream,
                    &schedule,
                    &mut policy_rng,
                    rec,
                ),
                PolicyKind::Btrl => {
                    drive_btrl(&mut Btrl::new(options, eta, &mut policy_rng)?, &stream, rec)
                }
                _ => unreachable!("validated policy family"),
            }
        }
        EnvSpec::Convex { domain, losses, solver } => {
            let mut policy = Cwc::new(domain.clone(), &cfg.params, *solver)?;
            let mut env_rng = rng_for(cfg.seed, rep as u64, streams::ENV);
            let centers = convex_centers(domain, losses, &mut env_rng)?;
            drive_convex(&mut policy, cfg.horizon, centers, solver, &mut policy_rng, rec)
        }
        EnvSpec::Stochastic { arms, benchmark } => {
            let env = build_stochastic(arms)?;
            let best = baseline(&env, *benchmark)?;
            let mut env_rng = rng_for(cfg.seed, rep as u64, streams::ENV);
            let n = env.arms();
            let t = cfg.horizon;
            match cfg.policy {
                PolicyKind::MetaUcbv => {
                    drive_bandit(&mut MetaUcbv::new(n)?, &env, best, t, &mut env_rng, rec, |_, _| {})
                }
                PolicyKind::ExploreExploit => drive_bandit(
                    &mut ExploreExploit::new(n, cfg.params.epsilon)?,
                    &env,
                    best,
                    t,
                    &mut env_rng,
                    rec,
                    |_, _| {},
                ),
                PolicyKind::CorrExploit => drive_bandit(
                    &mut CorrExploit::new(n)?,
                    &env,
                    best,
                    t,
                    &mut env_rng,
                    rec,
                    |_, _| {},
                ),
                PolicyKind::Ucb1TopTwo => drive_bandit(
                    &mut Ucb1TopTwo::new(n)?,
                    &env,
                    best,
                    t,
                    &mut env_rng,
                    rec,
                    |_, _| {},
                ),
                _ => unreachable!("validated policy family"),
            }
        }
    }
}

type CenterFn<'a> = Box<dyn FnMut(usize, &mut [f64]) + 'a>;

fn convex_centers<'a, R: Rng + ?Sized>(
    domain: &ConvexDomain,
    losses: &ConvexLosses,
    rng: &'a mut R,
) -> Result<CenterFn<'a>> {
    match losses {
        ConvexLosses::Fixed { center } => {
            if center.len() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    got: center.len(),
                });
            }
            let center = center.clone();
            Ok(Box::new(move |_, out: &mut [f64]| out.copy_from_slice(&center)))
        }
        ConvexLosses::Random { radius } => {
            if !(*radius >= 0.0 && radius.is_finite()) {
                return Err(Error::param("radius", "must be nonnegative and finite"));
            }
            let r = *radius;
            Ok(Box::new(move |_, out: &mut [f64]| {
                for x in out.iter_mut() {
                    *x = if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
                }
            }))
        }
    }
}

/// Full trace of replication 0.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Trace> {
    let objective = match cfg.policy.family() {
        super::config::Family::Bandit => Objective::Reward,
        _ => Objective::Loss,
    };
    let arms = match &cfg.env {
        EnvSpec::Stochastic { arms, .. } => Some(build_stochastic(arms)?.arms()),
        _ => None,
    };
    let mut trace = Trace::new(objective, arms);
    run_replication(cfg, 0, &mut trace)?;
    Ok(trace)
}

/// Log-spaced grid of about `points` steps in `1..=horizon`, always
/// containing `extra` and the horizon.
pub fn curve_grid(horizon: usize, points: usize, extra: &[usize]) -> Vec<usize> {
    let mut grid: Vec<usize> = extra.iter().copied().filter(|&t| t >= 1 && t <= horizon).collect();
    grid.push(horizon);
    if points > 1 && horizon > 1 {
        let top = (horizon as f64).ln();
        for k in 0..points {
            let t = (top * k as f64 / (points - 1) as f64).exp().round() as usize;
            grid.push(t.clamp(1, horizon));
        }
    }
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Grid points on a regret curve: the checkpoints, plus log-spaced points
/// when a curve is requested.
pub fn grid_for(cfg: &ExperimentConfig) -> Vec<usize> {
    let points = if cfg.emit_curve { 200 } else { 0 };
    curve_grid(cfg.horizon, points, &cfg.checkpoints_in_horizon())
}

/// Outcome of one replication on the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub rep: usize,
    pub final_regret: f64,
    /// Running regret at each grid step.
    pub curve: Vec<f64>,
}

pub fn run_on_grid(cfg: &ExperimentConfig, rep: usize, grid: &[usize]) -> Result<Replication> {
    let mut curve = RegretCurve::new(grid.to_vec());
    let final_regret = run_replication(cfg, rep, &mut curve)?;
    Ok(Replication {
        rep,
        final_regret,
        curve: curve.values().to_vec(),
    })
}

/// Runs all replications in parallel. The result does not depend on thread
/// scheduling.
pub fn replicate(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let grid = grid_for(cfg);
    let reps = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_on_grid(cfg, r, &grid))
        .collect::<Result<Vec<_>>>()?;
    Report::build(cfg, &grid, &reps)
}

pub fn replicate_serial(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let grid = grid_for(cfg);
    let reps = (0..cfg.replications)
        .map(|r| run_on_grid(cfg, r, &grid))
        .collect::<Result<Vec<_>>>()?;
    Report::build(cfg, &grid, &reps)
}
