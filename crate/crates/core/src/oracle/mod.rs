//! Exact computations over finite distributions, used as test oracles for
//! the probabilistic inequalities the policies rely on.

pub mod dist;
pub mod exact;
pub mod sweeps;
pub mod tails;

pub use dist::{DiscreteDistribution, JointDistribution};
pub use exact::{
    chernoff_bound, dp_ratio, expect, expect_max, expect_min_two_iid, expect_mixed_min,
    gain_exact, max_distribution, meta_stats, pair_summaries, variance, ChernoffRegime,
};
pub use sweeps::{counterexample, Counterexample, SweepOutcome};
pub use tails::{tail_bound, tail_violation_rate, tail_violation_rates, TailEstimate, TailEvent};
