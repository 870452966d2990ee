//! Domain types shared by every policy: noise samplers, running statistics,
//! option sets, traces and regret accounting.

pub mod noise;
pub mod options;
pub mod params;
pub mod regret;
pub mod stats;
pub mod trace;

pub use noise::{sample_gamma_vector, sample_gumbel, sample_laplace};
pub use options::{argmax_index, argmin_index, dot, CumulativeLoss, OptionId, OptionSet};
pub use params::AlgoParams;
pub use regret::{pseudo_regret_mab, regret_linear};
pub use stats::{update_stats, Moments, SampleStats};
pub use trace::{Choice, Objective, Recorder, RegretCurve, StepRecord, Trace};
