//! Environments and probe oracles.

pub mod adversarial;
pub mod probe;
pub mod stochastic;

pub use adversarial::{
    make_adversarial, read_stream_file, write_stream_file, AdversarialStream, CorruptionSchedule,
    Generator, Placement,
};
pub use probe::{all_probe, best_of, best_probe, best_probe_corrupted, Direction, ProbeFeedback};
pub use stochastic::{ArmLaw, StochasticEnv, TightInstance};
