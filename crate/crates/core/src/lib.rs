//! Simulation of probe-augmented online learning and multi-armed bandits.
//!
//! Each step a policy may probe a small set of options before committing to
//! one. With only the identity of the best probe revealed, follow-the-leader
//! style algorithms reach regret independent of the horizon; with probed
//! values revealed, bandit policies can explore and exploit at the same time.
//!
//! - [`base`]: samplers, statistics, option sets, traces, regret accounting.
//! - [`env`]: stochastic arms, oblivious loss streams, probe oracles.
//! - [`linear`]: full-information policies (LwC, BtRL, HwC, CwC, Hedge).
//! - [`bandit`]: Meta UCB-V, explore-exploit and correlation-exploitation.
//! - [`oracle`]: exact enumeration over finite distributions and tail checks.
//! - [`harness`]: configs, seeded replication, reports and verification suites.

pub mod bandit;
pub mod base;
pub mod env;
pub mod error;
pub mod harness;
pub mod linear;
pub mod oracle;

pub use error::{Error, Result};
