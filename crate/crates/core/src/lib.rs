//! Finite normal-form games, equilibrium verification and decentralized
//! learning dynamics, with a parallel interference channel as the test
//! bench.
//!
//! - [`game`]: games, mixed strategies, joint distributions, play histories.
//! - [`equilibria`]: PNE, ε-NE, CE and CCE checks.
//! - [`learners`]: BRD, FP, SFP, RM, RL and JUSTE-RL.
//! - [`dynamics`]: repeated play and steady-state detection.
//! - [`wireless`]: the channel-selection game on an interference channel.
//! - [`harness`]: seeded Monte-Carlo sweeps and trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod harness;
pub mod learners;
pub mod seed;
pub mod wireless;

pub use error::{Error, Result};
pub use game::{JointDistribution, MixedProfile, MixedStrategy, NormalFormGame, PlayHistory};
