//! Simulation framework for two-player decentralized cooperative Stackelberg
//! bandit games with an omniscient, best-responding follower.
//!
//! The crate provides:
//! - [`geometry`]: vector primitives, projections and greedy epsilon-nets on
//!   spheres and spherical caps;
//! - [`envs`]: five game environments with closed-form follower best
//!   responses, plus a brute-force grid oracle used for verification;
//! - [`algorithms`]: leader policies (finite UCB, linear UCB, covering-based
//!   play, imitation, expert-guided exploration, explore-then-commit on
//!   response observations, and the optimism-failure pair);
//! - [`harness`]: seeded episode runner, regret accounting, multi-seed
//!   aggregation and scaling-exponent fits;
//! - [`experiments`]: named experiment presets;
//! - [`cli`]: flag/config parsing and CSV/JSON output for the binary.

pub mod algorithms;
pub mod cli;
pub mod envs;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod harness;
pub mod rng;

pub use error::{Error, Result};
