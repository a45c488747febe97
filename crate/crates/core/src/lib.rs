//! Simulator and optimizer for a UAV-mounted multicast base station that
//! serves layered media via adaptive random network coding.
//!
//! The crate is organized around the experiment pipeline:
//!
//! - [`channel`]: UAV/user geometry to SNR, bit error rate and packet error
//!   rate, for a line-of-sight link with BPSK modulation.
//! - [`gf256`] and [`coding`]: GF(2^8) arithmetic, generator-based encoding,
//!   per-user reception records and decodable-prefix computation.
//! - [`scheduler`]: the per-slot scheduling layer — expected immediate reward,
//!   greedy action selection, episode simulation and an exact enumeration
//!   oracle for small instances.
//! - [`analytics`]: closed-form decode probabilities and the per-user
//!   fairness feasibility test.
//! - [`baselines`]: RNC, ARQ and round-robin comparison schemes sharing the
//!   same episode engine.
//! - [`placement`]: constrained particle swarm optimization of the hover
//!   position, plus an exhaustive grid search.
//! - [`scenario`]: scenario generation, Monte Carlo estimation and parameter
//!   sweeps with fully deterministic seeding.
//! - [`config`] and [`report`]: experiment configuration and CSV/JSON output.
//!
//! All randomness flows through labeled [`seed::SeedTree`] substreams, so any
//! experiment re-run with the same master seed produces byte-identical output
//! regardless of worker count.

pub mod analytics;
pub mod baselines;
pub mod channel;
pub mod coding;
pub mod config;
pub mod error;
pub mod exec;
pub mod gf256;
pub mod placement;
pub mod report;
pub mod scenario;
pub mod scheduler;
pub mod seed;

pub use error::{Error, Result};
