//! Information utilization ratio (IUR) laboratory.
//!
//! The crate prices the decisions heuristic optimizers make in bits of
//! entropy and compares them with the bits their evaluations acquire:
//!
//! * [`entropy`]: discrete entropy, the record-indicator entropy `pi(g)` and
//!   log-combinatorics;
//! * [`iur`]: closed-form ratios for eight optimizers, the comparison-based
//!   upper bound and the event ledger;
//! * [`exact`]: a brute-force enumeration of tiny finite problems that computes
//!   the ratio straight from its entropy definition;
//! * [`algorithms`]: the optimizers themselves, emitting ledger events;
//! * [`benchmarks`]: a 28-function CEC-2013-style suite;
//! * [`experiments`]: seeded multi-run protocols, rankings and rank-sum tests.

pub mod algorithms;
pub mod benchmarks;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod iur;
pub mod problem;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use problem::{ObjectiveProblem, SearchSpace, Solution};
pub use rng::{seeded_rng, SeededRng};
pub use trace::{DecisionEvent, EventKind, RunTrace};
