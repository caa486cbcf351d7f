//! View-change-aware committee configuration for parallel BFT networks.
//!
//! Nodes are partitioned into committees, each with one leader talking to
//! a shared verification committee. The crate chooses that partition and a
//! backup leader per committee so that normal-case delay plus the expected
//! delay after a single leader failure is minimal:
//!
//! - [`objective`]: evaluators for every delay term,
//! - [`oracle`]: brute-force enumeration used as ground truth,
//! - [`benders`]: the exact decomposition solver (with [`lp`] and the
//!   branch-and-bound [`master`]),
//! - [`sequencer`]: backup selection as views advance,
//! - [`sim`]: a deterministic discrete-event simulator of the network.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod benders;
pub mod config;
pub mod instance;
pub mod lp;
pub mod master;
pub mod objective;
pub mod oracle;
pub mod sequencer;
pub mod sim;

pub use benders::{solve_normal_case, solve_vco, BendersError, SolveOptions, Solution};
pub use config::{BackupPlan, Committee, Configuration, Violation};
pub use instance::{Instance, InstanceError};
pub use objective::ModelError;

/// Node index in `0..n`.
pub type NodeId = usize;

/// Absolute tolerance for objective comparisons and tie-breaking.
pub const OBJ_TOL: f64 = 1e-9;
