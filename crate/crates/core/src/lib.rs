//! Column generation for the root-node LP relaxation of the capacitated VRP
//! with time windows.
//!
//! The restricted master problem is a set-covering LP over depot-to-depot
//! routes. Each iteration turns the master duals into an ESPPRC pricing
//! instance, shrinks its arc set with a [`reduction`] strategy and prices it
//! either with a depth-first DP heuristic ([`pricing`]) or with a
//! heat-map-guided exchange local search ([`local_search`]).
//!
//! The crate is `no_std` and only needs `alloc`. Anything that touches files,
//! OS threads or wall-clock time sits behind the [`exec::Executor`] and
//! [`exec::Clock`] traits and is supplied by the `vrptw-cg` companion crate.
//!
//! ```
//! use vrptw_cg_core::cg::{self, CgConfig, Strategy};
//! use vrptw_cg_core::generate::{generate_instance, GenConfig};
//!
//! let instance = generate_instance(&GenConfig::for_size(8, 7));
//! let mut cfg = CgConfig::new(Strategy::NoReduction);
//! cfg.iter_limit = Some(50);
//! let run = cg::run_sequential(&instance, &cfg).unwrap();
//! assert!(run.final_objective > 0.0);
//! ```
#![cfg_attr(not(test), no_std)]
// NaN must fail these checks, so `!(a < b)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod cg;
pub mod exec;
pub mod generate;
pub mod heatmap;
pub mod instance;
pub mod local_search;
pub mod matrix;
pub mod metrics;
pub mod pricing;
pub mod reduction;
pub mod rmp;
pub mod simplex;

pub use instance::{Column, Duals, PricingInstance, VrptwInstance};
pub use matrix::Matrix;
