//! File formats, threaded execution and reporting around [`vrptw_cg_core`].
//!
//! * [`json`]: instance and dual vector JSON.
//! * [`hmap`]: the binary `HMAP` matrix format used for probability matrices
//!   and pricing weights.
//! * [`solomon`]: Solomon / Gehring-Homberger benchmark text files.
//! * [`export`]: training-set export for an external heat map model.
//! * [`parallel`]: an OS-thread executor and a wall clock.
//! * [`heat`]: per-iteration heat maps read from a directory.
//! * [`report`]: CSV iteration logs and comparison reports.
//! * [`driver`]: the work behind each subcommand.

pub mod driver;
pub mod export;
pub mod heat;
pub mod hmap;
pub mod json;
pub mod parallel;
pub mod report;
pub mod solomon;

pub use vrptw_cg_core as core;
