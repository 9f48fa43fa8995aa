//! Seams for parallelism and wall-clock time.
//!
//! The core crate runs workers one after another and never reads a clock. The
//! std companion supplies a threaded [`Executor`] and a real [`Clock`].

use alloc::vec::Vec;

/// Runs `count` independent jobs and returns their outputs in index order.
pub trait Executor: Sync {
    fn map_indexed<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;

    /// True when job `k` always completes before job `k + 1` starts.
    fn is_sequential(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..count).map(job).collect()
    }

    fn is_sequential(&self) -> bool {
        true
    }
}

/// Monotone seconds since an arbitrary origin.
pub trait Clock: Sync {
    fn seconds(&self) -> f64;
}

/// A clock that never advances, so wall-clock limits never fire.
#[derive(Debug, Clone, Copy, Default)]
pub struct Frozen;

impl Clock for Frozen {
    fn seconds(&self) -> f64 {
        0.0
    }
}
