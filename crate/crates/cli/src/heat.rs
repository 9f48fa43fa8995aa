//! Heat maps produced outside the solver, one file per iteration.

use std::path::{Path, PathBuf};

use vrptw_cg_core::cg::{CgError, HeatProvider, Surrogate};
use vrptw_cg_core::heatmap::ProbMatrix;
use vrptw_cg_core::PricingInstance;

use crate::hmap;

/// File name of the probability matrix for iteration `k`.
pub fn iteration_file(k: usize) -> String {
    format!("iter_{k:05}.hmap")
}

/// Reads `iter_00000.hmap`, `iter_00001.hmap`, ... from a directory and uses
/// the surrogate for iterations with no file.
#[derive(Debug, Clone)]
pub struct DirectoryHeat {
    dir: PathBuf,
    fallback: Surrogate,
    /// Iterations served from files so far.
    pub loaded: usize,
    /// Iterations served by the surrogate so far.
    pub fallbacks: usize,
}

impl DirectoryHeat {
    pub fn new(dir: &Path, fallback_temperature: f64) -> Result<Self, CgError> {
        if !dir.is_dir() {
            return Err(CgError::HeatSource(format!("{} is not a directory", dir.display())));
        }
        Ok(DirectoryHeat {
            dir: dir.to_path_buf(),
            fallback: Surrogate {
                temperature: fallback_temperature,
            },
            loaded: 0,
            fallbacks: 0,
        })
    }
}

impl HeatProvider for DirectoryHeat {
    fn probabilities(&mut self, iteration: usize, pricing: &PricingInstance<'_>) -> Result<ProbMatrix, CgError> {
        let path = self.dir.join(iteration_file(iteration));
        if !path.exists() {
            self.fallbacks += 1;
            return self.fallback.probabilities(iteration, pricing);
        }
        let t =
            hmap::load_t(&path, pricing.dim()).map_err(|e| CgError::HeatSource(format!("{}: {e}", path.display())))?;
        self.loaded += 1;
        Ok(t)
    }
}
