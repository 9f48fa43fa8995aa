//! Training samples for an external heat map model.
//!
//! Sample `k` lives in `sample_{k:05}/` and holds `instance.json`,
//! `duals.json` and `q.bin` (the pricing weights in `HMAP` layout). It is
//! generated from seed `base_seed + k`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use vrptw_cg_core::generate::{generate_instance, sample_duals_with_theta, GenConfig};
use vrptw_cg_core::instance::build_pricing;

use crate::{hmap, json};

pub const DEFAULT_COUNT: usize = 5000;

pub fn sample_dir(out: &Path, k: usize) -> PathBuf {
    out.join(format!("sample_{k:05}"))
}

/// Writes `count` samples and returns their directories.
pub fn export_training_set(count: usize, cfg: &GenConfig, out: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    (0..count)
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k as u64);
            let inst = generate_instance(&GenConfig { seed, ..cfg.clone() });
            let (duals, theta) = sample_duals_with_theta(&inst, seed);
            let pricing = build_pricing(&inst, &duals).expect("sampled duals match the instance");
            let dir = sample_dir(out, k);
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("instance.json"), json::instance_to_string(&inst))?;
            fs::write(dir.join("duals.json"), json::duals_to_string(&duals, Some(theta)))?;
            fs::write(dir.join("q.bin"), hmap::encode(pricing.weights()))?;
            Ok(dir)
        })
        .collect()
}
