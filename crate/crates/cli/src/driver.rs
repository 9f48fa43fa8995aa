//! What the subcommands do, callable without going through the binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use vrptw_cg_core::cg::{self, CgConfig, CgError, CgRun, HeatMapSource, HeuristicPricer, Surrogate};
use vrptw_cg_core::exec::{Clock, Frozen};
use vrptw_cg_core::generate::{generate_instance, sample_duals, GenConfig};
use vrptw_cg_core::instance::build_pricing;
use vrptw_cg_core::metrics::{self, Comparison, TimeAxis};
use vrptw_cg_core::pricing::{dp_price, exact_oracle, DpParams, ORACLE_MAX_CUSTOMERS};
use vrptw_cg_core::reduction::no_reduction;
use vrptw_cg_core::VrptwInstance;

use crate::heat::DirectoryHeat;
use crate::parallel::{Threaded, WallClock};
use crate::{json, solomon};

/// Reads instance JSON, or a Solomon text file for any other extension.
pub fn load_instance(path: &Path) -> Result<VrptwInstance> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        return json::read_instance(path).with_context(|| format!("reading {}", path.display()));
    }
    let raw = solomon::parse(path).with_context(|| format!("parsing {}", path.display()))?;
    Ok(solomon::normalize(&raw)?.0)
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub threads: usize,
    /// Use real time for `time_limit`, pricing limits and the log. Otherwise
    /// the clock is frozen and only iteration and expansion budgets apply.
    pub wall_clock: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            wall_clock: true,
        }
    }
}

fn run_with<C: Clock>(inst: &VrptwInstance, cfg: &CgConfig, threads: usize, clock: &C) -> Result<CgRun, CgError> {
    let mut pricer = HeuristicPricer::new(cfg, Threaded::new(threads), clock);
    match &cfg.heat_map {
        HeatMapSource::Surrogate { temperature } => cg::run(
            inst,
            cfg,
            &mut Surrogate {
                temperature: *temperature,
            },
            &mut pricer,
            clock,
        ),
        HeatMapSource::Directory {
            path,
            fallback_temperature,
        } => {
            let mut heat = DirectoryHeat::new(Path::new(path), *fallback_temperature)?;
            cg::run(inst, cfg, &mut heat, &mut pricer, clock)
        }
    }
}

pub fn solve(inst: &VrptwInstance, cfg: &CgConfig, opts: RunOptions) -> Result<CgRun, CgError> {
    if opts.wall_clock {
        run_with(inst, cfg, opts.threads, &WallClock::new())
    } else {
        run_with(inst, cfg, opts.threads, &Frozen)
    }
}

/// Instance files in a directory, sorted by name: `*.json` plus Solomon
/// `*.txt` / `*.vrp`.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| ["json", "txt", "vrp"].contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no instance files in {}", dir.display());
    }
    Ok(files)
}

pub struct CompareOutput {
    pub names: Vec<String>,
    pub runs_a: Vec<CgRun>,
    pub runs_b: Vec<CgRun>,
    pub comparison: Comparison,
}

/// Solves every instance under both configurations and compares them.
pub fn compare(
    instances: &[(String, VrptwInstance)],
    a: &CgConfig,
    b: &CgConfig,
    opts: RunOptions,
    axis: TimeAxis,
) -> Result<CompareOutput> {
    let mut runs_a = Vec::new();
    let mut runs_b = Vec::new();
    for (name, inst) in instances {
        runs_a.push(solve(inst, a, opts).with_context(|| format!("{name} under configuration a"))?);
        runs_b.push(solve(inst, b, opts).with_context(|| format!("{name} under configuration b"))?);
    }
    let comparison = metrics::compare(&runs_a, &runs_b, axis)?;
    Ok(CompareOutput {
        names: instances.iter().map(|(n, _)| n.clone()).collect(),
        runs_a,
        runs_b,
        comparison,
    })
}

pub fn read_config(path: &Path) -> Result<CgConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: CgConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrial {
    pub seed: u64,
    pub oracle: f64,
    /// Exhaustive DFS without rollback or budgets. Must equal `oracle`.
    pub exhaustive: f64,
    /// Baseline heuristic, zero when it returns nothing. Must not beat `oracle`.
    pub heuristic: f64,
}

impl OracleTrial {
    pub fn ok(&self) -> bool {
        self.exhaustive == self.oracle && self.heuristic >= self.oracle
    }
}

/// Prices `trials` random instances of `n` customers three ways.
pub fn oracle_check(n: usize, trials: usize, seed: u64) -> Result<Vec<OracleTrial>> {
    if n == 0 || n > ORACLE_MAX_CUSTOMERS {
        bail!("n must lie in 1..={ORACLE_MAX_CUSTOMERS}");
    }
    let baseline = DpParams::baseline().with_expansions(10_000);
    (0..trials as u64)
        .map(|k| {
            let s = seed.wrapping_add(k);
            let inst = generate_instance(&GenConfig::for_size(n, s));
            let pricing = build_pricing(&inst, &sample_duals(&inst, s))?;
            let mask = no_reduction(&pricing);
            let oracle = exact_oracle(&pricing, &mask)?.reduced_cost;
            let best = |p: &DpParams| {
                dp_price(&pricing, &mask, p, s)
                    .best_reduced_cost()
                    .unwrap_or(0.0)
                    .min(0.0)
            };
            Ok(OracleTrial {
                seed: s,
                oracle,
                exhaustive: best(&DpParams::exhaustive()),
                heuristic: best(&baseline),
            })
        })
        .collect()
}
