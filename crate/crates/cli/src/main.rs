use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use vrptw_cg::driver::{self, RunOptions};
use vrptw_cg::export::export_training_set;
use vrptw_cg::{json, report};
use vrptw_cg_core::cg::{CgConfig, HeatMapSource, Strategy};
use vrptw_cg_core::generate::{generate_instance, GenConfig};
use vrptw_cg_core::metrics::TimeAxis;

#[derive(Parser)]
#[command(name = "vrptw-cg", version, about = "Column generation for the C-VRPTW root LP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Ulgr,
    Be2,
    None,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Ulgr => Strategy::Ulgr,
            StrategyArg::Be2 => Strategy::Be2,
            StrategyArg::None => Strategy::NoReduction,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Wall,
    Iterations,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance, or a training set with --count.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Instance JSON file, or the training-set directory with --count.
        #[arg(long)]
        out: PathBuf,
        /// Write this many samples (instance.json, duals.json, q.bin each).
        #[arg(long, num_args = 0..=1, default_missing_value = "5000")]
        count: Option<usize>,
        /// Vehicle capacity. Defaults to 50, or 80 from 1000 customers up.
        #[arg(long)]
        capacity: Option<f64>,
    },
    /// Solve the root LP of one instance and write the iteration log.
    #[command(group(ArgGroup::new("heat").args(["heatmap", "surrogate"])))]
    #[command(group(ArgGroup::new("budget").args(["time_limit", "iter_limit"])))]
    Solve {
        /// Instance JSON, or a Solomon text file.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Directory of per-iteration HMAP probability matrices.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        /// Surrogate heat map temperature.
        #[arg(long)]
        surrogate: Option<f64>,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        iter_limit: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV iteration log.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Base configuration JSON; the flags above override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replace pricing time limits by this many node expansions per worker.
        #[arg(long)]
        expansions: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Full run as JSON, including columns and duals.
        #[arg(long)]
        run_json: Option<PathBuf>,
    },
    /// Solve every instance in a directory under two configurations.
    Compare {
        #[arg(long)]
        instances: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Per-instance CSV; `<stem>_summary.csv` and `<stem>_rc.csv` go next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Time axis for speed-ups. `iterations` also freezes the clock.
        #[arg(long, value_enum, default_value = "wall")]
        axis: AxisArg,
    },
    /// Check the pricing heuristic against exhaustive enumeration.
    OracleCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("compare");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn generate(n: usize, seed: u64, out: &Path, count: Option<usize>, capacity: Option<f64>) -> Result<()> {
    if n == 0 {
        bail!("n must be positive");
    }
    let mut cfg = GenConfig::for_size(n, seed);
    if let Some(c) = capacity {
        cfg.capacity = c;
    }
    match count {
        Some(count) => {
            let dirs = export_training_set(count, &cfg, out)?;
            println!("wrote {} samples to {}", dirs.len(), out.display());
        }
        None => {
            json::write_instance(out, &generate_instance(&cfg))?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    instance: &Path,
    strategy: Option<StrategyArg>,
    heatmap: Option<PathBuf>,
    surrogate: Option<f64>,
    time_limit: Option<f64>,
    iter_limit: Option<usize>,
    seed: u64,
    log: Option<PathBuf>,
    config: Option<PathBuf>,
    expansions: Option<u64>,
    threads: usize,
    run_json: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = match &config {
        Some(path) => driver::read_config(path)?,
        None => CgConfig::new(Strategy::Ulgr),
    };
    if let Some(s) = strategy {
        cfg.strategy = s.into();
    } else if config.is_none() {
        bail!("--strategy is required without --config");
    }
    if let Some(dir) = heatmap {
        let fallback_temperature = match cfg.heat_map {
            HeatMapSource::Surrogate { temperature } => temperature,
            HeatMapSource::Directory {
                fallback_temperature, ..
            } => fallback_temperature,
        };
        cfg.heat_map = HeatMapSource::Directory {
            path: dir.to_string_lossy().into_owned(),
            fallback_temperature,
        };
    }
    if let Some(temperature) = surrogate {
        cfg.heat_map = HeatMapSource::Surrogate { temperature };
    }
    if let Some(t) = time_limit {
        cfg.time_limit = Some(t);
        cfg.iter_limit = None;
    }
    if let Some(k) = iter_limit {
        cfg.iter_limit = Some(k);
        cfg.time_limit = None;
    }
    if let Some(e) = expansions {
        cfg.dp = cfg.dp.with_expansions(e);
        cfg.construction = cfg.construction.with_expansions(e);
    }
    cfg.seed = seed;

    let inst = driver::load_instance(instance)?;
    let run = driver::solve(
        &inst,
        &cfg,
        RunOptions {
            threads,
            wall_clock: true,
        },
    )?;
    if let Some(path) = log {
        report::write_log(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            &run,
        )?;
    }
    if let Some(path) = run_json {
        fs::write(&path, serde_json::to_string(&run)?)?;
    }
    println!(
        "objective {} after {} iterations ({:?}, {:.0} ms, {} columns)",
        run.final_objective,
        run.iterations.len(),
        run.reason,
        run.wall_ms(),
        run.columns.len()
    );
    Ok(())
}

fn compare(instances: &Path, a: &Path, b: &Path, out: &Path, threads: usize, axis: AxisArg) -> Result<()> {
    let cfg_a = driver::read_config(a)?;
    let cfg_b = driver::read_config(b)?;
    let loaded = driver::instance_files(instances)?
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            driver::load_instance(&p).map(|inst| (name, inst))
        })
        .collect::<Result<Vec<_>>>()?;
    let (axis, wall_clock) = match axis {
        AxisArg::Wall => (TimeAxis::Wall, true),
        AxisArg::Iterations => (TimeAxis::Iterations, false),
    };
    let res = driver::compare(&loaded, &cfg_a, &cfg_b, RunOptions { threads, wall_clock }, axis)?;
    let c = &res.comparison;
    report::write_instances(File::create(out)?, &res.names, c)?;
    report::write_summary(File::create(sibling(out, "summary"))?, c)?;
    report::write_rc_series(File::create(sibling(out, "rc"))?, c)?;
    println!(
        "obj_gap {:.4}%  a better {}/{}  speed-up (a better) {:?}  speed-up (b better) {:?}",
        100.0 * c.obj_gap,
        c.a_better,
        c.instances.len(),
        c.speedup_a_better,
        c.speedup_b_better
    );
    Ok(())
}

fn oracle_check(n: usize, trials: usize, seed: u64) -> Result<bool> {
    let results = driver::oracle_check(n, trials, seed)?;
    let mut failures = 0;
    for t in &results {
        let verdict = if t.ok() { "ok" } else { "MISMATCH" };
        failures += usize::from(!t.ok());
        println!(
            "seed {:>6}  oracle {:>12.6}  exhaustive {:>12.6}  heuristic {:>12.6}  {verdict}",
            t.seed, t.oracle, t.exhaustive, t.heuristic
        );
    }
    println!("{}/{} trials agree", results.len() - failures, results.len());
    Ok(failures == 0)
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Generate {
            n,
            seed,
            out,
            count,
            capacity,
        } => generate(n, seed, &out, count, capacity).map(|_| true),
        Command::Solve {
            instance,
            strategy,
            heatmap,
            surrogate,
            time_limit,
            iter_limit,
            seed,
            log,
            config,
            expansions,
            threads,
            run_json,
        } => solve(
            &instance, strategy, heatmap, surrogate, time_limit, iter_limit, seed, log, config, expansions, threads,
            run_json,
        )
        .map(|_| true),
        Command::Compare {
            instances,
            a,
            b,
            out,
            threads,
            axis,
        } => compare(&instances, &a, &b, &out, threads, axis).map(|_| true),
        Command::OracleCheck { n, trials, seed } => oracle_check(n, trials, seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
