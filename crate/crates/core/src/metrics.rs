//! Paired comparison of two configurations over the same instances.
//!
//! For instance `r` with final objectives `a_r` and `b_r` the gap is
//! `(a_r - b_r) / b_r`. When `a_r < b_r` the speed-up is the time `a` needed
//! to reach `b_r` divided by the total time of `b`, and symmetrically when
//! `b_r < a_r`. Reaching times are interpolated linearly on the iteration log.
//! Ties count as a speed-up of 1.

use alloc::vec::Vec;

use thiserror::Error;

use crate::cg::{CgRun, Termination};

/// Relative difference below which two final objectives tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TimeAxis {
    /// Logged wall-clock milliseconds.
    #[default]
    Wall,
    /// Iteration index, for runs on a frozen clock.
    Iterations,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("{a} runs for the first configuration but {b} for the second")]
    Mismatch { a: usize, b: usize },
    #[error("no runs to compare")]
    Empty,
    #[error("run {0} has an empty iteration log")]
    EmptyLog(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Winner {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceComparison {
    pub objective_a: f64,
    pub objective_b: f64,
    pub gap: f64,
    pub winner: Winner,
    /// Time for the winner to reach the loser's final objective over the
    /// loser's total time. `None` if the loser's total time is zero.
    pub speedup: Option<f64>,
    pub iterations_a: usize,
    pub iterations_b: usize,
    pub reason_a: Termination,
    pub reason_b: Termination,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub instances: Vec<InstanceComparison>,
    pub obj_gap: f64,
    pub a_better: usize,
    pub b_better: usize,
    pub ties: usize,
    /// Mean speed-up over instances `a` wins.
    pub speedup_a_better: Option<f64>,
    /// Mean speed-up over instances `b` wins.
    pub speedup_b_better: Option<f64>,
    /// Mean over every instance with a defined speed-up, ties included.
    pub speedup: Option<f64>,
    pub mean_iterations_a: f64,
    pub mean_iterations_b: f64,
    pub mean_pricing_ms_a: f64,
    pub mean_pricing_ms_b: f64,
    pub mean_iteration_ms_a: f64,
    pub mean_iteration_ms_b: f64,
    /// Mean best reduced cost per iteration over the runs that priced at it.
    pub rc_series: Vec<RcPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RcPoint {
    pub iter: usize,
    pub mean_rc_a: Option<f64>,
    pub mean_rc_b: Option<f64>,
}

/// Number of iterations that ran pricing.
pub fn pricing_rounds(run: &CgRun) -> usize {
    match run.reason {
        Termination::PricedOut => run.iterations.len(),
        _ => run.iterations.len().saturating_sub(1),
    }
}

fn time_at(run: &CgRun, k: usize, axis: TimeAxis) -> f64 {
    match axis {
        TimeAxis::Wall => run.iterations[k].wall_ms,
        TimeAxis::Iterations => k as f64,
    }
}

/// Total time of a run on the given axis.
pub fn total_time(run: &CgRun, axis: TimeAxis) -> f64 {
    run.iterations
        .len()
        .checked_sub(1)
        .map_or(0.0, |k| time_at(run, k, axis))
}

/// First time the objective reaches `target`, interpolating linearly between
/// logged iterations. `None` if it never does.
pub fn time_to_reach(run: &CgRun, target: f64, axis: TimeAxis) -> Option<f64> {
    let logs = &run.iterations;
    let slack = TIE_TOLERANCE * target.abs().max(1.0);
    let k = logs.iter().position(|l| l.objective <= target + slack)?;
    if k == 0 {
        return Some(time_at(run, 0, axis));
    }
    let (o0, o1) = (logs[k - 1].objective, logs[k].objective);
    let (t0, t1) = (time_at(run, k - 1, axis), time_at(run, k, axis));
    let frac = if o0 > o1 {
        ((o0 - target) / (o0 - o1)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(t0 + frac * (t1 - t0))
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn compare_one(a: &CgRun, b: &CgRun, axis: TimeAxis) -> InstanceComparison {
    let (oa, ob) = (a.final_objective, b.final_objective);
    let winner = if (oa - ob).abs() <= TIE_TOLERANCE * ob.abs().max(1.0) {
        Winner::Tie
    } else if oa < ob {
        Winner::A
    } else {
        Winner::B
    };
    let speedup = match winner {
        Winner::Tie => Some(1.0),
        Winner::A => time_to_reach(a, ob, axis).and_then(|t| ratio(t, total_time(b, axis))),
        Winner::B => time_to_reach(b, oa, axis).and_then(|t| ratio(t, total_time(a, axis))),
    };
    InstanceComparison {
        objective_a: oa,
        objective_b: ob,
        gap: (oa - ob) / ob,
        winner,
        speedup,
        iterations_a: pricing_rounds(a),
        iterations_b: pricing_rounds(b),
        reason_a: a.reason,
        reason_b: b.reason,
    }
}

fn mean_pricing_ms(runs: &[CgRun]) -> f64 {
    mean(
        runs.iter()
            .flat_map(|r| r.iterations[..pricing_rounds(r)].iter().map(|l| l.pricing_ms)),
    )
    .unwrap_or(0.0)
}

fn mean_iteration_ms(runs: &[CgRun]) -> f64 {
    mean(
        runs.iter()
            .filter(|r| pricing_rounds(r) > 0)
            .map(|r| r.wall_ms() / pricing_rounds(r) as f64),
    )
    .unwrap_or(0.0)
}

fn mean_rc_at(runs: &[CgRun], k: usize) -> Option<f64> {
    mean(runs.iter().filter_map(|r| r.iterations.get(k).and_then(|l| l.best_rc)))
}

/// Compares run `r` of `a` with run `r` of `b` for every `r`.
pub fn compare(a: &[CgRun], b: &[CgRun], axis: TimeAxis) -> Result<Comparison, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::Mismatch { a: a.len(), b: b.len() });
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some(r) = a
        .iter()
        .zip(b)
        .position(|(x, y)| x.iterations.is_empty() || y.iterations.is_empty())
    {
        return Err(MetricsError::EmptyLog(r));
    }
    let instances: Vec<InstanceComparison> = a.iter().zip(b).map(|(x, y)| compare_one(x, y, axis)).collect();
    let count = |w: Winner| instances.iter().filter(|c| c.winner == w).count();
    let speedups = |w: Winner| mean(instances.iter().filter(|c| c.winner == w).filter_map(|c| c.speedup));
    let horizon = a.iter().chain(b).map(|r| r.iterations.len()).max().unwrap_or(0);
    let n = instances.len() as f64;
    Ok(Comparison {
        obj_gap: instances.iter().map(|c| c.gap).sum::<f64>() / n,
        a_better: count(Winner::A),
        b_better: count(Winner::B),
        ties: count(Winner::Tie),
        speedup_a_better: speedups(Winner::A),
        speedup_b_better: speedups(Winner::B),
        speedup: mean(instances.iter().filter_map(|c| c.speedup)),
        mean_iterations_a: instances.iter().map(|c| c.iterations_a as f64).sum::<f64>() / n,
        mean_iterations_b: instances.iter().map(|c| c.iterations_b as f64).sum::<f64>() / n,
        mean_pricing_ms_a: mean_pricing_ms(a),
        mean_pricing_ms_b: mean_pricing_ms(b),
        mean_iteration_ms_a: mean_iteration_ms(a),
        mean_iteration_ms_b: mean_iteration_ms(b),
        rc_series: (0..horizon)
            .map(|k| RcPoint {
                iter: k,
                mean_rc_a: mean_rc_at(a, k),
                mean_rc_b: mean_rc_at(b, k),
            })
            .collect(),
        instances,
    })
}
