//! Depth-first DP pricing heuristic and an exhaustive ESPPRC oracle.
//!
//! The heuristic starts one worker per customer `i` on the partial route
//! `depot -> i` and extends it depth-first along kept arcs in increasing
//! scaled length. Each worker stops at its first route with reduced cost at
//! or below the target, or when its budget runs out. The whole round stops
//! once `success_workers` workers reached the target or `max_workers` workers
//! have finished.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use thiserror::Error;

use crate::exec::{Clock, Executor, Frozen, Sequential};
use crate::instance::{check_feasible, Column, PricingInstance, DEPOT};
use crate::reduction::ReducedGraph;

/// Abandon a partial route whose reduced cost exceeds `threshold` once it has
/// used `fraction` of the capacity or of the depot horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rollback {
    pub fraction: f64,
    pub threshold: f64,
}

impl Default for Rollback {
    fn default() -> Self {
        Rollback {
            fraction: 0.75,
            threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DpParams {
    /// A worker stops at its first route priced at or below this.
    pub target: f64,
    /// Only routes priced strictly below this are returned.
    pub accept_below: f64,
    /// Wall-clock seconds per worker.
    pub time_limit: Option<f64>,
    /// Node extensions per worker. Unlike `time_limit` this keeps runs reproducible.
    pub max_expansions: Option<u64>,
    pub rollback: Option<Rollback>,
    pub success_workers: usize,
    pub max_workers: usize,
    /// Best routes remembered per worker.
    pub columns_per_worker: usize,
}

impl DpParams {
    /// Baseline pricing: target -1, 30 s, negative reduced costs only.
    pub fn baseline() -> Self {
        DpParams {
            target: -1.0,
            accept_below: 0.0,
            time_limit: Some(30.0),
            max_expansions: None,
            rollback: Some(Rollback::default()),
            success_workers: 20,
            max_workers: 100,
            columns_per_worker: 10,
        }
    }

    /// Seeds for local search: target -0.1, 5 s, reduced costs below 0.5.
    pub fn construction() -> Self {
        DpParams {
            target: -0.1,
            accept_below: 0.5,
            time_limit: Some(5.0),
            ..Self::baseline()
        }
    }

    /// Explores every elementary route: no target, no budget, no rollback.
    pub fn exhaustive() -> Self {
        DpParams {
            target: f64::NEG_INFINITY,
            accept_below: 0.0,
            time_limit: None,
            max_expansions: None,
            rollback: None,
            success_workers: usize::MAX,
            max_workers: usize::MAX,
            columns_per_worker: 10,
        }
    }

    /// Replaces the wall-clock limit with an expansion budget.
    pub fn with_expansions(mut self, expansions: u64) -> Self {
        self.time_limit = None;
        self.max_expansions = Some(expansions);
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if let Some(r) = self.rollback {
            if !(r.fraction > 0.0 && r.fraction < 1.0) {
                return Err(ParamError::RollbackFraction(r.fraction));
            }
        }
        if !(self.target < self.accept_below) {
            return Err(ParamError::TargetAboveAcceptance);
        }
        if self.columns_per_worker == 0 || self.max_workers == 0 || self.success_workers == 0 {
            return Err(ParamError::ZeroCount);
        }
        Ok(())
    }

    fn deterministic(&self) -> bool {
        self.time_limit.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("rollback fraction must lie in (0, 1), got {0}")]
    RollbackFraction(f64),
    #[error("target must be below the acceptance bound")]
    TargetAboveAcceptance,
    #[error("worker and column counts must be positive")]
    ZeroCount,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PricingStats {
    pub workers_launched: usize,
    pub workers_hit_target: usize,
    pub expansions: u64,
    /// Set when the result is the single-customer fallback of
    /// [`construct_initial`].
    pub fallback: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PricingResult {
    /// Distinct routes sorted by reduced cost, then sequence.
    pub columns: Vec<Column>,
    pub stats: PricingStats,
}

impl PricingResult {
    fn from_columns(mut columns: Vec<Column>, stats: PricingStats) -> Self {
        sort_and_dedup(&mut columns);
        PricingResult { columns, stats }
    }

    pub fn best_reduced_cost(&self) -> Option<f64> {
        self.columns.first().map(Column::reduced_cost)
    }

    /// Columns eligible for the master problem.
    pub fn admitted(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().filter(|c| c.reduced_cost() < 0.0)
    }
}

pub(crate) fn sort_and_dedup(columns: &mut Vec<Column>) {
    columns.sort_by(|a, b| {
        a.reduced_cost()
            .total_cmp(&b.reduced_cost())
            .then_with(|| a.sequence().cmp(b.sequence()))
    });
    columns.dedup_by(|a, b| a.sequence() == b.sequence());
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Outgoing kept, time-feasible arcs to customers, by increasing length.
/// Equal lengths are ordered by a key derived from the seed.
pub(crate) fn sorted_successors(pricing: &PricingInstance<'_>, mask: &ReducedGraph, seed: u64) -> Vec<Vec<usize>> {
    let n = pricing.dim();
    (0..n)
        .map(|i| {
            let mut out: Vec<usize> = (1..n)
                .filter(|&j| j != i && mask.keeps(i, j) && pricing.is_feasible(i, j))
                .collect();
            out.sort_by(|&a, &b| {
                pricing
                    .arc_length(i, a)
                    .total_cmp(&pricing.arc_length(i, b))
                    .then_with(|| splitmix(seed ^ a as u64).cmp(&splitmix(seed ^ b as u64)))
                    .then(a.cmp(&b))
            });
            out
        })
        .collect()
}

/// Start customers in increasing `p_{0i}` order.
fn start_order(successors: &[Vec<usize>]) -> Vec<usize> {
    successors.first().cloned().unwrap_or_default()
}

struct Shared {
    successes: AtomicUsize,
    finished: AtomicUsize,
    stop: AtomicBool,
}

#[derive(Debug, Default)]
struct WorkerOutcome {
    skipped: bool,
    hit: bool,
    expansions: u64,
    columns: Vec<Column>,
}

struct Frame {
    node: usize,
    next: usize,
    departure: f64,
    load: f64,
    cost: f64,
    duals: f64,
}

const CLOCK_EVERY: u64 = 256;

#[allow(clippy::too_many_arguments)]
fn run_worker<C: Clock>(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    successors: &[Vec<usize>],
    params: &DpParams,
    start: usize,
    shared: &Shared,
    may_cancel: bool,
    clock: &C,
) -> WorkerOutcome {
    let inst = pricing.instance();
    let duals = pricing.duals();
    let capacity = inst.capacity();
    let horizon = inst.horizon();
    let started = clock.seconds();
    let mut out = WorkerOutcome::default();
    let mut visited = vec![false; pricing.dim()];
    let mut path: Vec<usize> = vec![DEPOT];
    let mut stack: Vec<Frame> = Vec::new();
    let mut best: Vec<(f64, Vec<usize>)> = Vec::new();

    // Returns the frame for `node` entered after `from`, or None if pruned.
    let enter = |from: &Frame, node: usize| -> Option<Frame> {
        let info = inst.node(node);
        let arrival = from.departure + inst.travel(from.node, node);
        if arrival > info.due {
            return None;
        }
        let load = from.load + info.demand;
        if load > capacity {
            return None;
        }
        let departure = arrival.max(info.ready) + info.service;
        let cost = from.cost + inst.travel(from.node, node);
        let collected = from.duals + duals.get(node);
        if let Some(rb) = params.rollback {
            let spent = load >= rb.fraction * capacity || departure >= rb.fraction * horizon;
            if spent && cost - collected > rb.threshold {
                return None;
            }
        }
        Some(Frame {
            node,
            next: 0,
            departure,
            load,
            cost,
            duals: collected,
        })
    };

    let root = Frame {
        node: DEPOT,
        next: 0,
        departure: inst.node(DEPOT).ready,
        load: 0.0,
        cost: 0.0,
        duals: 0.0,
    };
    let Some(first) = enter(&root, start) else {
        return out;
    };
    visited[start] = true;
    path.push(start);
    stack.push(first);
    let mut fresh = true;

    'search: while let Some(top) = stack.last_mut() {
        if fresh {
            fresh = false;
            out.expansions += 1;
            let node = top.node;
            if mask.keeps(node, DEPOT) {
                let back = top.departure + inst.travel(node, DEPOT);
                if back <= inst.node(DEPOT).due {
                    let rc = top.cost + inst.travel(node, DEPOT) - top.duals;
                    if rc < params.accept_below {
                        remember(&mut best, rc, &path, params.columns_per_worker);
                    }
                    if rc <= params.target {
                        out.hit = true;
                        break 'search;
                    }
                }
            }
            if params.max_expansions.is_some_and(|m| out.expansions >= m) {
                break 'search;
            }
            if out.expansions % CLOCK_EVERY == 0 {
                if may_cancel && shared.stop.load(Ordering::Relaxed) {
                    break 'search;
                }
                if let Some(limit) = params.time_limit {
                    if clock.seconds() - started >= limit {
                        break 'search;
                    }
                }
            }
        }
        let top = stack.last_mut().expect("loop holds a frame");
        let succ = &successors[top.node];
        let mut child = None;
        while top.next < succ.len() {
            let j = succ[top.next];
            top.next += 1;
            if visited[j] {
                continue;
            }
            if let Some(frame) = enter(top, j) {
                child = Some(frame);
                break;
            }
        }
        match child {
            Some(frame) => {
                visited[frame.node] = true;
                path.push(frame.node);
                stack.push(frame);
                fresh = true;
            }
            None => {
                let done = stack.pop().expect("nonempty");
                visited[done.node] = false;
                path.pop();
            }
        }
    }

    out.columns = best
        .into_iter()
        .filter_map(|(_, mut seq)| {
            seq.push(DEPOT);
            pricing.column(seq).ok()
        })
        .filter(|c| c.reduced_cost() < params.accept_below)
        .collect();
    out
}

fn remember(best: &mut Vec<(f64, Vec<usize>)>, rc: f64, path: &[usize], keep: usize) {
    if best.len() >= keep && best.last().is_some_and(|(worst, _)| rc >= *worst) {
        return;
    }
    let at = best.partition_point(|(v, _)| *v <= rc);
    best.insert(at, (rc, path.to_vec()));
    best.truncate(keep);
}

/// Runs the DP heuristic with the given executor and clock.
///
/// Under expansion budgets (no wall-clock limit) the output does not depend
/// on the executor: every worker runs to its own budget and the global stop
/// rule is applied afterwards in start order.
pub fn dp_price_with<E: Executor, C: Clock>(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    params: &DpParams,
    seed: u64,
    executor: &E,
    clock: &C,
) -> PricingResult {
    let successors = sorted_successors(pricing, mask, seed);
    let starts: Vec<usize> = start_order(&successors)
        .into_iter()
        .filter(|&i| mask.keeps(DEPOT, i))
        .collect();
    let customers = pricing.dim() - 1;
    let max_workers = params.max_workers.min(customers).max(1);
    let success_workers = params.success_workers.min(customers).max(1);
    let jobs = starts.len().min(max_workers);
    let may_cancel = executor.is_sequential() || !params.deterministic();
    let shared = Shared {
        successes: AtomicUsize::new(0),
        finished: AtomicUsize::new(0),
        stop: AtomicBool::new(false),
    };

    let outcomes = executor.map_indexed(jobs, |k| {
        if may_cancel && shared.stop.load(Ordering::Acquire) {
            return WorkerOutcome {
                skipped: true,
                ..WorkerOutcome::default()
            };
        }
        let outcome = run_worker(
            pricing,
            mask,
            &successors,
            params,
            starts[k],
            &shared,
            may_cancel && !params.deterministic(),
            clock,
        );
        let hits = shared.successes.fetch_add(outcome.hit as usize, Ordering::AcqRel) + outcome.hit as usize;
        let done = shared.finished.fetch_add(1, Ordering::AcqRel) + 1;
        if hits >= success_workers || done >= max_workers {
            shared.stop.store(true, Ordering::Release);
        }
        outcome
    });

    let mut stats = PricingStats::default();
    let mut columns = Vec::new();
    for outcome in outcomes {
        if outcome.skipped {
            continue;
        }
        stats.workers_launched += 1;
        stats.workers_hit_target += outcome.hit as usize;
        stats.expansions += outcome.expansions;
        columns.extend(outcome.columns);
        if params.deterministic() && stats.workers_hit_target >= success_workers {
            break;
        }
    }
    PricingResult::from_columns(columns, stats)
}

/// Sequential, clock-free [`dp_price_with`].
pub fn dp_price(pricing: &PricingInstance<'_>, mask: &ReducedGraph, params: &DpParams, seed: u64) -> PricingResult {
    dp_price_with(pricing, mask, params, seed, &Sequential, &Frozen)
}

/// DP pricing with construction parameters, falling back to the cheapest
/// single-customer route when the search returns nothing. The fallback may
/// exceed `accept_below`.
pub fn construct_initial_with<E: Executor, C: Clock>(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    params: &DpParams,
    seed: u64,
    executor: &E,
    clock: &C,
) -> PricingResult {
    let mut result = dp_price_with(pricing, mask, params, seed, executor, clock);
    if result.columns.is_empty() {
        let mut singles: Vec<Column> = (1..pricing.dim())
            .filter(|&i| mask.keeps(DEPOT, i) && mask.keeps(i, DEPOT))
            .filter_map(|i| pricing.column(vec![DEPOT, i, DEPOT]).ok())
            .collect();
        sort_and_dedup(&mut singles);
        singles.truncate(1);
        result.stats.fallback = !singles.is_empty();
        result.columns = singles;
    }
    result
}

pub fn construct_initial(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    params: &DpParams,
    seed: u64,
) -> PricingResult {
    construct_initial_with(pricing, mask, params, seed, &Sequential, &Frozen)
}

/// Largest customer count the exhaustive oracle accepts.
pub const ORACLE_MAX_CUSTOMERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("exhaustive pricing is limited to {ORACLE_MAX_CUSTOMERS} customers, got {0}")]
pub struct OracleTooLarge(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Cheapest route; the empty route when nothing beats zero.
    pub column: Column,
    pub reduced_cost: f64,
    /// Number of complete feasible routes examined, the empty one included.
    pub routes: usize,
}

/// Enumerates every elementary feasible route over kept arcs.
pub fn exact_oracle(pricing: &PricingInstance<'_>, mask: &ReducedGraph) -> Result<OracleResult, OracleTooLarge> {
    let customers = pricing.dim() - 1;
    if customers > ORACLE_MAX_CUSTOMERS {
        return Err(OracleTooLarge(customers));
    }
    let mut best = Column::empty();
    let mut routes = 1;
    let mut path = vec![DEPOT];
    enumerate(pricing, mask, &mut path, &mut best, &mut routes);
    Ok(OracleResult {
        reduced_cost: best.reduced_cost(),
        column: best,
        routes,
    })
}

fn enumerate(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    path: &mut Vec<usize>,
    best: &mut Column,
    routes: &mut usize,
) {
    let last = *path.last().expect("path starts at the depot");
    for next in 1..pricing.dim() {
        if !mask.keeps(last, next) || path.contains(&next) {
            continue;
        }
        path.push(next);
        // Prefix violations persist under extension, so prune on them.
        let mut closed = path.clone();
        closed.push(DEPOT);
        let prefix_ok = match check_feasible(&closed, pricing.instance()) {
            Ok(()) => true,
            Err(v) => v.position == closed.len() - 1,
        };
        if prefix_ok {
            if mask.keeps(next, DEPOT) {
                if let Ok(column) = pricing.column(closed) {
                    *routes += 1;
                    if column.reduced_cost() < best.reduced_cost() {
                        *best = column;
                    }
                }
            }
            enumerate(pricing, mask, path, best, routes);
        }
        path.pop();
    }
}
