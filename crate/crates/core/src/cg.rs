//! The column generation loop.
//!
//! Each iteration solves the master LP, builds a pricing instance from its
//! duals, masks arcs according to the strategy, prices, and admits the routes
//! with negative reduced cost. The loop ends when pricing admits nothing, or
//! on the iteration, time or stall budget.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

use crate::exec::{Clock, Executor, Frozen, Sequential};
use crate::heatmap::{adjust, heat_from_t, surrogate_t, HeatError, HeatMapAdjusted, ProbMatrix};
use crate::instance::{
    build_pricing, check_feasible, Column, Duals, PricingError, PricingInstance, VrptwInstance, DEPOT,
};
use crate::local_search::{ls_price_with, LsParams};
use crate::pricing::{dp_price_with, exact_oracle, DpParams, OracleTooLarge, ParamError, PricingResult, PricingStats};
use crate::reduction::{be2, no_reduction, ulgr_mask, ReducedGraph, DEFAULT_BETA, DEFAULT_TOP_M};
use crate::rmp::Rmp;
use crate::simplex::LpError;

/// Routes priced at or above `-ADMIT_TOLERANCE` are not added to the master.
pub const ADMIT_TOLERANCE: f64 = 1e-9;
/// Objective improvement that resets the stall counter.
pub const STALL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Strategy {
    Ulgr,
    Be2,
    #[cfg_attr(feature = "serde", serde(rename = "none"))]
    NoReduction,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HeatMapSource {
    /// Softmax of the pricing weights, see [`surrogate_t`].
    Surrogate { temperature: f64 },
    /// One probability file per iteration, with the surrogate used once the
    /// files run out. Read by the std companion crate.
    Directory { path: String, fallback_temperature: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CgConfig {
    pub strategy: Strategy,
    pub beta: f64,
    pub top_m: usize,
    pub heat_map: HeatMapSource,
    /// Wall-clock seconds for the whole run.
    pub time_limit: Option<f64>,
    /// Pricing rounds before the run stops.
    pub iter_limit: Option<usize>,
    /// Iterations without objective improvement before the run stops.
    pub stall_iterations: usize,
    pub dp: DpParams,
    pub construction: DpParams,
    pub local_search: LsParams,
    pub seed: u64,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig::new(Strategy::Ulgr)
    }
}

impl CgConfig {
    pub fn new(strategy: Strategy) -> Self {
        CgConfig {
            strategy,
            beta: DEFAULT_BETA,
            top_m: DEFAULT_TOP_M,
            heat_map: HeatMapSource::Surrogate { temperature: 0.5 },
            time_limit: Some(3600.0),
            iter_limit: None,
            stall_iterations: 50,
            dp: DpParams::baseline(),
            construction: DpParams::construction(),
            local_search: LsParams::default(),
            seed: 0,
        }
    }

    /// Replaces every wall-clock limit with iteration and expansion budgets,
    /// which makes runs reproducible.
    pub fn deterministic(mut self, iterations: usize, expansions: u64) -> Self {
        self.time_limit = None;
        self.iter_limit = Some(iterations);
        self.dp = self.dp.with_expansions(expansions);
        self.construction = self.construction.with_expansions(expansions);
        self
    }

    pub fn validate(&self) -> Result<(), CgError> {
        self.dp.validate()?;
        self.construction.validate()?;
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(CgError::Config("beta must lie in (0, 1]"));
        }
        if self.top_m == 0 {
            return Err(CgError::Config("top_m must be positive"));
        }
        if self.local_search.exchanges == 0 {
            return Err(CgError::Config("local search needs at least one exchange"));
        }
        if self.stall_iterations == 0 {
            return Err(CgError::Config("stall_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CgError {
    #[error("customer {0} cannot be served even by a single-customer route")]
    Unreachable(usize),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("master LP: {0}")]
    Lp(#[from] LpError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error("heat map: {0}")]
    Heat(#[from] HeatError),
    #[error(transparent)]
    Oracle(#[from] OracleTooLarge),
    /// A heat map could not be obtained from its source.
    #[error("heat map source: {0}")]
    HeatSource(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Termination {
    PricedOut,
    IterationLimit,
    TimeLimit,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationLog {
    pub iter: usize,
    /// Milliseconds since the start of the run, taken after pricing.
    pub wall_ms: f64,
    pub objective: f64,
    /// Cheapest route pricing returned, if it returned any.
    pub best_rc: Option<f64>,
    pub cols_added: usize,
    pub pricing_ms: f64,
    /// Arcs kept by the reduction.
    pub retained: usize,
    /// Whether the mask admits a feasible single-customer route.
    pub mask_feasible: bool,
    /// Master duals this iteration priced against, one per customer.
    pub duals: Vec<f64>,
    /// Indices into [`CgRun::columns`] of the routes admitted here.
    pub admitted: Range<usize>,
    pub stats: PricingStats,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CgRun {
    pub iterations: Vec<IterationLog>,
    pub final_objective: f64,
    pub reason: Termination,
    /// Every master column in insertion order, initial routes first.
    pub columns: Vec<Column>,
    pub initial_columns: usize,
    /// Master primal values at the final solve.
    pub primal: Vec<f64>,
}

impl CgRun {
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.iterations.iter().map(|l| l.objective)
    }

    pub fn wall_ms(&self) -> f64 {
        self.iterations.last().map_or(0.0, |l| l.wall_ms)
    }

    /// True if some iteration priced on a mask with no feasible singleton route.
    pub fn hit_infeasible_mask(&self) -> bool {
        self.iterations.iter().any(|l| !l.mask_feasible)
    }
}

/// Supplies the probability matrix a ULGR iteration is built from.
pub trait HeatProvider {
    fn probabilities(&mut self, iteration: usize, pricing: &PricingInstance<'_>) -> Result<ProbMatrix, CgError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surrogate {
    pub temperature: f64,
}

impl HeatProvider for Surrogate {
    fn probabilities(&mut self, _iteration: usize, pricing: &PricingInstance<'_>) -> Result<ProbMatrix, CgError> {
        Ok(surrogate_t(pricing, self.temperature)?)
    }
}

/// What the driver hands to a pricer each iteration.
pub struct PricingRequest<'r, 'a> {
    pub pricing: &'r PricingInstance<'a>,
    pub mask: &'r ReducedGraph,
    /// Present for ULGR only.
    pub heat_map: Option<&'r HeatMapAdjusted>,
    pub iteration: usize,
    pub seed: u64,
}

pub trait Pricer {
    fn price(&mut self, request: &PricingRequest<'_, '_>) -> Result<PricingResult, CgError>;
}

/// DP pricing, or construction plus local search when a heat map is given.
pub struct HeuristicPricer<'c, E, C> {
    pub dp: &'c DpParams,
    pub construction: &'c DpParams,
    pub local_search: &'c LsParams,
    pub executor: E,
    pub clock: &'c C,
}

impl<'c, E: Executor, C: Clock> HeuristicPricer<'c, E, C> {
    pub fn new(cfg: &'c CgConfig, executor: E, clock: &'c C) -> Self {
        HeuristicPricer {
            dp: &cfg.dp,
            construction: &cfg.construction,
            local_search: &cfg.local_search,
            executor,
            clock,
        }
    }
}

impl<E: Executor, C: Clock> Pricer for HeuristicPricer<'_, E, C> {
    fn price(&mut self, r: &PricingRequest<'_, '_>) -> Result<PricingResult, CgError> {
        Ok(match r.heat_map {
            Some(hmap) => ls_price_with(
                r.pricing,
                r.mask,
                hmap,
                self.local_search,
                self.construction,
                r.seed,
                &self.executor,
                self.clock,
            ),
            None => dp_price_with(r.pricing, r.mask, self.dp, r.seed, &self.executor, self.clock),
        })
    }
}

/// Exact pricing by enumeration, for small instances.
#[derive(Debug, Clone, Copy, Default)]
pub struct OraclePricer;

impl Pricer for OraclePricer {
    fn price(&mut self, r: &PricingRequest<'_, '_>) -> Result<PricingResult, CgError> {
        let best = exact_oracle(r.pricing, r.mask)?;
        let columns = if best.column.customers().is_empty() {
            Vec::new()
        } else {
            vec![best.column]
        };
        Ok(PricingResult {
            columns,
            stats: PricingStats::default(),
        })
    }
}

/// Greedy routes covering every customer exactly once: extend the open route
/// with the nearest unvisited customer that keeps it feasible, and start a
/// new route when none does. Ties go to the lower index.
pub fn init_columns(instance: &VrptwInstance) -> Result<Vec<Column>, CgError> {
    let n = instance.customers();
    for i in 1..=n {
        if check_feasible(&[DEPOT, i, DEPOT], instance).is_err() {
            return Err(CgError::Unreachable(i));
        }
    }
    let zero = Duals::zeros(n);
    let mut visited = vec![false; n + 1];
    let mut routes = Vec::new();
    let mut left = n;
    while left > 0 {
        let mut path = vec![DEPOT];
        loop {
            let last = *path.last().expect("route starts at the depot");
            let mut best: Option<(f64, usize)> = None;
            for j in 1..=n {
                if visited[j] {
                    continue;
                }
                let d = instance.travel(last, j);
                if best.is_some_and(|(bd, _)| d >= bd) {
                    continue;
                }
                path.push(j);
                path.push(DEPOT);
                if check_feasible(&path, instance).is_ok() {
                    best = Some((d, j));
                }
                path.truncate(path.len() - 2);
            }
            match best {
                Some((_, j)) => {
                    visited[j] = true;
                    left -= 1;
                    path.push(j);
                }
                None => break,
            }
        }
        path.push(DEPOT);
        routes.push(Column::new(path, instance, &zero).expect("greedy routes are feasible"));
    }
    Ok(routes)
}

fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    seed ^ (iteration as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs column generation with the given heat-map provider, pricer and clock.
pub fn run<H, P, C>(
    instance: &VrptwInstance,
    cfg: &CgConfig,
    heat: &mut H,
    pricer: &mut P,
    clock: &C,
) -> Result<CgRun, CgError>
where
    H: HeatProvider + ?Sized,
    P: Pricer + ?Sized,
    C: Clock + ?Sized,
{
    cfg.validate()?;
    let start = clock.seconds();
    let elapsed_ms = || (clock.seconds() - start) * 1000.0;
    let mut rmp = Rmp::new(instance.customers());
    let initial = init_columns(instance)?;
    let initial_columns = initial.len();
    rmp.add_columns(initial);

    let mut iterations = Vec::new();
    let mut best_objective = f64::INFINITY;
    let mut since_improvement = 0;
    let mut iter = 0;
    let (reason, solution) = loop {
        let solution = rmp.solve()?;
        if solution.objective < best_objective - STALL_TOLERANCE {
            best_objective = solution.objective;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if since_improvement >= cfg.stall_iterations {
            break (Termination::Stalled, solution);
        }
        if cfg.iter_limit.is_some_and(|k| iter >= k) {
            break (Termination::IterationLimit, solution);
        }
        if cfg.time_limit.is_some_and(|t| clock.seconds() - start >= t) {
            break (Termination::TimeLimit, solution);
        }

        let pricing = build_pricing(instance, &solution.duals)?;
        let hmap;
        let (mask, heat_map) = match cfg.strategy {
            Strategy::NoReduction => (no_reduction(&pricing), None),
            Strategy::Be2 => (be2(&pricing, cfg.beta), None),
            Strategy::Ulgr => {
                let t = heat.probabilities(iter, &pricing)?;
                hmap = adjust(&heat_from_t(&t), cfg.top_m);
                (ulgr_mask(&hmap), Some(&hmap))
            }
        };
        let priced_at = clock.seconds();
        let result = pricer.price(&PricingRequest {
            pricing: &pricing,
            mask: &mask,
            heat_map,
            iteration: iter,
            seed: iteration_seed(cfg.seed, iter),
        })?;
        let pricing_ms = (clock.seconds() - priced_at) * 1000.0;

        let before = rmp.len();
        let added = rmp.add_columns(
            result
                .columns
                .iter()
                .filter(|c| c.reduced_cost() < -ADMIT_TOLERANCE)
                .cloned(),
        );
        iterations.push(IterationLog {
            iter,
            wall_ms: elapsed_ms(),
            objective: solution.objective,
            best_rc: result.best_reduced_cost(),
            cols_added: added,
            pricing_ms,
            retained: mask.retained(),
            mask_feasible: mask.admits_singleton_route(&pricing),
            duals: solution.duals.as_slice()[1..].to_vec(),
            admitted: before..rmp.len(),
            stats: result.stats,
        });
        iter += 1;
        if added == 0 {
            break (Termination::PricedOut, solution);
        }
    };

    if reason != Termination::PricedOut {
        // Record the last solve, which no pricing round followed.
        iterations.push(IterationLog {
            iter,
            wall_ms: elapsed_ms(),
            objective: solution.objective,
            best_rc: None,
            cols_added: 0,
            pricing_ms: 0.0,
            retained: 0,
            mask_feasible: true,
            duals: solution.duals.as_slice()[1..].to_vec(),
            admitted: rmp.len()..rmp.len(),
            stats: PricingStats::default(),
        });
    }

    Ok(CgRun {
        iterations,
        final_objective: solution.objective,
        reason,
        columns: rmp.columns().to_vec(),
        initial_columns,
        primal: solution.primal,
    })
}

/// Single-threaded run with the heuristic pricer and a clock that never
/// advances, so only iteration and expansion budgets apply. A directory heat
/// map source falls back to its surrogate.
pub fn run_sequential(instance: &VrptwInstance, cfg: &CgConfig) -> Result<CgRun, CgError> {
    let temperature = match cfg.heat_map {
        HeatMapSource::Surrogate { temperature } => temperature,
        HeatMapSource::Directory {
            fallback_temperature, ..
        } => fallback_temperature,
    };
    let mut pricer = HeuristicPricer::new(cfg, Sequential, &Frozen);
    run(instance, cfg, &mut Surrogate { temperature }, &mut pricer, &Frozen)
}

/// Column generation with exact pricing on the full graph.
pub fn run_exact(instance: &VrptwInstance, cfg: &CgConfig) -> Result<CgRun, CgError> {
    let cfg = CgConfig {
        strategy: Strategy::NoReduction,
        ..cfg.clone()
    };
    run(
        instance,
        &cfg,
        &mut Surrogate { temperature: 1.0 },
        &mut OraclePricer,
        &Frozen,
    )
}
