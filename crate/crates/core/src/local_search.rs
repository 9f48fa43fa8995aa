//! Heat-map-guided exchange local search over single routes.
//!
//! Each exchange picks a position `u` on the current route and samples a
//! neighbour `v` from the adjusted heat map row of `u`. With `o` the node after
//! `u`, the candidate route is:
//!
//! * `v` is the depot: cut the route after `u`;
//! * `v` is not on the route: insert `v` between `u` and `o`;
//! * `v` follows `o`: drop `o`;
//! * otherwise: swap `v` and `o`.
//!
//! A candidate replaces the current route only if it is feasible and strictly
//! cheaper in reduced cost.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::{Clock, Executor, Frozen, Sequential};
use crate::heatmap::HeatMapAdjusted;
use crate::instance::{check_feasible, Column, PricingInstance, DEPOT};
use crate::pricing::{construct_initial_with, sort_and_dedup, DpParams, PricingResult, PricingStats};
use crate::reduction::ReducedGraph;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LsParams {
    /// Exchange operations per route.
    pub exchanges: usize,
    /// Routes improved in parallel, each from a different initial route.
    pub workers: usize,
    /// Redraws when the sampled neighbour equals `u`.
    pub redraws: usize,
    /// Moves sampled per exchange; the cheapest feasible one competes with
    /// the current route. 1 is a single sampled move.
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub candidates: usize,
}

#[cfg(feature = "serde")]
fn one() -> usize {
    1
}

impl Default for LsParams {
    fn default() -> Self {
        LsParams {
            exchanges: 20,
            workers: 100,
            redraws: 8,
            candidates: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Truncate,
    Insert,
    Remove,
    Swap,
}

/// Which exchange `(path[u_pos], v)` performs. `u_pos` must not be the last
/// position.
pub fn classify(path: &[usize], u_pos: usize, v: usize) -> Move {
    debug_assert!(u_pos + 1 < path.len());
    if v == DEPOT {
        return Move::Truncate;
    }
    let inner = &path[1..path.len() - 1];
    if !inner.contains(&v) {
        return Move::Insert;
    }
    let o_pos = u_pos + 1;
    if path.get(o_pos + 1) == Some(&v) {
        Move::Remove
    } else {
        Move::Swap
    }
}

/// Candidate sequence produced by the exchange. The result may be infeasible
/// or malformed; callers check it.
pub fn apply_move(path: &[usize], u_pos: usize, v: usize) -> Vec<usize> {
    let o_pos = u_pos + 1;
    match classify(path, u_pos, v) {
        Move::Truncate => {
            let mut out = path[..=u_pos].to_vec();
            out.push(DEPOT);
            out
        }
        Move::Insert => {
            let mut out = path.to_vec();
            out.insert(o_pos, v);
            out
        }
        Move::Remove => {
            let mut out = path.to_vec();
            out.remove(o_pos);
            out
        }
        Move::Swap => {
            let mut out = path.to_vec();
            let v_pos = path[1..].iter().position(|&x| x == v).map(|p| p + 1);
            if let Some(v_pos) = v_pos {
                out.swap(v_pos, o_pos);
            }
            out
        }
    }
}

/// Draws `v` for node `u`, redrawing self-loops. `None` skips the exchange.
fn draw<R: Rng + ?Sized>(hmap: &HeatMapAdjusted, u: usize, redraws: usize, rng: &mut R) -> Option<usize> {
    let sampler = hmap.sampler(u)?;
    for _ in 0..=redraws {
        let v = sampler.sample(rng);
        if v != u {
            return Some(v);
        }
    }
    None
}

/// Runs `params.exchanges` exchanges from `initial` and returns the best route seen.
pub fn ls_improve<R: Rng + ?Sized>(
    initial: &Column,
    pricing: &PricingInstance<'_>,
    hmap: &HeatMapAdjusted,
    params: &LsParams,
    rng: &mut R,
) -> Column {
    let mut current = initial.clone();
    for _ in 0..params.exchanges {
        let mut best: Option<Column> = None;
        for _ in 0..params.candidates.max(1) {
            let path = current.sequence();
            let u_pos = rng.gen_range(0..path.len() - 1);
            let Some(v) = draw(hmap, path[u_pos], params.redraws, rng) else {
                continue;
            };
            let candidate = apply_move(path, u_pos, v);
            if check_feasible(&candidate, pricing.instance()).is_err() {
                continue;
            }
            let column = pricing.column(candidate).expect("checked feasible");
            if best.as_ref().is_none_or(|b| column.reduced_cost() < b.reduced_cost()) {
                best = Some(column);
            }
        }
        if let Some(column) = best {
            if column.reduced_cost() < current.reduced_cost() {
                current = column;
            }
        }
    }
    current
}

/// Builds initial routes with the construction heuristic and improves up to
/// `ls.workers` of them, cheapest first. Worker `k` draws from ChaCha8 stream
/// `k` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn ls_price_with<E: Executor, C: Clock>(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    hmap: &HeatMapAdjusted,
    ls: &LsParams,
    construction: &DpParams,
    seed: u64,
    executor: &E,
    clock: &C,
) -> PricingResult {
    let initial = construct_initial_with(pricing, mask, construction, seed, executor, clock);
    let workers = ls.workers.min(initial.columns.len());
    let mut columns = executor.map_indexed(workers, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        ls_improve(&initial.columns[k], pricing, hmap, ls, &mut rng)
    });
    sort_and_dedup(&mut columns);
    PricingResult {
        columns,
        stats: PricingStats {
            workers_launched: workers,
            ..initial.stats
        },
    }
}

pub fn ls_price(
    pricing: &PricingInstance<'_>,
    mask: &ReducedGraph,
    hmap: &HeatMapAdjusted,
    ls: &LsParams,
    construction: &DpParams,
    seed: u64,
) -> PricingResult {
    ls_price_with(pricing, mask, hmap, ls, construction, seed, &Sequential, &Frozen)
}
