//! Arc masks applied to a pricing graph before it is priced.

use alloc::vec::Vec;

use crate::heatmap::HeatMapAdjusted;
use crate::instance::{check_feasible, PricingInstance, DEPOT};
use crate::matrix::Matrix;

/// BE2 retention fraction.
pub const DEFAULT_BETA: f64 = 0.2;
/// Heat map entries kept per row.
pub const DEFAULT_TOP_M: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ReductionKind {
    None,
    Be2,
    Ulgr,
}

/// Arc mask over the pricing graph. The diagonal is never kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    keep: Matrix<bool>,
    kind: ReductionKind,
    retained: usize,
}

impl ReducedGraph {
    fn from_mask(keep: Matrix<bool>, kind: ReductionKind) -> Self {
        let retained = keep.as_slice().iter().filter(|&&k| k).count();
        ReducedGraph { keep, kind, retained }
    }

    #[inline]
    pub fn keeps(&self, i: usize, j: usize) -> bool {
        self.keep[(i, j)]
    }

    pub fn mask(&self) -> &Matrix<bool> {
        &self.keep
    }

    pub fn kind(&self) -> ReductionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.keep.dim()
    }

    /// Number of kept directed arcs.
    pub fn retained(&self) -> usize {
        self.retained
    }

    /// Number of node pairs `{i, j}` kept in at least one direction.
    pub fn retained_edges(&self) -> usize {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.keeps(i, j) || self.keeps(j, i))
            .count()
    }

    /// Whether some customer can be served alone using only kept arcs.
    pub fn admits_singleton_route(&self, pricing: &PricingInstance<'_>) -> bool {
        (1..self.dim()).any(|i| {
            self.keeps(DEPOT, i)
                && self.keeps(i, DEPOT)
                && check_feasible(&[DEPOT, i, DEPOT], pricing.instance()).is_ok()
        })
    }
}

/// Number of off-diagonal arcs on `dim` nodes.
pub fn arc_count(dim: usize) -> usize {
    dim * dim.saturating_sub(1)
}

/// `ceil(beta * arcs)`, treating products within 1e-9 of an integer as that
/// integer so that e.g. `0.2 * 40200` yields 8040 rather than 8041.
pub fn be2_retained(beta: f64, arcs: usize) -> usize {
    let x = beta * arcs as f64;
    let r = libm::round(x);
    let k = if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        libm::ceil(x)
    };
    (k as usize).min(arcs)
}

/// Keeps the `ceil(beta |A|)` arcs with the smallest scaled length over all
/// off-diagonal arcs, feasible or not. Ties go to the lexicographically
/// smaller `(i, j)`.
pub fn be2(pricing: &PricingInstance<'_>, beta: f64) -> ReducedGraph {
    assert!(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    let n = pricing.dim();
    let mut arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let take = be2_retained(beta, arcs.len());
    arcs.sort_by(|a, b| {
        pricing
            .arc_length(a.0, a.1)
            .total_cmp(&pricing.arc_length(b.0, b.1))
            .then(a.cmp(b))
    });
    let mut keep = Matrix::filled(n, false);
    for &(i, j) in &arcs[..take] {
        keep[(i, j)] = true;
    }
    ReducedGraph::from_mask(keep, ReductionKind::Be2)
}

/// Keeps every off-diagonal arc.
pub fn no_reduction(pricing: &PricingInstance<'_>) -> ReducedGraph {
    full_mask(pricing.dim())
}

pub fn full_mask(dim: usize) -> ReducedGraph {
    ReducedGraph::from_mask(Matrix::from_fn(dim, |i, j| i != j), ReductionKind::None)
}

/// Support of the adjusted heat map plus every depot arc.
pub fn ulgr_mask(adjusted: &HeatMapAdjusted) -> ReducedGraph {
    let keep = Matrix::from_fn(adjusted.dim(), |i, j| {
        i != j && (adjusted.in_support(i, j) || i == DEPOT || j == DEPOT)
    });
    ReducedGraph::from_mask(keep, ReductionKind::Ulgr)
}
