//! C-VRPTW instances, their scaled model-input view, and the ESPPRC pricing
//! instance derived from a dual vector.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::matrix::Matrix;

/// Index of the depot. It is both the origin and the destination of every route.
pub const DEPOT: usize = 0;

/// A node of the routing graph. Node 0 is the depot.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Node {
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub service: f64,
    pub ready: f64,
    pub due: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance has no depot")]
    Empty,
    #[error("capacity must be positive and finite, got {0}")]
    Capacity(f64),
    #[error("node {0} has a non-finite attribute")]
    NonFinite(usize),
    #[error("depot must open at time 0 and carry no demand or service")]
    Depot,
    #[error("node {0} has a time window with ready > due")]
    Window(usize),
    #[error("node {0} has demand outside [0, capacity]")]
    Demand(usize),
    #[error("node {0} has negative service time")]
    Service(usize),
}

/// A validated C-VRPTW instance with its Euclidean travel-time matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VrptwInstance {
    capacity: f64,
    nodes: Vec<Node>,
    travel: Matrix<f64>,
}

impl VrptwInstance {
    pub fn new(capacity: f64, nodes: Vec<Node>) -> Result<Self, InstanceError> {
        if nodes.is_empty() {
            return Err(InstanceError::Empty);
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(InstanceError::Capacity(capacity));
        }
        for (i, node) in nodes.iter().enumerate() {
            let fields = [node.x, node.y, node.demand, node.service, node.ready, node.due];
            if fields.iter().any(|v| !v.is_finite()) {
                return Err(InstanceError::NonFinite(i));
            }
            if node.ready > node.due {
                return Err(InstanceError::Window(i));
            }
            if node.demand < 0.0 || node.demand > capacity {
                return Err(InstanceError::Demand(i));
            }
            if node.service < 0.0 {
                return Err(InstanceError::Service(i));
            }
        }
        let depot = &nodes[DEPOT];
        if depot.ready != 0.0 || depot.demand != 0.0 || depot.service != 0.0 {
            return Err(InstanceError::Depot);
        }
        let travel = Matrix::from_fn(nodes.len(), |i, j| {
            if i == j {
                0.0
            } else {
                let dx = nodes[i].x - nodes[j].x;
                let dy = nodes[i].y - nodes[j].y;
                libm::sqrt(dx * dx + dy * dy)
            }
        });
        Ok(VrptwInstance {
            capacity,
            nodes,
            travel,
        })
    }

    /// Number of customers.
    pub fn customers(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of nodes including the depot.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Upper end of the depot time window.
    pub fn horizon(&self) -> f64 {
        self.nodes[DEPOT].due
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> f64 {
        self.travel[(i, j)]
    }

    pub fn travel_matrix(&self) -> &Matrix<f64> {
        &self.travel
    }

    /// Earliest possible arrival at `j` when leaving `i` as early as its window allows.
    /// An arc is time-feasible when this does not exceed `due_j`.
    #[inline]
    pub fn earliest_arrival(&self, i: usize, j: usize) -> f64 {
        let from = &self.nodes[i];
        from.ready + from.service + self.travel(i, j)
    }

    pub fn arc_time_feasible(&self, i: usize, j: usize) -> bool {
        i != j && self.earliest_arrival(i, j) <= self.nodes[j].due
    }

    /// Largest travel time into node `i` from any other node.
    pub fn max_inbound_travel(&self, i: usize) -> f64 {
        (0..self.len())
            .filter(|&j| j != i)
            .map(|j| self.travel(j, i))
            .fold(0.0, f64::max)
    }

    /// Model-input view: times divided by the horizon, demands by the capacity.
    pub fn scaled(&self) -> ScaledInstance {
        let h = self.horizon();
        let q = self.capacity;
        // A zero horizon only happens for instances nobody can route; keep the
        // division finite.
        let h = if h > 0.0 { h } else { 1.0 };
        ScaledInstance {
            horizon: self.horizon(),
            capacity: q,
            x: self.nodes.iter().map(|n| n.x).collect(),
            y: self.nodes.iter().map(|n| n.y).collect(),
            demand: self.nodes.iter().map(|n| n.demand / q).collect(),
            service: self.nodes.iter().map(|n| n.service / h).collect(),
            ready: self.nodes.iter().map(|n| n.ready / h).collect(),
            due: self.nodes.iter().map(|n| n.due / h).collect(),
            travel: Matrix::from_fn(self.len(), |i, j| self.travel(i, j) / h),
        }
    }
}

/// Instance data scaled for the learned model: times by the depot's upper time
/// window, demands by the vehicle capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledInstance {
    pub horizon: f64,
    pub capacity: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub demand: Vec<f64>,
    pub service: Vec<f64>,
    pub ready: Vec<f64>,
    pub due: Vec<f64>,
    pub travel: Matrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualsError {
    #[error("expected {expected} dual values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("dual of node {0} is negative or not finite")]
    Invalid(usize),
    #[error("the depot carries no dual")]
    Depot,
}

/// Dual prices indexed by node; entry 0 (the depot) is always zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Duals(Vec<f64>);

impl Duals {
    /// Zero prices for an instance with `customers` customers.
    pub fn zeros(customers: usize) -> Self {
        Duals(alloc::vec![0.0; customers + 1])
    }

    /// Builds from one value per customer, in customer order.
    pub fn from_customers(values: &[f64]) -> Result<Self, DualsError> {
        let mut all = Vec::with_capacity(values.len() + 1);
        all.push(0.0);
        all.extend_from_slice(values);
        Self::from_nodes(all)
    }

    /// Builds from one value per node including the depot.
    pub fn from_nodes(values: Vec<f64>) -> Result<Self, DualsError> {
        if values.first().copied().unwrap_or(1.0) != 0.0 {
            return Err(DualsError::Depot);
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DualsError::Invalid(i));
        }
        Ok(Duals(values))
    }

    pub fn customers(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ViolationKind {
    /// Not a depot-to-depot sequence, unknown node, or depot visited mid-route.
    Malformed,
    /// A customer appears twice.
    Repeated,
    TimeWindow,
    Capacity,
}

/// First point at which a sequence breaks the ESPPRC constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{kind:?} violation at position {position}")]
pub struct Violation {
    pub kind: ViolationKind,
    pub position: usize,
}

/// Simulates a depot-to-depot sequence. Waiting before `ready` is allowed,
/// arriving exactly at `due` is on time.
pub fn check_feasible(sequence: &[usize], instance: &VrptwInstance) -> Result<(), Violation> {
    let malformed = |position| Violation {
        kind: ViolationKind::Malformed,
        position,
    };
    let last = match sequence.len() {
        0 | 1 => return Err(malformed(0)),
        len => len - 1,
    };
    if sequence[0] != DEPOT {
        return Err(malformed(0));
    }
    let mut seen = alloc::vec![false; instance.len()];
    let mut time = instance.node(DEPOT).ready;
    let mut load = 0.0;
    for k in 1..=last {
        let node = sequence[k];
        if node >= instance.len() || (node == DEPOT) != (k == last) {
            return Err(malformed(k));
        }
        if node != DEPOT {
            if seen[node] {
                return Err(Violation {
                    kind: ViolationKind::Repeated,
                    position: k,
                });
            }
            seen[node] = true;
        }
        let info = instance.node(node);
        let arrival = time + instance.travel(sequence[k - 1], node);
        if arrival > info.due {
            return Err(Violation {
                kind: ViolationKind::TimeWindow,
                position: k,
            });
        }
        load += info.demand;
        if load > instance.capacity() {
            return Err(Violation {
                kind: ViolationKind::Capacity,
                position: k,
            });
        }
        time = arrival.max(info.ready) + info.service;
    }
    Ok(())
}

/// An elementary, resource-feasible depot-to-depot route.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Column {
    sequence: Vec<usize>,
    cost: f64,
    reduced_cost: f64,
}

impl Column {
    /// Validates `sequence` and prices it at `duals`.
    pub fn new(sequence: Vec<usize>, instance: &VrptwInstance, duals: &Duals) -> Result<Self, Violation> {
        check_feasible(&sequence, instance)?;
        let cost = path_cost(&sequence, instance);
        let reduced_cost = cost - dual_sum(&sequence, duals);
        Ok(Column {
            sequence,
            cost,
            reduced_cost,
        })
    }

    /// The empty route depot -> depot.
    pub fn empty() -> Self {
        Column {
            sequence: alloc::vec![DEPOT, DEPOT],
            cost: 0.0,
            reduced_cost: 0.0,
        }
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn reduced_cost(&self) -> f64 {
        self.reduced_cost
    }

    /// Visited customers in route order.
    pub fn customers(&self) -> &[usize] {
        &self.sequence[1..self.sequence.len() - 1]
    }

    pub fn covers(&self, customer: usize) -> bool {
        customer != DEPOT && self.customers().contains(&customer)
    }

    /// Re-prices the column at new duals.
    pub fn repriced(&self, duals: &Duals) -> Self {
        Column {
            sequence: self.sequence.clone(),
            cost: self.cost,
            reduced_cost: reduced_cost(self, duals),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, node) in self.sequence.iter().enumerate() {
            if k > 0 {
                f.write_str("-")?;
            }
            write!(f, "{node}")?;
        }
        Ok(())
    }
}

fn path_cost(sequence: &[usize], instance: &VrptwInstance) -> f64 {
    sequence.windows(2).map(|w| instance.travel(w[0], w[1])).sum()
}

fn dual_sum(sequence: &[usize], duals: &Duals) -> f64 {
    sequence.iter().map(|&i| duals.get(i)).sum()
}

/// Route cost minus the duals of the customers it visits.
pub fn reduced_cost(column: &Column, duals: &Duals) -> f64 {
    column.cost - dual_sum(&column.sequence, duals)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("dual vector covers {got} customers, instance has {expected}")]
    DualLength { expected: usize, got: usize },
}

/// ESPPRC data for one pricing round.
///
/// `arc_length` holds `t_ij - d_j` divided by the largest magnitude over
/// time-feasible arcs, so feasible entries lie in `[-1, 1]`. Infeasible arcs keep
/// their (possibly out-of-range) length for strategies that ignore
/// feasibility. `weight` is the guidance matrix fed to the model and the
/// surrogate heat map.
#[derive(Debug, Clone)]
pub struct PricingInstance<'a> {
    instance: &'a VrptwInstance,
    scaled: ScaledInstance,
    duals: Duals,
    arc_length: Matrix<f64>,
    feasible: Matrix<bool>,
    min_time: Matrix<f64>,
    weight: Matrix<f64>,
    divisor: f64,
    degenerate: bool,
}

/// Guidance weight of an infeasible arc.
pub const INFEASIBLE_WEIGHT: f64 = 2.0;

pub fn build_pricing<'a>(instance: &'a VrptwInstance, duals: &Duals) -> Result<PricingInstance<'a>, PricingError> {
    if duals.customers() != instance.customers() {
        return Err(PricingError::DualLength {
            expected: instance.customers(),
            got: duals.customers(),
        });
    }
    let dim = instance.len();
    let scaled = instance.scaled();
    let feasible = Matrix::from_fn(dim, |i, j| instance.arc_time_feasible(i, j));
    let raw = Matrix::from_fn(dim, |i, j| instance.travel(i, j) - duals.get(j));

    let mut divisor = 0.0f64;
    for (r, f) in raw.as_slice().iter().zip(feasible.as_slice()) {
        if *f {
            divisor = divisor.max(r.abs());
        }
    }
    let degenerate = divisor == 0.0;
    if degenerate {
        divisor = 1.0;
    }
    let arc_length = Matrix::from_fn(dim, |i, j| raw[(i, j)] / divisor);

    let horizon = if instance.horizon() > 0.0 {
        instance.horizon()
    } else {
        1.0
    };
    let min_time = Matrix::from_fn(dim, |i, j| {
        let ready_i = instance.node(i).ready;
        let start_j = instance.node(j).ready.max(instance.earliest_arrival(i, j));
        ((start_j - ready_i) / horizon).max(0.0)
    });
    let weight = Matrix::from_fn(dim, |i, j| {
        if !feasible[(i, j)] {
            return INFEASIBLE_WEIGHT;
        }
        let p = arc_length[(i, j)];
        let effort = min_time[(i, j)] + scaled.demand[j];
        if p < 0.0 {
            p * libm::exp(-effort)
        } else if p > 0.0 {
            p * libm::exp(effort)
        } else {
            0.0
        }
    });

    Ok(PricingInstance {
        instance,
        scaled,
        duals: duals.clone(),
        arc_length,
        feasible,
        min_time,
        weight,
        divisor,
        degenerate,
    })
}

impl<'a> PricingInstance<'a> {
    pub fn instance(&self) -> &'a VrptwInstance {
        self.instance
    }

    pub fn scaled(&self) -> &ScaledInstance {
        &self.scaled
    }

    pub fn duals(&self) -> &Duals {
        &self.duals
    }

    /// Number of nodes including the depot.
    pub fn dim(&self) -> usize {
        self.instance.len()
    }

    #[inline]
    pub fn arc_length(&self, i: usize, j: usize) -> f64 {
        self.arc_length[(i, j)]
    }

    pub fn arc_lengths(&self) -> &Matrix<f64> {
        &self.arc_length
    }

    #[inline]
    pub fn is_feasible(&self, i: usize, j: usize) -> bool {
        self.feasible[(i, j)]
    }

    pub fn feasibility(&self) -> &Matrix<bool> {
        &self.feasible
    }

    pub fn min_time(&self) -> &Matrix<f64> {
        &self.min_time
    }

    pub fn weights(&self) -> &Matrix<f64> {
        &self.weight
    }

    /// Divisor that brought feasible arc lengths into `[-1, 1]`.
    pub fn divisor(&self) -> f64 {
        self.divisor
    }

    /// Set when every feasible arc had length zero; the divisor is then 1.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Reduced cost of a sequence at this instance's duals, in RMP units.
    pub fn column(&self, sequence: Vec<usize>) -> Result<Column, Violation> {
        Column::new(sequence, self.instance, &self.duals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn node(x: f64, y: f64, demand: f64, ready: f64, due: f64) -> Node {
        Node {
            x,
            y,
            demand,
            service: if demand > 0.0 { 0.25 } else { 0.0 },
            ready,
            due,
        }
    }

    fn two_customers() -> VrptwInstance {
        VrptwInstance::new(
            10.0,
            vec![
                node(0.0, 0.0, 0.0, 0.0, 18.0),
                node(3.0, 4.0, 4.0, 0.0, 10.0),
                node(0.0, 1.0, 6.0, 0.0, 10.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn travel_is_euclidean_and_symmetric() {
        let inst = two_customers();
        assert_eq!(inst.travel(0, 1), 5.0);
        assert_eq!(inst.travel(1, 0), 5.0);
        assert_eq!(inst.travel(2, 2), 0.0);
    }

    #[test]
    fn rejects_invalid_nodes() {
        let depot = node(0.0, 0.0, 0.0, 0.0, 18.0);
        let err = VrptwInstance::new(5.0, vec![depot, node(1.0, 1.0, 6.0, 0.0, 2.0)]);
        assert_eq!(err, Err(InstanceError::Demand(1)));
        let err = VrptwInstance::new(5.0, vec![depot, node(1.0, 1.0, 1.0, 3.0, 2.0)]);
        assert_eq!(err, Err(InstanceError::Window(1)));
        let late_depot = node(0.0, 0.0, 0.0, 1.0, 18.0);
        assert_eq!(VrptwInstance::new(5.0, vec![late_depot]), Err(InstanceError::Depot));
    }

    #[test]
    fn zero_duals_give_nonnegative_lengths() {
        let inst = two_customers();
        let pricing = build_pricing(&inst, &Duals::zeros(2)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if pricing.is_feasible(i, j) {
                    assert!(pricing.arc_length(i, j) >= 0.0);
                    assert!(pricing.weights()[(i, j)] > 0.0);
                }
            }
        }
        // feasible max is t(1,0)=5 -> divisor 5
        assert_eq!(pricing.divisor(), 5.0);
        assert_eq!(pricing.arc_length(2, 0), 0.2);
    }

    #[test]
    fn late_arc_is_infeasible_with_penalty_weight() {
        let inst = VrptwInstance::new(
            10.0,
            vec![
                node(0.0, 0.0, 0.0, 0.0, 18.0),
                node(1.0, 0.0, 1.0, 5.0, 6.0),
                node(2.0, 0.0, 1.0, 1.0, 2.0),
            ],
        )
        .unwrap();
        let pricing = build_pricing(&inst, &Duals::zeros(2)).unwrap();
        // leaving 1 no earlier than 5.25 cannot reach 2 by 2
        assert!(!pricing.is_feasible(1, 2));
        assert_eq!(pricing.weights()[(1, 2)], INFEASIBLE_WEIGHT);
        assert!(pricing.is_feasible(2, 1));
        for i in 0..3 {
            assert!(!pricing.is_feasible(i, i));
        }
    }

    #[test]
    fn min_time_includes_waiting() {
        let inst = VrptwInstance::new(
            10.0,
            vec![
                node(0.0, 0.0, 0.0, 0.0, 20.0),
                node(1.0, 0.0, 1.0, 2.0, 6.0),
                node(2.0, 0.0, 1.0, 10.0, 12.0),
            ],
        )
        .unwrap();
        let pricing = build_pricing(&inst, &Duals::zeros(2)).unwrap();
        // wait at 2 until 10: 10 - 2 = 8 -> 8/20
        assert!((pricing.min_time()[(1, 2)] - 0.4).abs() < 1e-15);
        // no waiting at 1 when coming from 2: 10 + .25 + 1 - 10 = 1.25
        assert!((pricing.min_time()[(2, 1)] - 1.25 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn weight_sign_follows_length() {
        let inst = two_customers();
        let duals = Duals::from_customers(&[7.0, 0.5]).unwrap();
        let pricing = build_pricing(&inst, &duals).unwrap();
        let scaled = inst.scaled();
        for i in 0..3 {
            for j in 0..3 {
                if !pricing.is_feasible(i, j) {
                    continue;
                }
                let p = pricing.arc_length(i, j);
                let e = pricing.min_time()[(i, j)] + scaled.demand[j];
                let expect = if p < 0.0 { p * (-e).exp() } else { p * e.exp() };
                assert!((pricing.weights()[(i, j)] - expect).abs() < 1e-15);
            }
        }
        // tight scaling
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                if pricing.is_feasible(i, j) {
                    lo = lo.min(pricing.arc_length(i, j));
                    hi = hi.max(pricing.arc_length(i, j));
                }
            }
        }
        assert!(lo == -1.0 || hi == 1.0);
    }

    #[test]
    fn degenerate_scaling_sets_flag() {
        // All nodes on one spot: travel 0, duals 0.
        let inst = VrptwInstance::new(
            10.0,
            vec![node(0.5, 0.5, 0.0, 0.0, 18.0), node(0.5, 0.5, 1.0, 0.0, 5.0)],
        )
        .unwrap();
        let pricing = build_pricing(&inst, &Duals::zeros(1)).unwrap();
        assert!(pricing.is_degenerate());
        assert_eq!(pricing.divisor(), 1.0);
    }

    #[test]
    fn dual_length_mismatch() {
        let inst = two_customers();
        assert!(build_pricing(&inst, &Duals::zeros(3)).is_err());
        assert!(Duals::from_customers(&[-1.0]).is_err());
    }

    #[test]
    fn reduced_cost_examples() {
        let inst = two_customers();
        let duals = Duals::from_customers(&[3.0, 1.5]).unwrap();
        let empty = Column::empty();
        assert_eq!(reduced_cost(&empty, &duals), 0.0);
        let single = Column::new(vec![0, 1, 0], &inst, &duals).unwrap();
        assert_eq!(single.reduced_cost(), 5.0 + 5.0 - 3.0);
        assert_eq!(reduced_cost(&single, &duals), single.reduced_cost());
        assert!(single.covers(1) && !single.covers(2));
    }

    #[test]
    fn capacity_and_closed_windows() {
        let inst = VrptwInstance::new(
            10.0,
            vec![
                node(0.0, 0.0, 0.0, 0.0, 18.0),
                node(1.0, 0.0, 5.0, 0.0, 1.0),
                node(1.0, 1.0, 6.0, 0.0, 10.0),
            ],
        )
        .unwrap();
        // arrive at 1 exactly at its due time
        assert_eq!(check_feasible(&[0, 1, 0], &inst), Ok(()));
        // 5 + 6 = 11 > 10
        assert_eq!(
            check_feasible(&[0, 1, 2, 0], &inst),
            Err(Violation {
                kind: ViolationKind::Capacity,
                position: 2
            })
        );
        assert_eq!(
            check_feasible(&[0, 2, 2, 0], &inst).unwrap_err().kind,
            ViolationKind::Repeated
        );
        assert_eq!(
            check_feasible(&[0, 2, 0, 1, 0], &inst).unwrap_err().kind,
            ViolationKind::Malformed
        );
        assert_eq!(
            check_feasible(&[0, 2, 1, 0], &inst).unwrap_err().kind,
            ViolationKind::TimeWindow
        );
        assert_eq!(check_feasible(&[0, 0], &inst), Ok(()));
        assert!(Column::new(vec![0, 1, 2, 0], &inst, &Duals::zeros(2)).is_err());
    }

    /// Written separately from `check_feasible`: tracks service start times
    /// explicitly and validates everything in a second pass.
    fn reference_feasible(seq: &[usize], inst: &VrptwInstance) -> bool {
        if seq.len() < 2 || seq[0] != 0 || *seq.last().unwrap() != 0 {
            return false;
        }
        let inner = &seq[1..seq.len() - 1];
        if inner.iter().any(|&c| c == 0 || c >= inst.len()) {
            return false;
        }
        let mut sorted = inner.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != inner.len() {
            return false;
        }
        let total: f64 = inner.iter().map(|&c| inst.node(c).demand).sum();
        let mut partial = 0.0;
        for &c in inner {
            partial += inst.node(c).demand;
        }
        if partial > inst.capacity() || total > inst.capacity() {
            return false;
        }
        let mut starts = vec![0.0f64];
        for k in 1..seq.len() {
            let prev = seq[k - 1];
            let leave = starts[k - 1] + inst.node(prev).service;
            let reach = leave + inst.travel(prev, seq[k]);
            if reach > inst.node(seq[k]).due {
                return false;
            }
            starts.push(if reach < inst.node(seq[k]).ready {
                inst.node(seq[k]).ready
            } else {
                reach
            });
        }
        true
    }

    #[test]
    fn check_feasible_agrees_with_reference_simulator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = crate::generate::GenConfig {
            capacity: 20.0,
            ..crate::generate::GenConfig::for_size(8, 3)
        };
        let inst = crate::generate::generate_instance(&cfg);
        let mut feasible = 0;
        for _ in 0..100 {
            let len = rng.gen_range(0..6);
            let mut seq = vec![0];
            for _ in 0..len {
                seq.push(rng.gen_range(1..=8));
            }
            seq.push(0);
            let ours = check_feasible(&seq, &inst).is_ok();
            assert_eq!(ours, reference_feasible(&seq, &inst), "{seq:?}");
            assert_eq!(ours, Column::new(seq, &inst, &Duals::zeros(8)).is_ok());
            feasible += ours as usize;
        }
        assert!(feasible > 5);
    }

    #[test]
    fn reduced_cost_matches_arc_sum() {
        let inst = crate::generate::generate_instance(&crate::generate::GenConfig::for_size(6, 9));
        let duals = crate::generate::sample_duals(&inst, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 20 {
            let mut perm: Vec<usize> = (1..=6).collect();
            for k in (1..perm.len()).rev() {
                perm.swap(k, rng.gen_range(0..=k));
            }
            perm.truncate(rng.gen_range(1..4));
            let mut seq = vec![0];
            seq.extend(&perm);
            seq.push(0);
            let Ok(col) = Column::new(seq.clone(), &inst, &duals) else {
                continue;
            };
            let mut oracle = 0.0;
            for k in 1..seq.len() {
                let (a, b) = (inst.node(seq[k - 1]), inst.node(seq[k]));
                oracle += ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            }
            for &c in &perm {
                oracle -= duals.get(c);
            }
            assert!((col.reduced_cost() - oracle).abs() < 1e-9);
            assert!((reduced_cost(&col, &duals) - col.reduced_cost()).abs() < 1e-9);
            checked += 1;
        }
    }
}
