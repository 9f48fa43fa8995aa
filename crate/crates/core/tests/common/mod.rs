//! Oracles written independently of the crate's own simulators.
#![allow(dead_code)]

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use vrptw_cg_core::VrptwInstance;

fn dist(inst: &VrptwInstance, i: usize, j: usize) -> f64 {
    let (a, b) = (inst.node(i), inst.node(j));
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Every elementary feasible depot-to-depot route with at least one customer,
/// as (cost, customers in visiting order).
pub fn all_routes(inst: &VrptwInstance) -> Vec<(f64, Vec<usize>)> {
    fn go(
        inst: &VrptwInstance,
        path: &mut Vec<usize>,
        time: f64,
        load: f64,
        cost: f64,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        let last = *path.last().unwrap_or(&0);
        for j in 1..=inst.customers() {
            if path.contains(&j) {
                continue;
            }
            let node = inst.node(j);
            let arrive = time + dist(inst, last, j);
            if arrive > node.due || load + node.demand > inst.capacity() {
                continue;
            }
            let leave = arrive.max(node.ready) + node.service;
            let c = cost + dist(inst, last, j);
            path.push(j);
            if leave + dist(inst, j, 0) <= inst.node(0).due {
                out.push((c + dist(inst, j, 0), path.clone()));
            }
            go(inst, path, leave, load + node.demand, c, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(inst, &mut Vec::new(), inst.node(0).ready, 0.0, 0.0, &mut out);
    out
}

/// Optimum of the covering LP over every feasible route.
pub fn full_master_lp(inst: &VrptwInstance) -> f64 {
    let routes = all_routes(inst);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = routes
        .iter()
        .map(|(c, _)| lp.add_var(*c, (0.0, f64::INFINITY)))
        .collect();
    for i in 1..=inst.customers() {
        let expr: Vec<_> = routes
            .iter()
            .zip(&vars)
            .filter(|((_, r), _)| r.contains(&i))
            .map(|(_, v)| (*v, 1.0))
            .collect();
        lp.add_constraint(expr, ComparisonOp::Ge, 1.0);
    }
    match lp.solve().expect("full master LP solves") {
        microlp::SolveOutcome::Solution(s) => s.objective(),
        other => panic!("LP interrupted: {other:?}"),
    }
}

/// Minimum reduced cost over all routes and the empty route, given one dual per node.
pub fn best_reduced_cost(inst: &VrptwInstance, duals: &[f64]) -> f64 {
    all_routes(inst)
        .iter()
        .map(|(c, r)| c - r.iter().map(|&i| duals[i]).sum::<f64>())
        .fold(0.0, f64::min)
}
