//! Small instances whose answers are worked out independently in the test.

use vrptw_cg_core::generate::{generate_instance, sample_duals, GenConfig};
use vrptw_cg_core::heatmap::{adjust, surrogate_t};
use vrptw_cg_core::instance::{build_pricing, Duals, Node, INFEASIBLE_WEIGHT};
use vrptw_cg_core::pricing::{dp_price, exact_oracle, DpParams};
use vrptw_cg_core::reduction::{be2, full_mask, no_reduction, ulgr_mask};
use vrptw_cg_core::{Matrix, VrptwInstance};

fn node(x: f64, y: f64, demand: f64, service: f64, ready: f64, due: f64) -> Node {
    Node {
        x,
        y,
        demand,
        service,
        ready,
        due,
    }
}

#[test]
fn arc_lengths_match_direct_recomputation() {
    let inst = generate_instance(&GenConfig::for_size(5, 42));
    let duals = sample_duals(&inst, 42);
    let pricing = build_pricing(&inst, &duals).unwrap();
    let nodes = inst.nodes();
    let d = |i: usize, j: usize| ((nodes[i].x - nodes[j].x).powi(2) + (nodes[i].y - nodes[j].y).powi(2)).sqrt();
    let feasible = |i: usize, j: usize| i != j && nodes[i].ready + nodes[i].service + d(i, j) <= nodes[j].due;
    let mut scale = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            if feasible(i, j) {
                scale = scale.max((d(i, j) - duals.get(j)).abs());
            }
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            let p = (d(i, j) - duals.get(j)) / scale;
            assert!((pricing.arc_length(i, j) - p).abs() < 1e-12, "({i}, {j})");
            assert_eq!(pricing.is_feasible(i, j), feasible(i, j), "({i}, {j})");
        }
    }
}

#[test]
fn two_customers_zero_duals() {
    let inst = generate_instance(&GenConfig::for_size(2, 5));
    let pricing = build_pricing(&inst, &Duals::zeros(2)).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(pricing.arc_length(i, j) >= 0.0);
            if pricing.is_feasible(i, j) {
                assert!(pricing.weights()[(i, j)] > 0.0);
            } else {
                assert_eq!(pricing.weights()[(i, j)], INFEASIBLE_WEIGHT);
            }
        }
        assert!(!pricing.is_feasible(i, i));
    }
}

fn triangle() -> VrptwInstance {
    // Depot at the origin, customers at (3, 0) and (0, 4): lengths 3, 4, 5.
    VrptwInstance::new(
        10.0,
        vec![
            node(0.0, 0.0, 0.0, 0.0, 0.0, 100.0),
            node(3.0, 0.0, 1.0, 0.0, 0.0, 100.0),
            node(0.0, 4.0, 1.0, 0.0, 0.0, 100.0),
        ],
    )
    .unwrap()
}

#[test]
fn be2_half_keeps_three_shortest_arcs() {
    let inst = triangle();
    let pricing = build_pricing(&inst, &Duals::zeros(2)).unwrap();
    let g = be2(&pricing, 0.5);
    // Lengths: (0,1) (1,0) = 3, (0,2) (2,0) = 4, (1,2) (2,1) = 5. The tie at 4
    // goes to (0, 2).
    let kept: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|&(i, j)| g.keeps(i, j))
        .collect();
    assert_eq!(kept, vec![(0, 1), (0, 2), (1, 0)]);
    assert_eq!(g.retained(), 3);
}

#[test]
fn no_reduction_composes_with_pricing() {
    let inst = generate_instance(&GenConfig::for_size(9, 8));
    let pricing = build_pricing(&inst, &sample_duals(&inst, 8)).unwrap();
    let p = DpParams::baseline().with_expansions(5_000);
    let a = dp_price(&pricing, &no_reduction(&pricing), &p, 3);
    let b = dp_price(&pricing, &full_mask(pricing.dim()), &p, 3);
    assert_eq!(a, b);
    assert_eq!(no_reduction(&pricing).retained(), 9 * 10);
}

#[test]
fn ulgr_mask_four_nodes_by_hand() {
    // Customer rows keep their single largest entry:
    // row 1 -> depot, row 2 -> 1, row 3 -> 2.
    #[rustfmt::skip]
    let h = Matrix::from_vec(4, vec![
        0.0, 0.3, 0.3, 0.3,
        0.5, 0.0, 0.1, 0.3,
        0.2, 0.4, 0.0, 0.05,
        0.1, 0.1, 0.2, 0.0,
    ]).unwrap();
    let g = ulgr_mask(&adjust(&h, 1));
    for j in 1..4 {
        assert!(g.keeps(0, j) && g.keeps(j, 0));
    }
    let customer_arcs: Vec<(usize, usize)> = (1..4)
        .flat_map(|i| (1..4).map(move |j| (i, j)))
        .filter(|&(i, j)| g.keeps(i, j))
        .collect();
    assert_eq!(customer_arcs, vec![(1, 2), (2, 1), (2, 3), (3, 2)]);
}

#[test]
fn oracle_three_customers_by_hand() {
    // Customers on a line at x = 1, 2, 3 with wide windows and room for all.
    let inst = VrptwInstance::new(
        10.0,
        vec![
            node(0.0, 0.0, 0.0, 0.0, 0.0, 100.0),
            node(1.0, 0.0, 1.0, 0.0, 0.0, 100.0),
            node(2.0, 0.0, 1.0, 0.0, 0.0, 100.0),
            node(3.0, 0.0, 1.0, 0.0, 0.0, 100.0),
        ],
    )
    .unwrap();
    let duals = [0.0, 1.5, 2.5, 3.0];
    let pricing = build_pricing(&inst, &Duals::from_nodes(duals.to_vec()).unwrap()).unwrap();
    let sequences: [&[usize]; 15] = [
        &[1],
        &[2],
        &[3],
        &[1, 2],
        &[2, 1],
        &[1, 3],
        &[3, 1],
        &[2, 3],
        &[3, 2],
        &[1, 2, 3],
        &[1, 3, 2],
        &[2, 1, 3],
        &[2, 3, 1],
        &[3, 1, 2],
        &[3, 2, 1],
    ];
    let x = |i: usize| i as f64;
    let best = sequences
        .iter()
        .map(|s| {
            let mut prev = 0;
            let mut cost = 0.0;
            for &c in s.iter() {
                cost += (x(c) - x(prev)).abs();
                prev = c;
            }
            cost + x(prev) - s.iter().map(|&c| duals[c]).sum::<f64>()
        })
        .fold(0.0, f64::min);
    // 1 -> 2 -> 3 costs 6 and collects 7.
    assert_eq!(best, -1.0);
    let res = exact_oracle(&pricing, &no_reduction(&pricing)).unwrap();
    assert_eq!(res.reduced_cost, best);
    assert_eq!(res.routes, 16);
    assert_eq!(res.column.sequence(), &[0, 1, 2, 3, 0]);
}

#[test]
fn oracle_full_mask_bounds_reduced_masks() {
    for seed in 0..20 {
        let inst = generate_instance(&GenConfig::for_size(8, seed));
        let pricing = build_pricing(&inst, &sample_duals(&inst, seed)).unwrap();
        let full = exact_oracle(&pricing, &no_reduction(&pricing)).unwrap().reduced_cost;
        let reduced = exact_oracle(&pricing, &be2(&pricing, 0.4)).unwrap().reduced_cost;
        let ulgr = exact_oracle(
            &pricing,
            &ulgr_mask(&adjust(
                &vrptw_cg_core::heatmap::heat_from_t(&surrogate_t(&pricing, 0.5).unwrap()),
                2,
            )),
        )
        .unwrap()
        .reduced_cost;
        assert!(full <= reduced && full <= ulgr);
    }
}

#[test]
fn surrogate_softmax_by_hand() {
    let inst = generate_instance(&GenConfig::for_size(4, 17));
    let pricing = build_pricing(&inst, &sample_duals(&inst, 17)).unwrap();
    let t = surrogate_t(&pricing, 1.0).unwrap();
    let q = pricing.weights();
    for i in 0..5 {
        let z: f64 = (0..5).map(|j| (-q[(i, j)]).exp()).sum();
        for j in 0..5 {
            assert!((t.matrix()[(i, j)] - (-q[(i, j)]).exp() / z).abs() < 1e-12);
            for k in 0..5 {
                if q[(i, j)] == q[(i, k)] {
                    assert_eq!(t.matrix()[(i, j)], t.matrix()[(i, k)]);
                }
            }
        }
    }
    let hot = surrogate_t(&pricing, 1e12).unwrap();
    assert!(hot.matrix().as_slice().iter().all(|v| (v - 0.2).abs() < 1e-9));
    assert!(surrogate_t(&pricing, 0.0).is_err());
    assert!(surrogate_t(&pricing, -1.0).is_err());
}

#[test]
fn construction_always_seeds_a_route() {
    use vrptw_cg_core::pricing::construct_initial;
    let params = DpParams::construction().with_expansions(500);
    let mut fallbacks = 0;
    for seed in 0..50 {
        let inst = generate_instance(&GenConfig::for_size(15, seed));
        let pricing = build_pricing(&inst, &sample_duals(&inst, seed)).unwrap();
        let mask = no_reduction(&pricing);
        let a = construct_initial(&pricing, &mask, &params, seed);
        assert!(!a.columns.is_empty());
        if a.stats.fallback {
            fallbacks += 1;
            assert_eq!(a.columns.len(), 1);
            assert_eq!(a.columns[0].customers().len(), 1);
        } else {
            assert!(a.columns.iter().all(|c| c.reduced_cost() < 0.5));
        }
        assert_eq!(a, construct_initial(&pricing, &mask, &params, seed));
    }
    assert!(fallbacks < 50);
}
