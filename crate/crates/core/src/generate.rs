//! Random C-VRPTW instances and representative dual vectors.
//!
//! Every random quantity comes from ChaCha8 seeded with the configuration seed,
//! with one stream per field (see [`Stream`]). Adding a field means adding a
//! stream, so existing fields keep their values for a given seed.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Duals, Node, VrptwInstance};

/// ChaCha stream ids, one per generated field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Coordinates = 0,
    Demand = 1,
    Service = 2,
    WindowStart = 3,
    WindowLength = 4,
    Duals = 16,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenConfig {
    pub n: usize,
    pub capacity: f64,
    pub seed: u64,
    /// Upper end of the depot window.
    pub horizon: f64,
    /// Redraw a customer's window while the customer cannot be served by a
    /// dedicated vehicle. Without this an instance may have no covering
    /// solution at all.
    pub ensure_reachable: bool,
}

impl GenConfig {
    /// Capacity 80 for 1000 customers and above, 50 otherwise.
    pub fn for_size(n: usize, seed: u64) -> Self {
        GenConfig {
            n,
            capacity: if n >= 1000 { 80.0 } else { 50.0 },
            seed,
            horizon: 18.0,
            ensure_reachable: true,
        }
    }
}

const MAX_WINDOW_REDRAWS: usize = 256;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Coordinates uniform in the unit square, integer demands in 1..=10, service
/// uniform in [0.2, 0.5], windows `[a, a + L]` with `a` integer in 0..=16 and
/// `L` in {1, 2}; depot window `[0, horizon]`.
pub fn generate_instance(cfg: &GenConfig) -> VrptwInstance {
    let mut coords = rng_for(cfg.seed, Stream::Coordinates);
    let mut demand = rng_for(cfg.seed, Stream::Demand);
    let mut service = rng_for(cfg.seed, Stream::Service);
    let mut start = rng_for(cfg.seed, Stream::WindowStart);
    let mut length = rng_for(cfg.seed, Stream::WindowLength);

    let mut nodes = Vec::with_capacity(cfg.n + 1);
    let (dx, dy) = (coords.gen::<f64>(), coords.gen::<f64>());
    nodes.push(Node {
        x: dx,
        y: dy,
        demand: 0.0,
        service: 0.0,
        ready: 0.0,
        due: cfg.horizon,
    });
    for _ in 0..cfg.n {
        let x = coords.gen::<f64>();
        let y = coords.gen::<f64>();
        let q = demand.gen_range(1..=10) as f64;
        let s = uniform(&mut service, 0.2, 0.5);
        let out = libm::sqrt((x - dx) * (x - dx) + (y - dy) * (y - dy));
        let mut window = || {
            let a = start.gen_range(0..=16) as f64;
            let l = if length.gen::<bool>() { 2.0 } else { 1.0 };
            (a, a + l)
        };
        let (mut a, mut b) = window();
        if cfg.ensure_reachable {
            let mut tries = 0;
            while !singleton_feasible(out, s, a, b, cfg.horizon) && tries < MAX_WINDOW_REDRAWS {
                (a, b) = window();
                tries += 1;
            }
        }
        nodes.push(Node {
            x,
            y,
            demand: q,
            service: s,
            ready: a,
            due: b,
        });
    }
    VrptwInstance::new(cfg.capacity.max(10.0), nodes).expect("generated instances satisfy the instance invariants")
}

fn singleton_feasible(dist: f64, service: f64, ready: f64, due: f64, horizon: f64) -> bool {
    dist <= due && dist.max(ready) + service + dist <= horizon
}

/// Draws `theta ~ U[0.2, 1.1]` once, then `d_i ~ U[0, theta * t_i^max]` where
/// `t_i^max` is the largest travel time into `i`.
pub fn sample_duals(instance: &VrptwInstance, seed: u64) -> Duals {
    sample_duals_with_theta(instance, seed).0
}

/// Same draw as [`sample_duals`], also returning the scaling factor.
pub fn sample_duals_with_theta(instance: &VrptwInstance, seed: u64) -> (Duals, f64) {
    let mut rng = rng_for(seed, Stream::Duals);
    let theta = uniform(&mut rng, 0.2, 1.1);
    let values: Vec<f64> = (1..instance.len())
        .map(|i| uniform(&mut rng, 0.0, theta * instance.max_inbound_travel(i)))
        .collect();
    let duals = Duals::from_customers(&values).expect("sampled duals are nonnegative");
    (duals, theta)
}
