//! JSON layout of instances and dual vectors.
//!
//! ```json
//! { "n": 2, "capacity": 50, "depot_tw": [0, 18],
//!   "nodes": [ {"x": 0.5, "y": 0.5, "demand": 0, "service": 0, "tw": [0, 18]}, ... ] }
//! ```
//!
//! Node 0 is the depot. Its window must agree with `depot_tw`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vrptw_cg_core::instance::{Duals, DualsError, InstanceError, Node};
use vrptw_cg_core::VrptwInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub service: f64,
    pub tw: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub capacity: f64,
    pub depot_tw: [f64; 2],
    pub nodes: Vec<NodeJson>,
}

/// Dual prices indexed by node, depot first. `theta` is the interval factor
/// the vector was sampled with, when it was sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub duals: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("n is {n} but {nodes} nodes are listed (expected n + 1)")]
    Count { n: usize, nodes: usize },
    #[error("depot_tw {depot_tw:?} disagrees with node 0 window {node:?}")]
    DepotWindow { depot_tw: [f64; 2], node: [f64; 2] },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Duals(#[from] DualsError),
    #[error("{found} duals for {expected} nodes")]
    DualCount { expected: usize, found: usize },
}

impl From<&VrptwInstance> for InstanceJson {
    fn from(inst: &VrptwInstance) -> Self {
        let depot = inst.node(0);
        InstanceJson {
            n: inst.customers(),
            capacity: inst.capacity(),
            depot_tw: [depot.ready, depot.due],
            nodes: inst
                .nodes()
                .iter()
                .map(|v| NodeJson {
                    x: v.x,
                    y: v.y,
                    demand: v.demand,
                    service: v.service,
                    tw: [v.ready, v.due],
                })
                .collect(),
        }
    }
}

impl InstanceJson {
    pub fn into_instance(self) -> Result<VrptwInstance, JsonError> {
        if self.nodes.len() != self.n + 1 {
            return Err(JsonError::Count {
                n: self.n,
                nodes: self.nodes.len(),
            });
        }
        if self.nodes[0].tw != self.depot_tw {
            return Err(JsonError::DepotWindow {
                depot_tw: self.depot_tw,
                node: self.nodes[0].tw,
            });
        }
        let nodes = self
            .nodes
            .into_iter()
            .map(|v| Node {
                x: v.x,
                y: v.y,
                demand: v.demand,
                service: v.service,
                ready: v.tw[0],
                due: v.tw[1],
            })
            .collect();
        Ok(VrptwInstance::new(self.capacity, nodes)?)
    }
}

pub fn instance_to_string(inst: &VrptwInstance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from(inst)).expect("instance JSON is serializable")
}

pub fn instance_from_str(text: &str) -> Result<VrptwInstance, JsonError> {
    serde_json::from_str::<InstanceJson>(text)?.into_instance()
}

pub fn read_instance(path: &Path) -> Result<VrptwInstance, JsonError> {
    instance_from_str(&fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &VrptwInstance) -> Result<(), JsonError> {
    fs::write(path, instance_to_string(inst))?;
    Ok(())
}

pub fn duals_to_string(duals: &Duals, theta: Option<f64>) -> String {
    serde_json::to_string_pretty(&DualsJson {
        theta,
        duals: duals.as_slice().to_vec(),
    })
    .expect("dual JSON is serializable")
}

/// Reads a dual vector and checks it against an instance of `customers` customers.
pub fn read_duals(path: &Path, customers: usize) -> Result<Duals, JsonError> {
    let parsed: DualsJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    if parsed.duals.len() != customers + 1 {
        return Err(JsonError::DualCount {
            expected: customers + 1,
            found: parsed.duals.len(),
        });
    }
    Ok(Duals::from_nodes(parsed.duals)?)
}
