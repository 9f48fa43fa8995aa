//! CSV output.
//!
//! Iteration logs have the columns `iter, wall_ms, objective, best_rc,
//! cols_added, pricing_ms`; `best_rc` is empty when pricing returned nothing.
//! A comparison is written as three tables: one row per instance, one row per
//! summary metric, and the mean best reduced cost per iteration.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use vrptw_cg_core::cg::{CgRun, Termination};
use vrptw_cg_core::metrics::{Comparison, Winner};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub iter: usize,
    pub wall_ms: f64,
    pub objective: f64,
    pub best_rc: Option<f64>,
    pub cols_added: usize,
    pub pricing_ms: f64,
}

pub fn log_rows(run: &CgRun) -> Vec<LogRow> {
    run.iterations
        .iter()
        .map(|l| LogRow {
            iter: l.iter,
            wall_ms: l.wall_ms,
            objective: l.objective,
            best_rc: l.best_rc,
            cols_added: l.cols_added,
            pricing_ms: l.pricing_ms,
        })
        .collect()
}

pub fn write_log<W: Write>(out: W, run: &CgRun) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in log_rows(run) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_log<R: Read>(input: R) -> csv::Result<Vec<LogRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

fn reason(t: Termination) -> &'static str {
    match t {
        Termination::PricedOut => "priced-out",
        Termination::IterationLimit => "iteration-limit",
        Termination::TimeLimit => "time-limit",
        Termination::Stalled => "stalled",
    }
}

#[derive(Debug, Serialize)]
struct InstanceRow<'a> {
    instance: &'a str,
    objective_a: f64,
    objective_b: f64,
    gap: f64,
    winner: &'static str,
    speedup: Option<f64>,
    iterations_a: usize,
    iterations_b: usize,
    reason_a: &'static str,
    reason_b: &'static str,
}

pub fn write_instances<W: Write>(out: W, names: &[String], c: &Comparison) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (name, r) in names.iter().zip(&c.instances) {
        w.serialize(InstanceRow {
            instance: name,
            objective_a: r.objective_a,
            objective_b: r.objective_b,
            gap: r.gap,
            winner: match r.winner {
                Winner::A => "a",
                Winner::B => "b",
                Winner::Tie => "tie",
            },
            speedup: r.speedup,
            iterations_a: r.iterations_a,
            iterations_b: r.iterations_b,
            reason_a: reason(r.reason_a),
            reason_b: reason(r.reason_b),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// `metric,value` rows. Undefined speed-ups are left empty.
pub fn write_summary<W: Write>(out: W, c: &Comparison) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "value"])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let n = c.instances.len();
    let rows = [
        ("instances", n.to_string()),
        ("obj_gap", c.obj_gap.to_string()),
        ("j_a_better", format!("{}/{}", c.a_better, n)),
        ("j_b_better", format!("{}/{}", c.b_better, n)),
        ("ties", c.ties.to_string()),
        ("speedup_a_better", opt(c.speedup_a_better)),
        ("speedup_b_better", opt(c.speedup_b_better)),
        ("speedup", opt(c.speedup)),
        ("mean_iterations_a", c.mean_iterations_a.to_string()),
        ("mean_iterations_b", c.mean_iterations_b.to_string()),
        ("mean_pricing_ms_a", c.mean_pricing_ms_a.to_string()),
        ("mean_pricing_ms_b", c.mean_pricing_ms_b.to_string()),
        ("mean_iteration_ms_a", c.mean_iteration_ms_a.to_string()),
        ("mean_iteration_ms_b", c.mean_iteration_ms_b.to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rc_series<W: Write>(out: W, c: &Comparison) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &c.rc_series {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
