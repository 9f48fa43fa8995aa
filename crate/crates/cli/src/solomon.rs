//! Solomon and Gehring-Homberger benchmark files.
//!
//! ```text
//! R1_2_1
//!
//! VEHICLE
//! NUMBER     CAPACITY
//!   50          200
//!
//! CUSTOMER
//! CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME
//!     0       70         70          0          0        634          0
//!     1       33         78         20        327        347         10
//! ```
//!
//! The name line and blank lines are optional. Customer rows must list ids
//! `0, 1, 2, ...` in order, the depot first.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;
use vrptw_cg_core::instance::{InstanceError, Node};
use vrptw_cg_core::VrptwInstance;

const COLUMNS: [&str; 7] = ["id", "x", "y", "demand", "ready", "due", "service"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawBenchmark {
    pub name: String,
    /// Fleet size from the header. The root LP has no fleet bound.
    pub vehicles: usize,
    pub capacity: f64,
    pub rows: Vec<Row>,
}

impl RawBenchmark {
    pub fn customers(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("io: {0}")]
    Io(String),
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: &'static str },
    #[error("line {line}: {column} is not a number: {value:?}")]
    NotNumeric {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: row is missing the {column} column")]
    MissingColumn { line: usize, column: &'static str },
    #[error("line {line}: unexpected extra field {value:?}")]
    ExtraColumn { line: usize, value: String },
    #[error("line {line}: customer id {id} appears twice")]
    DuplicateId { line: usize, id: usize },
    #[error("line {line}: expected customer id {expected}, found {found}")]
    NonContiguous { line: usize, expected: usize, found: usize },
    #[error("no customer rows")]
    NoRows,
}

#[derive(Debug, Error, PartialEq)]
pub enum NormalizeError {
    #[error("largest coordinate is zero")]
    ZeroCoordinates,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn number(line: usize, column: &'static str, token: &str) -> Result<f64, ParseError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::NotNumeric {
            line,
            column,
            value: token.to_string(),
        })
}

fn id(line: usize, token: &str) -> Result<usize, ParseError> {
    let v = number(line, "id", token)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(ParseError::NotNumeric {
            line,
            column: "id",
            value: token.to_string(),
        });
    }
    Ok(v as usize)
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    VehicleHeader,
    VehicleValues,
    CustomerHeader,
    Rows,
}

pub fn parse_str(text: &str) -> Result<RawBenchmark, ParseError> {
    let mut name = String::new();
    let mut fleet = None;
    let mut rows: Vec<Row> = Vec::new();
    let mut section = Section::Preamble;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let upper = tokens[0].to_ascii_uppercase();
        match section {
            Section::Preamble if upper == "VEHICLE" => section = Section::VehicleHeader,
            Section::Preamble if name.is_empty() => name = raw.trim().to_string(),
            Section::Preamble => {
                return Err(ParseError::Header {
                    line,
                    reason: "expected the VEHICLE section",
                })
            }
            Section::VehicleHeader => {
                if upper != "NUMBER" {
                    return Err(ParseError::Header {
                        line,
                        reason: "expected the NUMBER CAPACITY header",
                    });
                }
                section = Section::VehicleValues;
            }
            Section::VehicleValues => {
                if tokens.len() != 2 {
                    return Err(ParseError::Header {
                        line,
                        reason: "expected vehicle number and capacity",
                    });
                }
                let vehicles = number(line, "vehicles", tokens[0])?;
                let capacity = number(line, "capacity", tokens[1])?;
                fleet = Some((vehicles as usize, capacity));
                section = Section::CustomerHeader;
            }
            Section::CustomerHeader => {
                if upper == "CUSTOMER" {
                    continue;
                }
                if upper.starts_with("CUST") {
                    section = Section::Rows;
                    continue;
                }
                return Err(ParseError::Header {
                    line,
                    reason: "expected the CUSTOMER section",
                });
            }
            Section::Rows => {
                if let Some(extra) = tokens.get(COLUMNS.len()) {
                    return Err(ParseError::ExtraColumn {
                        line,
                        value: extra.to_string(),
                    });
                }
                if tokens.len() < COLUMNS.len() {
                    return Err(ParseError::MissingColumn {
                        line,
                        column: COLUMNS[tokens.len()],
                    });
                }
                let row_id = id(line, tokens[0])?;
                if rows.iter().any(|r| r.id == row_id) {
                    return Err(ParseError::DuplicateId { line, id: row_id });
                }
                if row_id != rows.len() {
                    return Err(ParseError::NonContiguous {
                        line,
                        expected: rows.len(),
                        found: row_id,
                    });
                }
                let v: Vec<f64> = tokens[1..]
                    .iter()
                    .zip(&COLUMNS[1..])
                    .map(|(t, c)| number(line, c, t))
                    .collect::<Result<_, _>>()?;
                rows.push(Row {
                    id: row_id,
                    x: v[0],
                    y: v[1],
                    demand: v[2],
                    ready: v[3],
                    due: v[4],
                    service: v[5],
                });
            }
        }
    }
    let Some((vehicles, capacity)) = fleet else {
        return Err(ParseError::Header {
            line: text.lines().count(),
            reason: "missing VEHICLE section",
        });
    };
    if rows.is_empty() {
        return Err(ParseError::NoRows);
    }
    Ok(RawBenchmark {
        name,
        vehicles,
        capacity,
        rows,
    })
}

pub fn parse(path: &Path) -> Result<RawBenchmark, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::Io(e.to_string()))?;
    parse_str(&text)
}

/// Writes the layout [`parse_str`] reads. Numbers use Rust's shortest
/// round-trip formatting, so parsing the output gives back the same values.
pub fn serialize(raw: &RawBenchmark) -> String {
    let mut out = String::new();
    if !raw.name.is_empty() {
        writeln!(out, "{}\n", raw.name).unwrap();
    }
    writeln!(
        out,
        "VEHICLE\nNUMBER     CAPACITY\n  {}  {}\n",
        raw.vehicles, raw.capacity
    )
    .unwrap();
    writeln!(
        out,
        "CUSTOMER\nCUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n"
    )
    .unwrap();
    for r in &raw.rows {
        writeln!(
            out,
            "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            r.id, r.x, r.y, r.demand, r.ready, r.due, r.service
        )
        .unwrap();
    }
    out
}

/// Scaling applied to model inputs only. The LP keeps native units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelScaling {
    /// Largest coordinate rounded up to a multiple of 100.
    pub coord_divisor: f64,
    /// Depot due time over 2.
    pub dual_divisor: f64,
}

impl ModelScaling {
    pub fn coords(&self, inst: &VrptwInstance) -> Vec<(f64, f64)> {
        inst.nodes()
            .iter()
            .map(|v| (v.x / self.coord_divisor, v.y / self.coord_divisor))
            .collect()
    }

    pub fn duals(&self, duals: &[f64]) -> Vec<f64> {
        duals.iter().map(|d| d / self.dual_divisor).collect()
    }
}

/// `ceil(max / 100) * 100`.
pub fn coord_divisor(max_coord: f64) -> f64 {
    (max_coord / 100.0).ceil() * 100.0
}

/// Builds the LP instance in native units and the scaling for model inputs.
pub fn normalize(raw: &RawBenchmark) -> Result<(VrptwInstance, ModelScaling), NormalizeError> {
    let max_coord = raw.rows.iter().flat_map(|r| [r.x.abs(), r.y.abs()]).fold(0.0, f64::max);
    if max_coord <= 0.0 {
        return Err(NormalizeError::ZeroCoordinates);
    }
    let nodes = raw
        .rows
        .iter()
        .map(|r| Node {
            x: r.x,
            y: r.y,
            demand: r.demand,
            service: r.service,
            ready: r.ready,
            due: r.due,
        })
        .collect();
    let inst = VrptwInstance::new(raw.capacity, nodes)?;
    let scaling = ModelScaling {
        coord_divisor: coord_divisor(max_coord),
        dual_divisor: inst.horizon() / 2.0,
    };
    Ok((inst, scaling))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SNIPPET: &str = "\
TOY
VEHICLE
NUMBER CAPACITY
  3  20
CUSTOMER
CUST NO. XCOORD. YCOORD. DEMAND READY TIME DUE DATE SERVICE TIME
0 0 0 0 0 100 0
1 10 0 5 0 50 2
2 0 10 5 10 60 2
3 -10 0 5 0 70 2
4 0 -10 5 20 90 2
";

    #[test]
    fn snippet() {
        let raw = parse_str(SNIPPET).unwrap();
        assert_eq!(raw.name, "TOY");
        assert_eq!(raw.customers(), 4);
        assert_eq!((raw.vehicles, raw.capacity), (3, 20.0));
        assert_eq!(raw.rows[2].ready, 10.0);
    }

    #[test]
    fn missing_due_date() {
        let text = SNIPPET.replace("2 0 10 5 10 60 2", "2 0 10 5 10");
        assert_eq!(
            parse_str(&text),
            Err(ParseError::MissingColumn { line: 9, column: "due" })
        );
    }

    #[test]
    fn distinct_errors() {
        let dup = SNIPPET.replace("3 -10 0", "2 -10 0");
        assert!(matches!(
            parse_str(&dup),
            Err(ParseError::DuplicateId { line: 10, id: 2 })
        ));
        let bad = SNIPPET.replace("4 0 -10 5", "4 0 -10 five");
        assert!(matches!(
            parse_str(&bad),
            Err(ParseError::NotNumeric {
                line: 11,
                column: "demand",
                ..
            })
        ));
        let header = SNIPPET.replace("NUMBER CAPACITY", "FLEET");
        assert!(matches!(parse_str(&header), Err(ParseError::Header { line: 3, .. })));
        let gap = SNIPPET.replace("4 0 -10", "5 0 -10");
        assert!(matches!(
            parse_str(&gap),
            Err(ParseError::NonContiguous {
                expected: 4,
                found: 5,
                ..
            })
        ));
    }

    #[test]
    fn divisors() {
        assert_eq!(coord_divisor(93.4), 100.0);
        assert_eq!(coord_divisor(230.0), 300.0);
        assert_eq!(coord_divisor(100.0), 100.0);
    }

    #[test]
    fn normalize_snippet() {
        let (inst, s) = normalize(&parse_str(SNIPPET).unwrap()).unwrap();
        assert_eq!(s.coord_divisor, 100.0);
        assert_eq!(s.dual_divisor, 50.0);
        assert_eq!(inst.travel(1, 3), 20.0);
    }

    #[test]
    fn round_trip() {
        let raw = parse_str(SNIPPET).unwrap();
        assert_eq!(parse_str(&serialize(&raw)).unwrap(), raw);
    }
}
