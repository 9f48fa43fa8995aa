//! Restricted master problem: set covering over the routes generated so far.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{Column, Duals, DualsError};
use crate::simplex::{CoveringLp, LpColumn, LpError};

#[derive(Debug, Clone)]
pub struct RmpSolution {
    pub objective: f64,
    /// Value of each column, in insertion order.
    pub primal: Vec<f64>,
    pub duals: Duals,
}

#[derive(Debug, Clone)]
pub struct Rmp {
    customers: usize,
    columns: Vec<Column>,
    seen: BTreeSet<Vec<usize>>,
    lp: CoveringLp,
}

impl Rmp {
    pub fn new(customers: usize) -> Self {
        Rmp {
            customers,
            columns: Vec::new(),
            seen: BTreeSet::new(),
            lp: CoveringLp::new(alloc::vec![1.0; customers]),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, column: &Column) -> bool {
        self.seen.contains(column.sequence())
    }

    /// Appends the columns whose sequence is new. Returns how many were added.
    pub fn add_columns<I>(&mut self, new: I) -> usize
    where
        I: IntoIterator<Item = Column>,
    {
        let mut added = 0;
        for column in new {
            if column.customers().iter().any(|&c| c > self.customers) {
                continue;
            }
            if !self.seen.insert(column.sequence().to_vec()) {
                continue;
            }
            let entries = column.customers().iter().map(|&c| (c - 1, 1.0)).collect();
            self.lp
                .add_column(LpColumn {
                    cost: column.cost(),
                    entries,
                })
                .expect("customer indices checked above");
            self.columns.push(column);
            added += 1;
        }
        added
    }

    pub fn solve(&mut self) -> Result<RmpSolution, LpError> {
        let sol = self.lp.solve()?;
        let duals = Duals::from_customers(&sol.duals).map_err(|e| match e {
            DualsError::Invalid(i) => LpError::Infeasible(sol.duals[i - 1]),
            _ => LpError::Singular,
        })?;
        Ok(RmpSolution {
            objective: sol.objective,
            primal: sol.primal,
            duals,
        })
    }

    /// Writes the LP in CPLEX LP text format.
    pub fn write_lp<W: fmt::Write>(&self, out: &mut W) -> fmt::Result {
        writeln!(out, "\\ restricted master problem")?;
        writeln!(out, "Minimize")?;
        write!(out, " obj:")?;
        for (r, column) in self.columns.iter().enumerate() {
            write!(out, " + {:?} x{}", column.cost(), r)?;
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for customer in 1..=self.customers {
            write!(out, " c{customer}:")?;
            for (r, column) in self.columns.iter().enumerate() {
                if column.covers(customer) {
                    write!(out, " + x{r}")?;
                }
            }
            writeln!(out, " >= 1")?;
        }
        writeln!(out, "End")
    }
}
