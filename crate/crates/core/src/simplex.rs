//! Dense revised simplex for covering-type LPs
//! `min c'x  s.t.  A x >= b, x >= 0` with `b >= 0`.
//!
//! Rows get a surplus variable each; phase 1 starts from an artificial basis.
//! The basis and its explicit inverse persist between solves, so appending
//! columns and re-solving warm-starts from the previous optimum.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Feasibility and optimality tolerance.
pub const TOLERANCE: f64 = 1e-9;
const PIVOT_TOLERANCE: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP is infeasible (phase 1 residual {0})")]
    Infeasible(f64),
    #[error("LP is unbounded")]
    Unbounded,
    #[error("basis matrix became singular")]
    Singular,
    #[error("no convergence within {0} pivots")]
    IterationLimit(usize),
    #[error("column references row {row} of {rows}")]
    BadRow { row: usize, rows: usize },
}

/// A structural column: cost and sparse (row, coefficient) entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LpColumn {
    pub cost: f64,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Surplus(usize),
    Structural(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One multiplier per row; nonnegative for `>=` rows at optimality.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone)]
pub struct CoveringLp {
    rows: usize,
    rhs: Vec<f64>,
    columns: Vec<LpColumn>,
    basis: Vec<Var>,
    /// Row-major explicit basis inverse.
    inverse: Vec<f64>,
    values: Vec<f64>,
    feasible_basis: bool,
    since_refactor: usize,
}

impl CoveringLp {
    pub fn new(rhs: Vec<f64>) -> Self {
        let rows = rhs.len();
        CoveringLp {
            rows,
            rhs,
            columns: Vec::new(),
            basis: Vec::new(),
            inverse: Vec::new(),
            values: Vec::new(),
            feasible_basis: false,
            since_refactor: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> &[LpColumn] {
        &self.columns
    }

    pub fn add_column(&mut self, column: LpColumn) -> Result<usize, LpError> {
        if let Some(&(row, _)) = column.entries.iter().find(|(r, _)| *r >= self.rows) {
            return Err(LpError::BadRow { row, rows: self.rows });
        }
        self.columns.push(column);
        Ok(self.columns.len() - 1)
    }

    fn bland_key(&self, var: Var) -> usize {
        match var {
            Var::Surplus(i) => i,
            Var::Structural(j) => self.rows + j,
            Var::Artificial(i) => self.rows + self.columns.len() + i,
        }
    }

    fn cost(&self, var: Var, phase: Phase) -> f64 {
        match (phase, var) {
            (Phase::One, Var::Artificial(_)) => 1.0,
            (Phase::One, _) => 0.0,
            (Phase::Two, Var::Structural(j)) => self.columns[j].cost,
            (Phase::Two, _) => 0.0,
        }
    }

    /// `B^-1 a_var`.
    fn ftran(&self, var: Var) -> Vec<f64> {
        let m = self.rows;
        let mut out = vec![0.0; m];
        let mut add = |k: usize, coef: f64| {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.inverse[i * m + k] * coef;
            }
        };
        match var {
            Var::Surplus(k) => add(k, -1.0),
            Var::Artificial(k) => add(k, 1.0),
            Var::Structural(j) => {
                for &(k, coef) in &self.columns[j].entries {
                    add(k, coef);
                }
            }
        }
        out
    }

    fn row_prices(&self, phase: Phase) -> Vec<f64> {
        let m = self.rows;
        let mut y = vec![0.0; m];
        for (i, &var) in self.basis.iter().enumerate() {
            let c = self.cost(var, phase);
            if c != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += c * self.inverse[i * m + k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, var: Var, y: &[f64], phase: Phase) -> f64 {
        let c = self.cost(var, phase);
        match var {
            Var::Surplus(k) => c + y[k],
            Var::Artificial(k) => c - y[k],
            Var::Structural(j) => c - self.columns[j].entries.iter().map(|&(k, a)| y[k] * a).sum::<f64>(),
        }
    }

    fn start_artificial(&mut self) {
        let m = self.rows;
        self.basis = (0..m).map(Var::Artificial).collect();
        self.inverse = vec![0.0; m * m];
        for i in 0..m {
            self.inverse[i * m + i] = 1.0;
        }
        self.values = self.rhs.clone();
        self.since_refactor = 0;
    }

    fn column_dense(&self, var: Var) -> Vec<f64> {
        let mut col = vec![0.0; self.rows];
        match var {
            Var::Surplus(k) => col[k] = -1.0,
            Var::Artificial(k) => col[k] = 1.0,
            Var::Structural(j) => {
                for &(k, a) in &self.columns[j].entries {
                    col[k] += a;
                }
            }
        }
        col
    }

    /// Rebuilds the inverse from the basis by Gauss-Jordan with partial pivoting.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.rows;
        let mut a = vec![0.0; m * m];
        for (j, &var) in self.basis.iter().enumerate() {
            for (i, v) in self.column_dense(var).into_iter().enumerate() {
                a[i * m + j] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&r, &s| a[r * m + col].abs().total_cmp(&a[s * m + col].abs()))
                .unwrap_or(col);
            if a[pivot * m + col].abs() < 1e-12 {
                return Err(LpError::Singular);
            }
            if pivot != col {
                for k in 0..m {
                    a.swap(pivot * m + k, col * m + k);
                    inv.swap(pivot * m + k, col * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.inverse = inv;
        self.values = (0..m)
            .map(|i| {
                let v: f64 = (0..m).map(|k| self.inverse[i * m + k] * self.rhs[k]).sum();
                if v < 0.0 && v > -TOLERANCE {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: Var, direction: &[f64]) -> Result<(), LpError> {
        let m = self.rows;
        let w = direction[row];
        let step = self.values[row] / w;
        for (i, value) in self.values.iter_mut().enumerate() {
            if i == row {
                *value = step;
            } else {
                *value -= step * direction[i];
                if *value < 0.0 && *value > -TOLERANCE {
                    *value = 0.0;
                }
            }
        }
        let pivot_row: Vec<f64> = self.inverse[row * m..(row + 1) * m].iter().map(|v| v / w).collect();
        for i in 0..m {
            if i == row {
                self.inverse[i * m..(i + 1) * m].copy_from_slice(&pivot_row);
            } else if direction[i] != 0.0 {
                let f = direction[i];
                for k in 0..m {
                    self.inverse[i * m + k] -= f * pivot_row[k];
                }
            }
        }
        self.basis[row] = entering;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    fn candidates(&self, phase: Phase) -> impl Iterator<Item = Var> + '_ {
        let surplus = (0..self.rows).map(Var::Surplus);
        let structural = (0..self.columns.len()).map(Var::Structural);
        let artificial = (0..self.rows).map(Var::Artificial).filter(move |_| phase == Phase::One);
        surplus.chain(structural).chain(artificial)
    }

    fn iterate(&mut self, phase: Phase, pivots: &mut usize) -> Result<(), LpError> {
        let bland_after = 5 * (self.rows + self.columns.len() + self.rows);
        let limit = 50 * (self.rows + self.columns.len()) + 10_000;
        let mut degenerate_run = 0usize;
        let mut in_basis = vec![false; self.rows + self.columns.len() + self.rows];
        for &v in &self.basis {
            in_basis[self.bland_key(v)] = true;
        }
        loop {
            if *pivots > limit {
                return Err(LpError::IterationLimit(*pivots));
            }
            let bland = degenerate_run > bland_after;
            let y = self.row_prices(phase);
            let mut entering: Option<(Var, f64)> = None;
            for var in self.candidates(phase) {
                if in_basis[self.bland_key(var)] {
                    continue;
                }
                let d = self.reduced_cost(var, &y, phase);
                if d < -TOLERANCE {
                    if bland {
                        entering = Some((var, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((var, d));
                    }
                }
            }
            let Some((var, _)) = entering else {
                return Ok(());
            };
            let direction = self.ftran(var);
            let mut leave: Option<(usize, f64)> = None;
            for (i, &w) in direction.iter().enumerate() {
                if w <= PIVOT_TOLERANCE {
                    continue;
                }
                let ratio = self.values[i] / w;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let better = if ratio < best - 1e-12 {
                            true
                        } else if ratio <= best + 1e-12 {
                            if bland {
                                self.bland_key(self.basis[i]) < self.bland_key(self.basis[r])
                            } else {
                                w > direction[r]
                            }
                        } else {
                            false
                        };
                        if better {
                            Some((i, ratio.min(best)))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((row, step)) = leave else {
                return Err(LpError::Unbounded);
            };
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            in_basis[self.bland_key(self.basis[row])] = false;
            in_basis[self.bland_key(var)] = true;
            self.pivot(row, var, &direction)?;
            *pivots += 1;
        }
    }

    /// Pivots zero-valued artificials out of the basis after phase 1.
    fn expel_artificials(&mut self, pivots: &mut usize) -> Result<(), LpError> {
        for row in 0..self.rows {
            if !matches!(self.basis[row], Var::Artificial(_)) {
                continue;
            }
            let m = self.rows;
            let mut chosen = None;
            for var in (0..m)
                .map(Var::Surplus)
                .chain((0..self.columns.len()).map(Var::Structural))
            {
                if self.basis.contains(&var) {
                    continue;
                }
                let direction = self.ftran(var);
                if direction[row].abs() > 1e-7 {
                    chosen = Some((var, direction));
                    break;
                }
            }
            let (var, direction) = chosen.ok_or(LpError::Singular)?;
            self.pivot(row, var, &direction)?;
            *pivots += 1;
        }
        Ok(())
    }

    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        let mut pivots = 0;
        if !self.feasible_basis {
            self.start_artificial();
            self.iterate(Phase::One, &mut pivots)?;
            let residual: f64 = self
                .basis
                .iter()
                .zip(&self.values)
                .filter(|(v, _)| matches!(v, Var::Artificial(_)))
                .map(|(_, x)| *x)
                .sum();
            if residual > 1e-7 {
                return Err(LpError::Infeasible(residual));
            }
            self.expel_artificials(&mut pivots)?;
            self.refactor()?;
            self.feasible_basis = true;
        }
        self.iterate(Phase::Two, &mut pivots)?;
        self.refactor()?;

        let mut primal = vec![0.0; self.columns.len()];
        for (&var, &value) in self.basis.iter().zip(&self.values) {
            if let Var::Structural(j) = var {
                primal[j] = value;
            }
        }
        let objective = primal.iter().zip(&self.columns).map(|(x, c)| x * c.cost).sum();
        let duals = self
            .row_prices(Phase::Two)
            .into_iter()
            .map(|v| if v < 0.0 && v > -TOLERANCE { 0.0 } else { v })
            .collect();
        Ok(LpSolution {
            objective,
            primal,
            duals,
            pivots,
        })
    }
}
