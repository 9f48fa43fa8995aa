//! Connectivity heat maps built from an arc probability matrix, and their
//! sparsified, symmetrized, row-normalized form used for sampling.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::instance::{PricingInstance, DEPOT};
use crate::matrix::Matrix;

/// Rows of a [`ProbMatrix`] must sum to one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;
/// Rows further than [`ROW_SUM_TOLERANCE`] but within this from one are
/// rescaled on load; anything further is rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("entry ({row}, {col}) is negative or not finite")]
    Entry { row: usize, col: usize },
    #[error("row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("temperature must be positive, got {0}")]
    Temperature(f64),
    #[error("matrix has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

/// Row-stochastic arc probability matrix; row `i` is the distribution of the
/// successor of node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix(Matrix<f64>);

impl ProbMatrix {
    pub fn new(matrix: Matrix<f64>) -> Result<Self, HeatError> {
        check_entries(&matrix)?;
        for (row, values) in matrix.rows().enumerate() {
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(HeatError::RowSum { row, sum });
            }
        }
        Ok(ProbMatrix(matrix))
    }

    /// Accepts rows within [`RENORMALIZE_TOLERANCE`] of one, rescaling those
    /// outside [`ROW_SUM_TOLERANCE`]. Rows already within tolerance are left
    /// bit-for-bit untouched.
    pub fn renormalized(mut matrix: Matrix<f64>) -> Result<Self, HeatError> {
        check_entries(&matrix)?;
        for row in 0..matrix.dim() {
            let sum: f64 = matrix.row(row).iter().sum();
            let off = (sum - 1.0).abs();
            if off > RENORMALIZE_TOLERANCE {
                return Err(HeatError::RowSum { row, sum });
            }
            if off > ROW_SUM_TOLERANCE {
                matrix.row_mut(row).iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(ProbMatrix(matrix))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<f64> {
        self.0
    }
}

fn check_entries(matrix: &Matrix<f64>) -> Result<(), HeatError> {
    let dim = matrix.dim();
    match matrix.as_slice().iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(k) => Err(HeatError::Entry {
            row: k / dim,
            col: k % dim,
        }),
        None => Ok(()),
    }
}

/// `H = sum_t h_t h_{t+1}^T` over consecutive columns of `T`, cyclically
/// closed by `h_N h_1^T`.
pub fn heat_from_t(t: &ProbMatrix) -> Matrix<f64> {
    heat_from_matrix(t.matrix())
}

/// The product behind [`heat_from_t`] for any square matrix. It is linear in
/// each column of `t`.
pub fn heat_from_matrix(t: &Matrix<f64>) -> Matrix<f64> {
    let n = t.dim();
    // shifted[j][k] = T[j][k + 1 mod n], so H_ij = <T_i, shifted_j>.
    let shifted = Matrix::from_fn(n, |j, k| t[(j, (k + 1) % n)]);
    Matrix::from_fn(n, |i, j| t.row(i).iter().zip(shifted.row(j)).map(|(a, b)| a * b).sum())
}

/// Cumulative distribution over one row's support.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSampler {
    targets: Vec<usize>,
    cumulative: Vec<f64>,
}

impl RowSampler {
    fn new(row: &[f64]) -> Option<Self> {
        let mut targets = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (j, &w) in row.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                targets.push(j);
                cumulative.push(acc);
            }
        }
        (!targets.is_empty()).then_some(RowSampler { targets, cumulative })
    }

    pub fn support(&self) -> &[usize] {
        &self.targets
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("sampler rows are nonempty");
        let u = rng.gen::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.targets[k.min(self.targets.len() - 1)]
    }
}

/// Sparsified heat map ready for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatMapAdjusted {
    reduced: Matrix<f64>,
    adjusted: Matrix<f64>,
    samplers: Vec<Option<RowSampler>>,
}

impl HeatMapAdjusted {
    /// Top-M rows with forced depot entries, before symmetrization.
    pub fn reduced(&self) -> &Matrix<f64> {
        &self.reduced
    }

    /// Symmetrized and row-normalized heat map.
    pub fn adjusted(&self) -> &Matrix<f64> {
        &self.adjusted
    }

    pub fn dim(&self) -> usize {
        self.adjusted.dim()
    }

    pub fn in_support(&self, i: usize, j: usize) -> bool {
        self.adjusted[(i, j)] > 0.0
    }

    pub fn sampler(&self, row: usize) -> Option<&RowSampler> {
        self.samplers[row].as_ref()
    }

    /// Rows with no support. They are never sampled.
    pub fn zero_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.samplers
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| i)
    }

    pub fn sample<R: Rng + ?Sized>(&self, row: usize, rng: &mut R) -> Option<usize> {
        self.sampler(row).map(|s| s.sample(rng))
    }
}

/// Keeps the `m` largest off-diagonal entries of every customer row (ties to
/// the lower column), keeps every depot arc in both directions, then returns
/// `Hbar + Hbar^T` with rows scaled to sum to one.
///
/// A forced depot entry that is zero takes the largest retained value of its
/// row (or 1 if the row is empty) so that it can be sampled.
pub fn adjust(h: &Matrix<f64>, m: usize) -> HeatMapAdjusted {
    let n = h.dim();
    let value = |i: usize, j: usize| {
        let v = h[(i, j)];
        if v.is_finite() && v > 0.0 {
            v
        } else {
            0.0
        }
    };
    let mut reduced = Matrix::filled(n, 0.0);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        if i != DEPOT {
            order.clear();
            order.extend((0..n).filter(|&j| j != i));
            order.sort_by(|&a, &b| value(i, b).total_cmp(&value(i, a)).then(a.cmp(&b)));
            for &j in order.iter().take(m) {
                reduced[(i, j)] = value(i, j);
            }
        }
        // Depot arcs are kept whatever their rank.
        let forced = if i == DEPOT { 1..n } else { 0..1 };
        for j in forced.clone() {
            reduced[(i, j)] = value(i, j);
        }
        let row_max = reduced.row(i).iter().copied().fold(0.0, f64::max);
        let fill = if row_max > 0.0 { row_max } else { 1.0 };
        for j in forced {
            if reduced[(i, j)] == 0.0 {
                reduced[(i, j)] = fill;
            }
        }
    }

    let mut adjusted = Matrix::from_fn(n, |i, j| reduced[(i, j)] + reduced[(j, i)]);
    let mut samplers = vec![None; n];
    for (i, sampler) in samplers.iter_mut().enumerate() {
        let sum: f64 = adjusted.row(i).iter().sum();
        if sum > 0.0 {
            adjusted.row_mut(i).iter_mut().for_each(|v| *v /= sum);
            *sampler = RowSampler::new(adjusted.row(i));
        }
    }
    HeatMapAdjusted {
        reduced,
        adjusted,
        samplers,
    }
}

/// Model-free stand-in for a trained network: row `i` is the softmax of
/// `-q_ij / temperature` over all columns.
pub fn surrogate_t(pricing: &PricingInstance<'_>, temperature: f64) -> Result<ProbMatrix, HeatError> {
    if !(temperature > 0.0) {
        return Err(HeatError::Temperature(temperature));
    }
    let q = pricing.weights();
    let n = q.dim();
    let mut t = Matrix::filled(n, 0.0);
    for i in 0..n {
        let logits: Vec<f64> = q.row(i).iter().map(|w| -w / temperature).collect();
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| libm::exp(l - top)).collect();
        let total: f64 = exps.iter().sum();
        for (dst, e) in t.row_mut(i).iter_mut().zip(&exps) {
            *dst = e / total;
        }
    }
    ProbMatrix::new(t)
}
