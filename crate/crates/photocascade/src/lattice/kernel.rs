use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer response kernel on the lattice: maps a current history to the
/// field shift it radiates, `shift[i] = sum_{j<i} matrix[i][j] * current[j]`.
///
/// The matrix is strictly lower triangular in the time index, so the shift at
/// a bin depends only on strictly earlier current bins and no instantaneous
/// self-action fixed point can arise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeKernel {
    matrix: Vec<Vec<i64>>,
}

impl LatticeKernel {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let bins = matrix.len();
        if bins == 0 {
            return Err(Error::InvalidParameter("kernel needs at least one bin".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != bins {
                return Err(Error::InvalidParameter("kernel matrix must be square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if j >= i && v != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "kernel must be strictly lower triangular, found entry at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn zero(bins: usize) -> Self {
        Self { matrix: vec![vec![0; bins]; bins] }
    }

    pub fn bins(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|row| row.iter().all(|&v| v == 0))
    }

    /// Field shift radiated by a current history.
    pub fn shift(&self, current: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(current).map(|(k, j)| k * j).sum())
            .collect()
    }

    /// `field + shift(current)`, the substituted conditioning argument.
    pub fn shifted_field(&self, field: &[i64], current: &[i64]) -> Vec<i64> {
        field.iter().zip(self.shift(current)).map(|(a, s)| a + s).collect()
    }
}
