use crate::error::{Error, Result};

use super::Lattice;

/// Hard cap on dense table size; brute-force verifiability is the point of
/// this module, not scale.
pub const MAX_TABLE_ENTRIES: usize = 250_000;

/// Conditional (quasi)probability table `p(J | A)`: for every conditioning
/// field configuration `A`, a normalized (possibly signed) weight over
/// current configurations `J`.
///
/// Weights are stored densely, row per field configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    field: Lattice,
    current: Lattice,
    weights: Vec<f64>,
    signed: bool,
}

impl ConditionalTable {
    /// Builds a table, verifying shape, finiteness, per-row normalization to
    /// `tol`, and nonnegativity unless `signed`.
    pub fn with_tolerance(
        field: Lattice,
        current: Lattice,
        weights: Vec<f64>,
        signed: bool,
        tol: f64,
    ) -> Result<Self> {
        let nf = field.config_count()?;
        let nc = current.config_count()?;
        let entries = nf
            .checked_mul(nc)
            .filter(|&e| e <= MAX_TABLE_ENTRIES)
            .ok_or_else(|| Error::InvalidParameter(format!("table exceeds {MAX_TABLE_ENTRIES} entries")))?;
        if weights.len() != entries {
            return Err(Error::LatticeMismatch(format!(
                "expected {entries} weights, got {}",
                weights.len()
            )));
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut max_dev = 0.0f64;
        for row in weights.chunks_exact(nc) {
            let sum: f64 = row.iter().sum();
            max_dev = max_dev.max((sum - 1.0).abs());
            if !signed {
                if let Some(&w) = row.iter().find(|&&w| w < 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "negative weight {w} in an unsigned table"
                    )));
                }
            }
        }
        if max_dev > tol {
            return Err(Error::NormalizationBroken { max_dev });
        }
        Ok(Self { field, current, weights, signed })
    }

    pub fn new(field: Lattice, current: Lattice, weights: Vec<f64>, signed: bool) -> Result<Self> {
        Self::with_tolerance(field, current, weights, signed, 1e-12)
    }

    /// Deterministic table `p(J|A) = [J == g(A)]`.
    pub fn deterministic(
        field: Lattice,
        current: Lattice,
        g: impl Fn(&[i64]) -> Vec<i64>,
    ) -> Result<Self> {
        let nf = field.config_count()?;
        let nc = current.config_count()?;
        let mut weights = vec![0.0; nf * nc];
        for fi in 0..nf {
            let target = g(&field.config(fi));
            let ji = current
                .index_of(&target)
                .ok_or_else(|| Error::OffLattice(target.clone()))?;
            weights[fi * nc + ji] = 1.0;
        }
        Self::new(field, current, weights, false)
    }

    pub fn field_lattice(&self) -> &Lattice {
        &self.field
    }

    pub fn current_lattice(&self) -> &Lattice {
        &self.current
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, field_index: usize) -> &[f64] {
        let nc = self.current.config_count().expect("validated");
        &self.weights[field_index * nc..(field_index + 1) * nc]
    }

    pub fn weight(&self, field_index: usize, current_index: usize) -> f64 {
        let nc = self.current.config_count().expect("validated");
        self.weights[field_index * nc + current_index]
    }

    /// Largest absolute pointwise difference; lattices must agree.
    pub fn max_abs_difference(&self, other: &ConditionalTable) -> Result<f64> {
        if self.field != other.field || self.current != other.current {
            return Err(Error::LatticeMismatch("cannot compare tables on different lattices".into()));
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn has_negative_weight(&self) -> bool {
        self.weights.iter().any(|&w| w < 0.0)
    }
}

/// Unconditional (quasi)probability distribution over lattice configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDistribution {
    lattice: Lattice,
    weights: Vec<f64>,
    signed: bool,
}

impl LatticeDistribution {
    pub fn with_tolerance(lattice: Lattice, weights: Vec<f64>, signed: bool, tol: f64) -> Result<Self> {
        let n = lattice.config_count()?;
        if weights.len() != n {
            return Err(Error::LatticeMismatch(format!("expected {n} weights, got {}", weights.len())));
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !signed {
            if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w} in an unsigned distribution")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NormalizationBroken { max_dev: (sum - 1.0).abs() });
        }
        Ok(Self { lattice, weights, signed })
    }

    pub fn new(lattice: Lattice, weights: Vec<f64>, signed: bool) -> Result<Self> {
        Self::with_tolerance(lattice, weights, signed, 1e-12)
    }

    /// Point mass at one configuration.
    pub fn delta(lattice: Lattice, config: &[i64]) -> Result<Self> {
        let idx = lattice.index_of(config).ok_or_else(|| Error::OffLattice(config.to_vec()))?;
        let mut weights = vec![0.0; lattice.config_count()?];
        weights[idx] = 1.0;
        Self::new(lattice, weights, false)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn max_abs_difference(&self, other: &LatticeDistribution) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch("distributions on different lattices".into()));
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (Lattice, Lattice) {
        (Lattice::contiguous(1, 0, 1).unwrap(), Lattice::contiguous(1, 0, 1).unwrap())
    }

    #[test]
    fn normalization_enforced_per_row() {
        let (f, c) = small();
        assert!(ConditionalTable::new(f.clone(), c.clone(), vec![0.5, 0.5, 0.3, 0.7], false).is_ok());
        assert!(matches!(
            ConditionalTable::new(f.clone(), c.clone(), vec![0.5, 0.6, 0.3, 0.7], false),
            Err(Error::NormalizationBroken { .. })
        ));
        assert!(ConditionalTable::new(f, c, vec![-0.5, 1.5, 0.3, 0.7], false).is_err());
    }

    #[test]
    fn signed_tables_allow_negative_weights() {
        let (f, c) = small();
        let t = ConditionalTable::new(f, c, vec![-0.5, 1.5, 0.3, 0.7], true).unwrap();
        assert!(t.has_negative_weight());
    }

    #[test]
    fn deterministic_identity_table() {
        let l = Lattice::contiguous(2, 0, 1).unwrap();
        let t = ConditionalTable::deterministic(l.clone(), l.clone(), |a| a.to_vec()).unwrap();
        for fi in 0..4 {
            for ji in 0..4 {
                assert_eq!(t.weight(fi, ji), if fi == ji { 1.0 } else { 0.0 });
            }
        }
    }
}
