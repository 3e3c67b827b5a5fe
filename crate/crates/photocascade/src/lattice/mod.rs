//! Exact finite algebra of conditional quasiprobability tables.
//!
//! Field and current histories are discretized to a few time bins, each with
//! a small set of admissible integer levels, so every structural identity of
//! the dressing/composition calculus can be checked by full enumeration with
//! exact equality (no interpolation, no quadrature). Tables may carry signed
//! weights; all identities hold verbatim in the signed case.

mod kernel;
mod ops;
mod table;

pub mod io;
pub mod random;
pub mod suite;

pub use kernel::LatticeKernel;
pub use ops::{
    chain_conditional, chain_marginal, compose_bare, compose_dressed, dress,
    eval_generating_functional, joint_field_current, JointFieldCurrent,
};
pub use table::{ConditionalTable, LatticeDistribution, MAX_TABLE_ENTRIES};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Integer lattice of histories: one ordered list of admissible levels per
/// time bin. A configuration picks one level per bin; configurations are
/// indexed in mixed-radix order with bin 0 least significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    levels: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn per_bin(levels: Vec<Vec<i64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("lattice needs at least one bin".into()));
        }
        for bin in &levels {
            if bin.is_empty() {
                return Err(Error::InvalidParameter("levels must be nonempty".into()));
            }
            if bin.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("levels must be strictly increasing".into()));
            }
        }
        let lattice = Self { levels };
        lattice.config_count()?;
        Ok(lattice)
    }

    /// Same level list for every bin.
    pub fn uniform(bins: usize, levels: Vec<i64>) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParameter("lattice needs at least one bin".into()));
        }
        Self::per_bin(vec![levels; bins])
    }

    /// Contiguous integer levels `lo..=hi` on every bin.
    pub fn contiguous(bins: usize, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter("empty level range".into()));
        }
        Self::uniform(bins, (lo..=hi).collect())
    }

    pub fn bins(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self, bin: usize) -> &[i64] {
        &self.levels[bin]
    }

    pub fn per_bin_levels(&self) -> &[Vec<i64>] {
        &self.levels
    }

    /// Number of configurations, guarded against overflow.
    pub fn config_count(&self) -> Result<usize> {
        let mut count: usize = 1;
        for bin in &self.levels {
            count = count
                .checked_mul(bin.len())
                .filter(|&c| c <= 1 << 30)
                .ok_or_else(|| Error::InvalidParameter("configuration space too large".into()))?;
        }
        Ok(count)
    }

    pub fn config(&self, mut index: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.bins());
        for bin in &self.levels {
            out.push(bin[index % bin.len()]);
            index /= bin.len();
        }
        out
    }

    /// Index of a configuration, or `None` when any component is off-lattice.
    pub fn index_of(&self, config: &[i64]) -> Option<usize> {
        if config.len() != self.bins() {
            return None;
        }
        let mut index = 0;
        for (bin, v) in self.levels.iter().zip(config).rev() {
            let pos = bin.binary_search(v).ok()?;
            index = index * bin.len() + pos;
        }
        Some(index)
    }

    pub fn configs(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.config_count().expect("validated at construction")).map(move |i| self.config(i))
    }

    /// Lattice of sums of one configuration from `self` and one from `other`
    /// (per-bin Minkowski sum of the level sets).
    pub fn sum_lattice(&self, other: &Lattice) -> Result<Lattice> {
        if self.bins() != other.bins() {
            return Err(Error::LatticeMismatch("bin counts differ".into()));
        }
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| {
                let mut sums: Vec<i64> =
                    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
                sums.sort_unstable();
                sums.dedup();
                sums
            })
            .collect();
        Lattice::per_bin(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let l = Lattice::uniform(3, vec![-1, 0, 2]).unwrap();
        assert_eq!(l.config_count().unwrap(), 27);
        for i in 0..27 {
            let c = l.config(i);
            assert_eq!(l.index_of(&c), Some(i));
        }
        assert_eq!(l.index_of(&[0, 0, 1]), None);
        assert_eq!(l.index_of(&[0, 0]), None);
    }

    #[test]
    fn per_bin_levels_index_correctly() {
        let l = Lattice::per_bin(vec![vec![0, 1], vec![0, 1, 2], vec![5]]).unwrap();
        assert_eq!(l.config_count().unwrap(), 6);
        for i in 0..6 {
            assert_eq!(l.index_of(&l.config(i)), Some(i));
        }
        assert_eq!(l.index_of(&[1, 2, 5]), Some(5));
        assert_eq!(l.index_of(&[1, 2, 4]), None);
    }

    #[test]
    fn validation() {
        assert!(Lattice::per_bin(vec![]).is_err());
        assert!(Lattice::per_bin(vec![vec![]]).is_err());
        assert!(Lattice::uniform(1, vec![1, 1]).is_err());
        assert!(Lattice::uniform(2, vec![3, 1]).is_err());
        assert!(Lattice::uniform(0, vec![0]).is_err());
    }

    #[test]
    fn sum_lattice_covers_all_sums() {
        let a = Lattice::contiguous(2, 0, 1).unwrap();
        let b = Lattice::per_bin(vec![vec![0, 2], vec![0, 1]]).unwrap();
        let s = a.sum_lattice(&b).unwrap();
        assert_eq!(s.levels(0), &[0, 1, 2, 3]);
        assert_eq!(s.levels(1), &[0, 1, 2]);
    }
}
