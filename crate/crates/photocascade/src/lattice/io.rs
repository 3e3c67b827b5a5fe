//! Structured-text import/export of tables, distributions and kernels.
//!
//! Fixture files are TOML with explicit lattice declarations; entries absent
//! from the file are zero weights. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{ConditionalTable, Lattice, LatticeDistribution, LatticeKernel};

/// Level declaration: one shared list, or one list per bin.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum LevelsSpec {
    Shared(Vec<i64>),
    PerBin(Vec<Vec<i64>>),
}

impl LevelsSpec {
    fn to_lattice(&self, bins: usize) -> Result<Lattice> {
        match self {
            Self::Shared(levels) => Lattice::uniform(bins, levels.clone()),
            Self::PerBin(levels) => {
                if levels.len() != bins {
                    return Err(Error::Config(format!(
                        "{} level lists declared for {bins} bins",
                        levels.len()
                    )));
                }
                Lattice::per_bin(levels.clone())
            }
        }
    }

    fn of_lattice(lattice: &Lattice) -> Self {
        let per_bin = lattice.per_bin_levels();
        if per_bin.iter().all(|l| l == &per_bin[0]) {
            Self::Shared(per_bin[0].clone())
        } else {
            Self::PerBin(per_bin.to_vec())
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    bins: usize,
    field_levels: LevelsSpec,
    current_levels: LevelsSpec,
    #[serde(default)]
    signed: bool,
    #[serde(default)]
    entry: Vec<TableEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    field: Vec<i64>,
    current: Vec<i64>,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    bins: usize,
    levels: LevelsSpec,
    #[serde(default)]
    signed: bool,
    #[serde(default)]
    entry: Vec<DistributionEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionEntry {
    config: Vec<i64>,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelFile {
    matrix: Vec<Vec<i64>>,
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn read_table(path: &Path) -> Result<ConditionalTable> {
    let file: TableFile = parse(path)?;
    let field = file.field_levels.to_lattice(file.bins)?;
    let current = file.current_levels.to_lattice(file.bins)?;
    let nc = current.config_count()?;
    let mut weights = vec![0.0; field.config_count()? * nc];
    for e in &file.entry {
        let fi = field
            .index_of(&e.field)
            .ok_or_else(|| Error::Config(format!("field config {:?} off lattice", e.field)))?;
        let ji = current
            .index_of(&e.current)
            .ok_or_else(|| Error::Config(format!("current config {:?} off lattice", e.current)))?;
        weights[fi * nc + ji] += e.weight;
    }
    ConditionalTable::new(field, current, weights, file.signed)
}

pub fn write_table(path: &Path, table: &ConditionalTable) -> Result<()> {
    let nc = table.current_lattice().config_count()?;
    let mut entry = Vec::new();
    for fi in 0..table.field_lattice().config_count()? {
        for ji in 0..nc {
            let weight = table.weight(fi, ji);
            if weight != 0.0 {
                entry.push(TableEntry {
                    field: table.field_lattice().config(fi),
                    current: table.current_lattice().config(ji),
                    weight,
                });
            }
        }
    }
    let file = TableFile {
        bins: table.field_lattice().bins(),
        field_levels: LevelsSpec::of_lattice(table.field_lattice()),
        current_levels: LevelsSpec::of_lattice(table.current_lattice()),
        signed: table.signed(),
        entry,
    };
    let text = toml::to_string(&file).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_distribution(path: &Path) -> Result<LatticeDistribution> {
    let file: DistributionFile = parse(path)?;
    let lattice = file.levels.to_lattice(file.bins)?;
    let mut weights = vec![0.0; lattice.config_count()?];
    for e in &file.entry {
        let i = lattice
            .index_of(&e.config)
            .ok_or_else(|| Error::Config(format!("config {:?} off lattice", e.config)))?;
        weights[i] += e.weight;
    }
    LatticeDistribution::new(lattice, weights, file.signed)
}

pub fn read_kernel(path: &Path) -> Result<LatticeKernel> {
    let file: KernelFile = parse(path)?;
    LatticeKernel::new(file.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.toml");
        let field = Lattice::contiguous(2, 0, 1).unwrap();
        let current = Lattice::contiguous(2, 0, 1).unwrap();
        let t = ConditionalTable::deterministic(field, current, |a| a.to_vec()).unwrap();
        write_table(&path, &t).unwrap();
        let back = read_table(&path).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "bins = 1\nfield_levels = [0]\ncurrent_levels = [0]\nbogus = 1\n").unwrap();
        assert!(read_table(&path).is_err());
    }

    #[test]
    fn kernel_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.toml");
        std::fs::write(&path, "matrix = [[0, 0], [1, 0]]\n").unwrap();
        let k = read_kernel(&path).unwrap();
        assert_eq!(k.shift(&[2, 5]), vec![0, 2]);
    }
}
