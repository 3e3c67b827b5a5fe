//! Random test instances for the lattice algebra.
//!
//! Tables are generated in causal product form: the weight of a current
//! history factorizes into per-bin conditionals that depend only on earlier
//! current bins and on fields up to the same bin. Dressing with a strictly
//! lower-triangular kernel preserves normalization for exactly this class,
//! so random instances exercise the structural identities without tripping
//! the ill-posedness guard.

use rand::Rng;

use crate::error::{Error, Result};

use super::{ConditionalTable, Lattice, LatticeKernel};

/// Per-bin minimum/maximum of the field shift the kernel can produce from
/// any configuration on the current lattice.
pub fn shift_bounds(kernel: &LatticeKernel, current: &Lattice) -> Vec<(i64, i64)> {
    kernel
        .matrix()
        .iter()
        .map(|row| {
            let mut lo = 0i64;
            let mut hi = 0i64;
            for (j, &k) in row.iter().enumerate() {
                let lmin = *current.levels(j).first().expect("nonempty");
                let lmax = *current.levels(j).last().expect("nonempty");
                let (a, b) = (k * lmin, k * lmax);
                lo += a.min(b);
                hi += a.max(b);
            }
            (lo, hi)
        })
        .collect()
}

fn contiguous_range(levels: &[i64]) -> Option<(i64, i64)> {
    let lo = *levels.first()?;
    let hi = *levels.last()?;
    ((hi - lo + 1) as usize == levels.len()).then_some((lo, hi))
}

/// Enlarges a (per-bin contiguous) field lattice so that every configuration
/// shifted by the kernel acting on the current lattice still lands inside.
pub fn grow_for_kernel(field: &Lattice, kernel: &LatticeKernel, current: &Lattice) -> Result<Lattice> {
    let bounds = shift_bounds(kernel, current);
    let levels = field
        .per_bin_levels()
        .iter()
        .zip(&bounds)
        .map(|(levels, &(s_lo, s_hi))| {
            let (lo, hi) = contiguous_range(levels).ok_or_else(|| {
                Error::InvalidParameter("grow_for_kernel needs contiguous field levels".into())
            })?;
            Ok(((lo + s_lo)..=(hi + s_hi)).collect())
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    Lattice::per_bin(levels)
}

/// Largest per-bin-contiguous sub-lattice whose kernel-shifted
/// configurations stay on `field`; the conditioning lattice on which a
/// dressed table is defined.
pub fn shrink_for_kernel(field: &Lattice, kernel: &LatticeKernel, current: &Lattice) -> Result<Lattice> {
    let bounds = shift_bounds(kernel, current);
    let levels = field
        .per_bin_levels()
        .iter()
        .zip(&bounds)
        .map(|(levels, &(s_lo, s_hi))| {
            let (lo, hi) = contiguous_range(levels).ok_or_else(|| {
                Error::InvalidParameter("shrink_for_kernel needs contiguous field levels".into())
            })?;
            if lo - s_lo > hi - s_hi {
                return Err(Error::OffLattice(vec![lo - s_lo, hi - s_hi]));
            }
            Ok(((lo - s_lo)..=(hi - s_hi)).collect())
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    Lattice::per_bin(levels)
}

/// Random conditional table in causal product form.
pub fn random_causal_table(
    field: &Lattice,
    current: &Lattice,
    signed: bool,
    rng: &mut impl Rng,
) -> Result<ConditionalTable> {
    assert_eq!(field.bins(), current.bins());
    let bins = field.bins();

    // conditionals[i][current_prefix][field_prefix] -> weights over bin-i level
    let mut conditionals: Vec<Vec<Vec<Vec<f64>>>> = Vec::with_capacity(bins);
    for i in 0..bins {
        let n_cur_prefix: usize = (0..i).map(|j| current.levels(j).len()).product();
        let n_field_prefix: usize = (0..=i).map(|j| field.levels(j).len()).product();
        let mut per_bin = Vec::with_capacity(n_cur_prefix);
        for _ in 0..n_cur_prefix {
            let mut per_field = Vec::with_capacity(n_field_prefix);
            for _ in 0..n_field_prefix {
                per_field.push(random_row(current.levels(i).len(), signed, rng));
            }
            per_bin.push(per_field);
        }
        conditionals.push(per_bin);
    }

    let nf = field.config_count()?;
    let nc = current.config_count()?;
    let mut weights = vec![0.0; nf * nc];
    for fi in 0..nf {
        let field_digits = digits(fi, field);
        for ji in 0..nc {
            let cur_digits = digits(ji, current);
            let mut w = 1.0;
            for i in 0..bins {
                let cur_prefix: usize = cur_digits[..i]
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0, |acc, (j, &d)| acc * current.levels(j).len() + d);
                let field_prefix: usize = field_digits[..=i]
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0, |acc, (j, &d)| acc * field.levels(j).len() + d);
                w *= conditionals[i][cur_prefix][field_prefix][cur_digits[i]];
            }
            weights[fi * nc + ji] = w;
        }
    }
    ConditionalTable::with_tolerance(field.clone(), current.clone(), weights, signed, 1e-9)
}

fn digits(mut index: usize, lattice: &Lattice) -> Vec<usize> {
    let mut out = Vec::with_capacity(lattice.bins());
    for bin in 0..lattice.bins() {
        let base = lattice.levels(bin).len();
        out.push(index % base);
        index /= base;
    }
    out
}

fn random_row(len: usize, signed: bool, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let row: Vec<f64> = (0..len)
            .map(|_| if signed { rng.gen_range(-0.4..1.0) } else { rng.gen_range(0.05..1.0) })
            .collect();
        let sum: f64 = row.iter().sum();
        if sum.abs() >= 0.5 {
            return row.into_iter().map(|w| w / sum).collect();
        }
    }
}

/// Random strictly lower-triangular kernel with small integer entries.
pub fn random_kernel(bins: usize, allow_negative: bool, rng: &mut impl Rng) -> LatticeKernel {
    let mut matrix = vec![vec![0i64; bins]; bins];
    for i in 1..bins {
        for j in 0..i {
            matrix[i][j] = if allow_negative {
                *[-1, 0, 0, 1].get(rng.gen_range(0..4)).unwrap()
            } else {
                i64::from(rng.gen_bool(0.6))
            };
        }
    }
    LatticeKernel::new(matrix).expect("strictly lower triangular by construction")
}
