//! The structural-identity suite: dressing/composition commutation,
//! generating-functional factorization, chain associativity.
//!
//! Each check reports its maximum absolute deviation; the identities are
//! algebraic, so anything beyond accumulated rounding (well below 1e-12 at
//! these table sizes) is a genuine failure.

use rand::Rng;

use crate::error::{Error, Result};

use super::random::{grow_for_kernel, random_causal_table, random_kernel, shrink_for_kernel};
use super::{
    chain_conditional, chain_marginal, compose_bare, compose_dressed, dress,
    eval_generating_functional, ConditionalTable, Lattice, LatticeDistribution, LatticeKernel,
};

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// `dress(compose_bare(pA,pB))` vs `compose_dressed(dress pA, dress pB)`.
    pub commutation_dev: f64,
    /// Characteristic transform of the bare composite vs the product of the
    /// component transforms.
    pub factorization_dev: f64,
    /// Zero-kernel dressing against the identity, when the kernel is zero.
    pub zero_kernel_dev: Option<f64>,
    /// Whether any input carried signed weights.
    pub signed: bool,
}

impl EquivalenceReport {
    pub fn max_dev(&self) -> f64 {
        self.commutation_dev
            .max(self.factorization_dev)
            .max(self.zero_kernel_dev.unwrap_or(0.0))
    }
}

/// Runs the dressing/composition identities for one pair of bare component
/// tables sharing a (contiguous) conditioning lattice and one kernel.
pub fn equivalence_suite(
    pa: &ConditionalTable,
    pb: &ConditionalTable,
    kernel: &LatticeKernel,
) -> Result<EquivalenceReport> {
    if pa.field_lattice() != pb.field_lattice() || pa.current_lattice() != pb.current_lattice() {
        return Err(Error::LatticeMismatch("components must share both lattices".into()));
    }
    let f2 = pa.field_lattice();
    let single = pa.current_lattice();
    let sum = single.sum_lattice(single)?;

    let f1 = shrink_for_kernel(f2, kernel, single)?;
    let f0_route2 = shrink_for_kernel(&f1, kernel, single)?;
    let f0_route1 = shrink_for_kernel(f2, kernel, &sum)?;
    let f0 = intersect_contiguous(&f0_route1, &f0_route2)?;

    // route 1: compose bare components, then dress the composite
    let composite_bare = compose_bare(pa, pb)?;
    let route1 = dress(&composite_bare, kernel, &f0)?;

    // route 2: dress each component, then compose the dressed components
    let pa_dressed = dress(pa, kernel, &f1)?;
    let pb_dressed = dress(pb, kernel, &f1)?;
    let route2 = compose_dressed(&pa_dressed, &pb_dressed, kernel, &f0)?;

    let commutation_dev = route1.max_abs_difference(&route2)?;

    // factorization of the generating functional, on a deterministic grid of
    // transform variables plus the normalization point zeta = 0
    let mut factorization_dev = 0.0f64;
    let bins = single.bins();
    let zeta_grid = transform_grid(bins);
    for fi in 0..f2.config_count()? {
        let field = f2.config(fi);
        for zeta in &zeta_grid {
            let lhs = eval_generating_functional(&composite_bare, zeta, &field)?;
            let phi_a = eval_generating_functional(pa, zeta, &field)?;
            let phi_b = eval_generating_functional(pb, zeta, &field)?;
            factorization_dev = factorization_dev.max((lhs - phi_a * phi_b).norm());
        }
    }

    let zero_kernel_dev = if kernel.is_zero() {
        Some(dress(pa, kernel, f2)?.max_abs_difference(pa)?)
    } else {
        None
    };

    Ok(EquivalenceReport {
        commutation_dev,
        factorization_dev,
        zero_kernel_dev,
        signed: pa.signed() || pb.signed(),
    })
}

fn intersect_contiguous(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    if a.bins() != b.bins() {
        return Err(Error::LatticeMismatch("bin counts differ".into()));
    }
    let levels = (0..a.bins())
        .map(|bin| {
            let lo = (*a.levels(bin).first().unwrap()).max(*b.levels(bin).first().unwrap());
            let hi = (*a.levels(bin).last().unwrap()).min(*b.levels(bin).last().unwrap());
            if lo > hi {
                return Err(Error::OffLattice(vec![lo, hi]));
            }
            Ok((lo..=hi).collect())
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    Lattice::per_bin(levels)
}

fn transform_grid(bins: usize) -> Vec<Vec<f64>> {
    let base = [0.0, 0.7, -1.3, 2.9];
    let mut grid = vec![vec![0.0; bins]];
    for (k, &b) in base.iter().enumerate() {
        grid.push((0..bins).map(|i| b + 0.41 * (i as f64) * (k as f64 + 1.0)).collect());
    }
    grid
}

/// Associativity of chain composition: marginalizing the first pair first
/// (composite source) against chaining the second pair first (composite
/// detector).
pub fn associativity_dev(
    source: &LatticeDistribution,
    stage_a: &ConditionalTable,
    stage_d: &ConditionalTable,
) -> Result<f64> {
    let via_composite_source = chain_marginal(&chain_marginal(source, stage_a)?, stage_d)?;
    let via_composite_detector = chain_marginal(source, &chain_conditional(stage_a, stage_d)?)?;
    via_composite_source.max_abs_difference(&via_composite_detector)
}

/// One random instance of the full identity suite: random causal components,
/// random kernel, and a random three-stage chain on matching lattices.
pub struct RandomInstanceReport {
    pub equivalence: EquivalenceReport,
    pub associativity_dev: f64,
    pub nonnegative_preserved: bool,
}

pub fn random_instance(rng: &mut impl Rng, signed: bool) -> Result<RandomInstanceReport> {
    let bins = rng.gen_range(2..=3usize);
    let current_hi = if bins == 2 { rng.gen_range(1..=3i64) } else { rng.gen_range(1..=2i64) };
    let current = Lattice::contiguous(bins, 0, current_hi)?;
    let kernel = random_kernel(bins, false, rng);
    let sum = current.sum_lattice(&current)?;

    let f0 = Lattice::contiguous(bins, 0, 1)?;
    let f1 = grow_for_kernel(&f0, &kernel, &current)?;
    let f2a = grow_for_kernel(&f1, &kernel, &current)?;
    let f2b = grow_for_kernel(&f0, &kernel, &sum)?;
    let f2 = hull_contiguous(&f2a, &f2b)?;

    let pa = random_causal_table(&f2, &current, signed, rng)?;
    let pb = random_causal_table(&f2, &current, signed, rng)?;
    let equivalence = equivalence_suite(&pa, &pb, &kernel)?;

    // three-stage chain on small unconditional lattices
    let lx = Lattice::contiguous(1, 0, rng.gen_range(1..=3))?;
    let ly = Lattice::contiguous(1, 0, rng.gen_range(1..=3))?;
    let lz = Lattice::contiguous(1, 0, rng.gen_range(1..=3))?;
    let source = random_distribution(&lx, signed, rng)?;
    let stage_a = random_stage(&lx, &ly, signed, rng)?;
    let stage_d = random_stage(&ly, &lz, signed, rng)?;
    let assoc = associativity_dev(&source, &stage_a, &stage_d)?;

    let nonnegative_preserved = if signed {
        true
    } else {
        let composite = compose_bare(&pa, &pb)?;
        let dressed = dress(&composite, &kernel, &equivalence_f0(&pa, &kernel)?)?;
        !composite.has_negative_weight()
            && !dressed.has_negative_weight()
            && !chain_marginal(&source, &stage_a)?.weights().iter().any(|&w| w < 0.0)
    };

    Ok(RandomInstanceReport { equivalence, associativity_dev: assoc, nonnegative_preserved })
}

fn equivalence_f0(pa: &ConditionalTable, kernel: &LatticeKernel) -> Result<Lattice> {
    let single = pa.current_lattice();
    let sum = single.sum_lattice(single)?;
    let f1 = shrink_for_kernel(pa.field_lattice(), kernel, single)?;
    let a = shrink_for_kernel(&f1, kernel, single)?;
    let b = shrink_for_kernel(pa.field_lattice(), kernel, &sum)?;
    intersect_contiguous(&a, &b)
}

fn hull_contiguous(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    let levels = (0..a.bins())
        .map(|bin| {
            let lo = (*a.levels(bin).first().unwrap()).min(*b.levels(bin).first().unwrap());
            let hi = (*a.levels(bin).last().unwrap()).max(*b.levels(bin).last().unwrap());
            (lo..=hi).collect()
        })
        .collect();
    Lattice::per_bin(levels)
}

fn random_distribution(lattice: &Lattice, signed: bool, rng: &mut impl Rng) -> Result<LatticeDistribution> {
    let n = lattice.config_count()?;
    let weights = loop {
        let row: Vec<f64> = (0..n)
            .map(|_| if signed { rng.gen_range(-0.4..1.0) } else { rng.gen_range(0.05..1.0) })
            .collect();
        let sum: f64 = row.iter().sum();
        if sum.abs() >= 0.5 {
            break row.into_iter().map(|w| w / sum).collect::<Vec<f64>>();
        }
    };
    LatticeDistribution::new(lattice.clone(), weights, signed)
}

fn random_stage(
    field: &Lattice,
    current: &Lattice,
    signed: bool,
    rng: &mut impl Rng,
) -> Result<ConditionalTable> {
    let nf = field.config_count()?;
    let nc = current.config_count()?;
    let mut weights = Vec::with_capacity(nf * nc);
    for _ in 0..nf {
        let row = loop {
            let row: Vec<f64> = (0..nc)
                .map(|_| if signed { rng.gen_range(-0.4..1.0) } else { rng.gen_range(0.05..1.0) })
                .collect();
            let sum: f64 = row.iter().sum();
            if sum.abs() >= 0.5 {
                break row.into_iter().map(|w| w / sum).collect::<Vec<f64>>();
            }
        };
        weights.extend(row);
    }
    ConditionalTable::new(field.clone(), current.clone(), weights, signed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn identities_hold_on_random_instances() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
        for trial in 0..12 {
            let signed = trial % 2 == 1;
            let report = random_instance(&mut rng, signed).unwrap();
            assert!(
                report.equivalence.commutation_dev < 1e-12,
                "commutation dev {} (signed={signed})",
                report.equivalence.commutation_dev
            );
            assert!(report.equivalence.factorization_dev < 1e-12);
            assert!(report.associativity_dev < 1e-12);
            assert!(report.nonnegative_preserved);
        }
    }
}
