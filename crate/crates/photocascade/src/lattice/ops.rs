//! Dressing, composition and transform operations on conditional tables.
//!
//! All operations are brute-force enumerations over configuration space;
//! their value is exactness, not speed.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{ConditionalTable, Lattice, LatticeDistribution, LatticeKernel};

/// Normalization tolerance after a dressing substitution. A larger deviation
/// means the kernel/lattice pairing folds distinct conditioning arguments in
/// an inconsistent way and the result is not a conditional table.
const SUBSTITUTION_TOL: f64 = 1e-9;

/// Electromagnetic self-action: the dressed device responds to the external
/// field plus its own radiated field, `dressed(J|A) = bare(J | A + K J)`.
///
/// `dressed_field` is the conditioning lattice of the result; every shifted
/// argument `A + K J` must land exactly on the bare table's (typically
/// larger) conditioning lattice.
pub fn dress(
    bare: &ConditionalTable,
    kernel: &LatticeKernel,
    dressed_field: &Lattice,
) -> Result<ConditionalTable> {
    let current = bare.current_lattice().clone();
    if kernel.bins() != current.bins() {
        return Err(Error::LatticeMismatch("kernel bins differ from current bins".into()));
    }
    if dressed_field.bins() != bare.field_lattice().bins() {
        return Err(Error::LatticeMismatch("field bin counts differ".into()));
    }
    let nf = dressed_field.config_count()?;
    let nc = current.config_count()?;
    let mut weights = vec![0.0; nf * nc];
    for fi in 0..nf {
        let a_e = dressed_field.config(fi);
        for ji in 0..nc {
            let j = current.config(ji);
            let shifted = kernel.shifted_field(&a_e, &j);
            let si = bare
                .field_lattice()
                .index_of(&shifted)
                .ok_or(Error::OffLattice(shifted))?;
            weights[fi * nc + ji] = bare.weight(si, ji);
        }
    }
    let signed = bare.signed();
    ConditionalTable::with_tolerance(dressed_field.clone(), current, weights, signed, SUBSTITUTION_TOL)
}

/// Distribution of the summed current of two independent bare components,
/// `p(J|A) = sum_{J_A} pA(J_A|A) pB(J - J_A|A)`. The output current lattice
/// is enlarged to hold every sum.
pub fn compose_bare(pa: &ConditionalTable, pb: &ConditionalTable) -> Result<ConditionalTable> {
    if pa.field_lattice() != pb.field_lattice() || pa.current_lattice() != pb.current_lattice() {
        return Err(Error::LatticeMismatch("components must share both lattices".into()));
    }
    let field = pa.field_lattice().clone();
    let single = pa.current_lattice();
    let sum = single.sum_lattice(single)?;
    let nf = field.config_count()?;
    let nc1 = single.config_count()?;
    let ncs = sum.config_count()?;
    let mut weights = vec![0.0; nf
        .checked_mul(ncs)
        .ok_or_else(|| Error::InvalidParameter("composed table too large".into()))?];
    for fi in 0..nf {
        for ja in 0..nc1 {
            let wa = pa.weight(fi, ja);
            if wa == 0.0 {
                continue;
            }
            let ca = single.config(ja);
            for jb in 0..nc1 {
                let wb = pb.weight(fi, jb);
                if wb == 0.0 {
                    continue;
                }
                let cb = single.config(jb);
                let total: Vec<i64> = ca.iter().zip(&cb).map(|(a, b)| a + b).collect();
                let ti = sum.index_of(&total).expect("sum lattice closed under sums");
                weights[fi * ncs + ti] += wa * wb;
            }
        }
    }
    let signed = pa.signed() || pb.signed();
    ConditionalTable::with_tolerance(field, sum, weights, signed, SUBSTITUTION_TOL)
}

/// Composition of two already-dressed components: each component sees the
/// external field plus the radiation of the other,
/// `p(J|A) = sum_{J_A} pA(J_A | A + K(J-J_A)) pB(J-J_A | A + K J_A)`.
pub fn compose_dressed(
    pa: &ConditionalTable,
    pb: &ConditionalTable,
    kernel: &LatticeKernel,
    out_field: &Lattice,
) -> Result<ConditionalTable> {
    if pa.field_lattice() != pb.field_lattice() || pa.current_lattice() != pb.current_lattice() {
        return Err(Error::LatticeMismatch("components must share both lattices".into()));
    }
    if out_field.bins() != pa.field_lattice().bins() {
        return Err(Error::LatticeMismatch("field bin counts differ".into()));
    }
    let single = pa.current_lattice();
    if kernel.bins() != single.bins() {
        return Err(Error::LatticeMismatch("kernel bins differ from current bins".into()));
    }
    let sum = single.sum_lattice(single)?;
    let nf = out_field.config_count()?;
    let nc1 = single.config_count()?;
    let ncs = sum.config_count()?;
    let mut weights = vec![0.0; nf
        .checked_mul(ncs)
        .ok_or_else(|| Error::InvalidParameter("composed table too large".into()))?];
    for fi in 0..nf {
        let a_e = out_field.config(fi);
        for ja in 0..nc1 {
            let ca = single.config(ja);
            let field_for_b = kernel.shifted_field(&a_e, &ca);
            let fb = pb
                .field_lattice()
                .index_of(&field_for_b)
                .ok_or(Error::OffLattice(field_for_b))?;
            for jb in 0..nc1 {
                let cb = single.config(jb);
                let field_for_a = kernel.shifted_field(&a_e, &cb);
                let fa = pa
                    .field_lattice()
                    .index_of(&field_for_a)
                    .ok_or(Error::OffLattice(field_for_a))?;
                let w = pa.weight(fa, ja) * pb.weight(fb, jb);
                if w == 0.0 {
                    continue;
                }
                let total: Vec<i64> = ca.iter().zip(&cb).map(|(a, b)| a + b).collect();
                let ti = sum.index_of(&total).expect("sum lattice closed under sums");
                weights[fi * ncs + ti] += w;
            }
        }
    }
    let signed = pa.signed() || pb.signed();
    ConditionalTable::with_tolerance(out_field.clone(), sum, weights, signed, SUBSTITUTION_TOL)
}

/// Marginalization of a two-stage chain: feed an unconditional distribution
/// through a conditional stage, `p(y) = sum_x p1(x) p2(y|x)`.
pub fn chain_marginal(
    stage1: &LatticeDistribution,
    stage2: &ConditionalTable,
) -> Result<LatticeDistribution> {
    if stage1.lattice() != stage2.field_lattice() {
        return Err(Error::LatticeMismatch(
            "stage-1 output lattice must equal stage-2 conditioning lattice".into(),
        ));
    }
    let nc = stage2.current_lattice().config_count()?;
    let mut out = vec![0.0; nc];
    for (xi, &px) in stage1.weights().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (yi, &pyx) in stage2.row(xi).iter().enumerate() {
            out[yi] += px * pyx;
        }
    }
    let signed = stage1.signed() || stage2.signed();
    LatticeDistribution::with_tolerance(stage2.current_lattice().clone(), out, signed, SUBSTITUTION_TOL)
}

/// Conditional chaining of two stages, `p(y|z) = sum_x p1(x|z) p2(y|x)`.
pub fn chain_conditional(
    stage1: &ConditionalTable,
    stage2: &ConditionalTable,
) -> Result<ConditionalTable> {
    if stage1.current_lattice() != stage2.field_lattice() {
        return Err(Error::LatticeMismatch(
            "stage-1 output lattice must equal stage-2 conditioning lattice".into(),
        ));
    }
    let field = stage1.field_lattice().clone();
    let current = stage2.current_lattice().clone();
    let nf = field.config_count()?;
    let nx = stage1.current_lattice().config_count()?;
    let nc = current.config_count()?;
    let mut weights = vec![0.0; nf * nc];
    for fi in 0..nf {
        for xi in 0..nx {
            let w1 = stage1.weight(fi, xi);
            if w1 == 0.0 {
                continue;
            }
            for (yi, &w2) in stage2.row(xi).iter().enumerate() {
                weights[fi * nc + yi] += w1 * w2;
            }
        }
    }
    let signed = stage1.signed() || stage2.signed();
    ConditionalTable::with_tolerance(field, current, weights, signed, SUBSTITUTION_TOL)
}

/// Characteristic transform of a table at one conditioning configuration,
/// `Phi(zeta|A) = sum_J p(J|A) exp(i zeta . J)`.
pub fn eval_generating_functional(
    table: &ConditionalTable,
    zeta: &[f64],
    field: &[i64],
) -> Result<Complex64> {
    if zeta.len() != table.current_lattice().bins() {
        return Err(Error::LatticeMismatch("zeta must have one component per current bin".into()));
    }
    let fi = table
        .field_lattice()
        .index_of(field)
        .ok_or_else(|| Error::OffLattice(field.to_vec()))?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (ji, &w) in table.row(fi).iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let phase: f64 = table
            .current_lattice()
            .config(ji)
            .iter()
            .zip(zeta)
            .map(|(j, z)| *j as f64 * z)
            .sum();
        acc += w * Complex64::new(0.0, phase).exp();
    }
    Ok(acc)
}

/// Joint distribution of radiated field and current given the external
/// field: the current follows the table and the field is deterministically
/// its radiation, `p(A, J | A_e) = p(J|A_e) [A == K J]`.
#[derive(Debug, Clone)]
pub struct JointFieldCurrent {
    conditioning: Lattice,
    radiated: Lattice,
    current: Lattice,
    /// Per conditioning index: `(radiated index, current index, weight)`.
    entries: Vec<Vec<(usize, usize, f64)>>,
}

impl JointFieldCurrent {
    pub fn conditioning_lattice(&self) -> &Lattice {
        &self.conditioning
    }

    pub fn radiated_lattice(&self) -> &Lattice {
        &self.radiated
    }

    pub fn current_lattice(&self) -> &Lattice {
        &self.current
    }

    pub fn entries(&self, conditioning_index: usize) -> &[(usize, usize, f64)] {
        &self.entries[conditioning_index]
    }

    /// Marginal over the radiated field; returns the current weights row.
    pub fn marginal_current(&self, conditioning_index: usize) -> Vec<f64> {
        let nc = self.current.config_count().expect("validated");
        let mut out = vec![0.0; nc];
        for &(_, ji, w) in &self.entries[conditioning_index] {
            out[ji] += w;
        }
        out
    }

    /// First moment of the radiated field per bin.
    pub fn field_mean(&self, conditioning_index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.radiated.bins()];
        for &(ai, _, w) in &self.entries[conditioning_index] {
            for (slot, level) in out.iter_mut().zip(self.radiated.config(ai)) {
                *slot += w * level as f64;
            }
        }
        out
    }

    /// First moment of the current per bin.
    pub fn current_mean(&self, conditioning_index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.current.bins()];
        for &(_, ji, w) in &self.entries[conditioning_index] {
            for (slot, level) in out.iter_mut().zip(self.current.config(ji)) {
                *slot += w * level as f64;
            }
        }
        out
    }
}

/// Lifts a table to the joint field/current distribution. Every radiated
/// configuration `K J` must land on the table's field lattice.
pub fn joint_field_current(
    table: &ConditionalTable,
    kernel: &LatticeKernel,
) -> Result<JointFieldCurrent> {
    if kernel.bins() != table.current_lattice().bins() {
        return Err(Error::LatticeMismatch("kernel bins differ from current bins".into()));
    }
    let nf = table.field_lattice().config_count()?;
    let nc = table.current_lattice().config_count()?;
    let mut entries = Vec::with_capacity(nf);
    for fi in 0..nf {
        let mut row = Vec::new();
        for ji in 0..nc {
            let w = table.weight(fi, ji);
            let radiated = kernel.shift(&table.current_lattice().config(ji));
            let ai = table
                .field_lattice()
                .index_of(&radiated)
                .ok_or(Error::OffLattice(radiated))?;
            if w != 0.0 {
                row.push((ai, ji, w));
            }
        }
        entries.push(row);
    }
    Ok(JointFieldCurrent {
        conditioning: table.field_lattice().clone(),
        radiated: table.field_lattice().clone(),
        current: table.current_lattice().clone(),
        entries,
    })
}
