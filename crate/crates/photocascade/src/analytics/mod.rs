//! Closed-form results for the cascaded chain: photocurrent moments
//! conditional on the detected field and unconditional, the fluctuation
//! spectrum, photocount distributions, and the amplifier noise-limit
//! boundary. These are the oracles the Monte Carlo engine is checked
//! against.

mod counting;
mod moments;
pub mod quad;
mod spectrum;

pub use counting::{
    ks_critical_value, ks_distance_counts, ks_two_sample_critical_value, photocount_distribution,
    CountDistribution, IntensityLaw,
};
pub use moments::{conditional_moments, unconditional_moments, MomentSet};
pub use spectrum::{
    analytic_spectrum, boundary_source_spectrum_terms, caves_boundary_curve, BoundaryTerms,
    CavesBoundaryPoint,
};
