//! Semiclassical device models of the cascaded chain: light sources, the
//! coherent amplifier with Gaussian spontaneous noise, and the Poissonian
//! photodetector.
//!
//! All optical intensities are photon fluxes (photons per second); detector
//! efficiency and beam geometry are folded into the model parameters, so no
//! fundamental constants appear anywhere.

mod amplifier;
mod detector;
mod excess;
mod ou;
mod source;
mod validate;

pub use amplifier::{amplify, AmplifierModel, NoiseMode};
pub use detector::{detect, DetectorModel, PhotocurrentRecord};
pub use excess::ExcessCorrelation;
pub use ou::sample_stationary_complex_ou;
pub use source::{sample_source, FluxEnvelope, SourceModel};
pub use validate::{
    caves_bound, numeric_excess_spectrum, validate_amplifier, validate_moment_source, weak_bound,
    AmplifierLimitReport, MomentSourceReport,
};
