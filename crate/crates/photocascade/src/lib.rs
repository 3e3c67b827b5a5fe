//! Monte Carlo simulation and exact finite phase-space algebra for cascaded
//! electro-optical chains: a light source feeding an optional coherent
//! amplifier feeding a Poissonian photodetector.
//!
//! The crate has three layers:
//!
//! * sampled-signal numerics ([`grid`], [`signal`], [`kernel`],
//!   [`periodogram`]) — time grids, frequency-part splitting, causal
//!   response kernels, spectral estimation;
//! * device models and closed-form results ([`devices`], [`analytics`],
//!   [`cascade`]) — source/amplifier/detector sampling, photocurrent moment
//!   and spectrum formulas, photocount laws, amplifier noise limits, and the
//!   trajectory engine that checks the formulas by simulation;
//! * exact lattice algebra ([`lattice`]) — conditional (quasi)probability
//!   tables on small integer lattices with dressing, composition and
//!   generating-functional transforms, verified by brute-force enumeration.

pub mod analytics;
pub mod cascade;
pub mod config;
pub mod devices;
pub mod error;
mod fft;
pub mod grid;
pub mod kernel;
pub mod lattice;
pub mod output;
pub mod periodogram;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use signal::{ComplexEnvelope, RealSignal, SpectrumSeries};
