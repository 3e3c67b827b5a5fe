use serde::{Deserialize, Serialize};

use crate::devices::{
    validate_amplifier, validate_moment_source, AmplifierLimitReport, AmplifierModel,
    DetectorModel, MomentSourceReport, SourceModel,
};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Which factorization of the chain the engine executes. All plans sample
/// the same law; they differ in which intermediate is materialized and in
/// the noise substreams they consume, so cross-plan agreement is a
/// distributional statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExecutionPlan {
    /// Materialize both the source field and the amplified field.
    #[default]
    Chain,
    /// Treat source + amplifier as a composite source radiating directly
    /// into the detector.
    CompositeSource,
    /// Treat amplifier + detector as a composite detector measuring the
    /// source field.
    CompositeDetector,
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub source: SourceModel,
    pub amplifier: Option<AmplifierModel>,
    pub detector: DetectorModel,
    pub grid: TimeGrid,
    pub trajectories: usize,
    pub seed: u64,
    #[serde(default)]
    pub plan: ExecutionPlan,
    /// Required ratio of amplifier noise bandwidth to source spectral width.
    #[serde(default = "default_bandwidth_ratio")]
    pub bandwidth_ratio: f64,
    /// Discard an initial window of 5 / (slowest rate) before estimating
    /// spectra and stationary correlations.
    #[serde(default = "default_true")]
    pub discard_transient: bool,
    /// Keep per-trajectory envelopes for diagnostics (chain plan only).
    #[serde(default)]
    pub retain_envelopes: bool,
    /// Run even when the physics validators reject the parameters.
    #[serde(default)]
    pub allow_unphysical: bool,
}

fn default_bandwidth_ratio() -> f64 {
    10.0
}

fn default_true() -> bool {
    true
}

/// Bandwidth separation check between amplifier noise and signal.
#[derive(Debug, Clone, Serialize)]
pub struct BandwidthCheck {
    pub noise_bandwidth: f64,
    pub signal_width: f64,
    pub required_ratio: f64,
    pub ok: bool,
}

/// Outcome of the physics validators for a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct PhysicsReport {
    pub amplifier: Option<AmplifierLimitReport>,
    pub bandwidth: Option<BandwidthCheck>,
    pub moment_source: Option<MomentSourceReport>,
}

impl PhysicsReport {
    pub fn is_physical(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(a) = &self.amplifier {
            if !a.caves_ok {
                out.push(format!(
                    "amplifier noise density 4*n_a/gamma_a = {:.6} is below the quantum bound {:.6}",
                    a.noise_density, a.caves_bound
                ));
            }
        }
        if let Some(b) = &self.bandwidth {
            if !b.ok {
                out.push(format!(
                    "amplifier noise bandwidth {:.3} must exceed {} x signal width {:.3}",
                    b.noise_bandwidth, b.required_ratio, b.signal_width
                ));
            }
        }
        if let Some(m) = &self.moment_source {
            if !m.ok {
                out.push(format!(
                    "source excess spectrum dips to {:.6} at omega = {:.6}, below the -n0 bound (margin {:.3e})",
                    m.min_value, m.min_omega, m.margin
                ));
            }
        }
        out
    }
}

impl Scenario {
    /// Structural validation (parameter ranges, sampleability).
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.detector.validate()?;
        if let Some(a) = &self.amplifier {
            a.validate()?;
        }
        if self.trajectories == 0 {
            return Err(Error::InvalidParameter("need at least one trajectory".into()));
        }
        if !(self.bandwidth_ratio >= 1.0) {
            return Err(Error::InvalidParameter("bandwidth ratio must be >= 1".into()));
        }
        Ok(())
    }

    /// Runs the quantum-consistency validators.
    pub fn physics_report(&self) -> PhysicsReport {
        let amplifier = self.amplifier.as_ref().map(validate_amplifier);
        let bandwidth = self.amplifier.as_ref().map(|a| {
            let width = self.source.spectral_width();
            BandwidthCheck {
                noise_bandwidth: a.noise_bandwidth,
                signal_width: width,
                required_ratio: self.bandwidth_ratio,
                ok: width == 0.0 || a.noise_bandwidth >= self.bandwidth_ratio * width,
            }
        });
        let moment_source = match &self.source {
            SourceModel::MomentSpecified { .. } => {
                validate_moment_source(&self.source, &self.grid).ok()
            }
            _ => None,
        };
        PhysicsReport { amplifier, bandwidth, moment_source }
    }

    /// Slowest relaxation rate present in the chain, if any.
    pub fn slowest_rate(&self) -> Option<f64> {
        let mut rates = Vec::new();
        if let SourceModel::GaussianThermal { coherence_rate, .. } = &self.source {
            rates.push(*coherence_rate);
        }
        if let Some(a) = &self.amplifier {
            rates.push(a.noise_bandwidth);
        }
        rates.into_iter().min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    /// First bin used for spectra and stationary correlations.
    pub fn analysis_start_bin(&self) -> usize {
        if !self.discard_transient {
            return 0;
        }
        match self.slowest_rate() {
            None => 0,
            Some(rate) => {
                let bins = (5.0 / rate / self.grid.dt()).ceil() as usize;
                bins.min(self.grid.len() / 2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario {
            source: SourceModel::coherent_constant(100.0),
            amplifier: None,
            detector: DetectorModel::new(1.0, 1.0).unwrap(),
            grid: TimeGrid::new(0.0, 0.001, 1024).unwrap(),
            trajectories: 10,
            seed: 1,
            plan: ExecutionPlan::Chain,
            bandwidth_ratio: 10.0,
            discard_transient: true,
            retain_envelopes: false,
            allow_unphysical: false,
        }
    }

    #[test]
    fn coherent_scenario_is_physical() {
        let s = base();
        s.validate().unwrap();
        assert!(s.physics_report().is_physical());
        assert_eq!(s.analysis_start_bin(), 0);
    }

    #[test]
    fn noiseless_gain_violates_quantum_bound() {
        let mut s = base();
        s.amplifier = Some(AmplifierModel::new(2.0, 0.0, 100.0).unwrap());
        let report = s.physics_report();
        assert!(!report.is_physical());
        let msg = report.violations().join("; ");
        assert!(msg.contains("quantum bound"), "{msg}");
    }

    #[test]
    fn bandwidth_separation_checked_against_thermal_source() {
        let mut s = base();
        s.source = SourceModel::GaussianThermal { mean_flux: 10.0, coherence_rate: 20.0 };
        s.amplifier = Some(AmplifierModel::new(1.0, 0.0, 100.0).unwrap());
        assert!(!s.physics_report().is_physical());
        s.amplifier = Some(AmplifierModel::new(1.0, 0.0, 200.0).unwrap());
        assert!(s.physics_report().is_physical());
    }

    #[test]
    fn transient_window_follows_slowest_rate() {
        let mut s = base();
        s.source = SourceModel::GaussianThermal { mean_flux: 10.0, coherence_rate: 50.0 };
        s.amplifier = Some(AmplifierModel::new(1.0, 0.0, 500.0).unwrap());
        // slowest rate 50 -> 5/50 = 0.1 s -> 100 bins at dt = 1 ms
        assert_eq!(s.analysis_start_bin(), 100);
        s.discard_transient = false;
        assert_eq!(s.analysis_start_bin(), 0);
    }
}
