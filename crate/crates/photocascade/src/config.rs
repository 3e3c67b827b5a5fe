//! Scenario configuration files and the run manifest.
//!
//! Configs are TOML with units spelled out in the key names; unknown keys
//! are rejected. The manifest records the config digest, seed, code version
//! and the digest of every emitted file, so a run can be re-verified later.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cascade::{ExecutionPlan, Scenario};
use crate::devices::{
    AmplifierModel, DetectorModel, ExcessCorrelation, FluxEnvelope, NoiseMode, SourceModel,
};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    pub source: SourceConfig,
    #[serde(default)]
    pub amplifier: Option<AmplifierConfig>,
    pub detector: DetectorConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t0_s: f64,
    pub dt_s: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum SourceConfig {
    Coherent(CoherentConfig),
    Thermal(ThermalConfig),
    Moment(MomentConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentConfig {
    #[serde(default)]
    pub flux_per_s: Option<f64>,
    #[serde(default)]
    pub pulse_peak_per_s: Option<f64>,
    #[serde(default)]
    pub pulse_center_s: Option<f64>,
    #[serde(default)]
    pub pulse_width_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub mean_flux_per_s: f64,
    pub coherence_rate_per_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentConfig {
    pub mean_flux_per_s: f64,
    pub excess: ExcessConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum ExcessConfig {
    None {},
    Lorentzian { amplitude_per_s2: f64, rate_per_s: f64 },
    GaussianLine { depth_per_s2: f64, center_rad_per_s: f64, sigma_rad_per_s: f64 },
    /// Gaussian line pinned at the sub-Poissonian depth bound `-n0`.
    BoundaryLine { center_rad_per_s: f64, sigma_rad_per_s: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifierConfig {
    pub power_transfer: f64,
    pub added_noise_flux_per_s: f64,
    pub noise_bandwidth_per_s: f64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub efficiency: f64,
    pub pulse_charge: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trajectories: usize,
    pub seed: u64,
    #[serde(default)]
    pub plan: ExecutionPlan,
    #[serde(default = "default_true")]
    pub discard_transient: bool,
    #[serde(default)]
    pub segment_bins: Option<usize>,
    #[serde(default)]
    pub max_lag_bins: Option<usize>,
    #[serde(default = "default_bandwidth_ratio")]
    pub bandwidth_ratio: f64,
    #[serde(default)]
    pub retain_envelopes: bool,
}

fn default_true() -> bool {
    true
}

fn default_bandwidth_ratio() -> f64 {
    10.0
}

/// Tolerances of the oracle comparisons written to the run summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "default_sigmas")]
    pub mean_sigmas: f64,
    #[serde(default = "default_spectrum_tol")]
    pub spectrum_rel_tol: f64,
    /// Band over which the spectrum is compared, rad/s; defaults to
    /// `[4 * resolution, 0.8 * Nyquist]`.
    #[serde(default)]
    pub spectrum_band_rad_per_s: Option<[f64; 2]>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            mean_sigmas: default_sigmas(),
            spectrum_rel_tol: default_spectrum_tol(),
            spectrum_band_rad_per_s: None,
        }
    }
}

fn default_sigmas() -> f64 {
    3.0
}

fn default_spectrum_tol() -> f64 {
    0.05
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.to_scenario()?; // validate eagerly so schema errors fail closed
        Ok(config)
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let grid = TimeGrid::new(self.grid.t0_s, self.grid.dt_s, self.grid.bins)?;
        let source = match &self.source {
            SourceConfig::Coherent(c) => {
                let envelope = match (c.flux_per_s, c.pulse_peak_per_s) {
                    (Some(flux), None) => FluxEnvelope::Constant { flux },
                    (None, Some(peak)) => FluxEnvelope::GaussianPulse {
                        peak,
                        center: c.pulse_center_s.unwrap_or(0.0),
                        width: c.pulse_width_s.ok_or_else(|| {
                            Error::Config("pulsed source needs pulse_width_s".into())
                        })?,
                    },
                    _ => {
                        return Err(Error::Config(
                            "coherent source needs exactly one of flux_per_s or pulse_peak_per_s".into(),
                        ))
                    }
                };
                SourceModel::Coherent { envelope }
            }
            SourceConfig::Thermal(t) => SourceModel::GaussianThermal {
                mean_flux: t.mean_flux_per_s,
                coherence_rate: t.coherence_rate_per_s,
            },
            SourceConfig::Moment(m) => {
                let excess = match &m.excess {
                    ExcessConfig::None {} => ExcessCorrelation::None,
                    ExcessConfig::Lorentzian { amplitude_per_s2, rate_per_s } => {
                        ExcessCorrelation::Lorentzian { amplitude: *amplitude_per_s2, rate: *rate_per_s }
                    }
                    ExcessConfig::GaussianLine { depth_per_s2, center_rad_per_s, sigma_rad_per_s } => {
                        ExcessCorrelation::GaussianLine {
                            depth: *depth_per_s2,
                            center: *center_rad_per_s,
                            sigma: *sigma_rad_per_s,
                        }
                    }
                    ExcessConfig::BoundaryLine { center_rad_per_s, sigma_rad_per_s } => {
                        ExcessCorrelation::boundary_line(
                            m.mean_flux_per_s,
                            *center_rad_per_s,
                            *sigma_rad_per_s,
                        )?
                    }
                };
                SourceModel::MomentSpecified { mean_flux: m.mean_flux_per_s, excess }
            }
        };
        let amplifier = self
            .amplifier
            .as_ref()
            .map(|a| -> Result<AmplifierModel> {
                let mut model = AmplifierModel::new(
                    a.power_transfer,
                    a.added_noise_flux_per_s,
                    a.noise_bandwidth_per_s,
                )?;
                model.noise_mode = a.noise_mode;
                Ok(model)
            })
            .transpose()?;
        let detector = DetectorModel::new(self.detector.efficiency, self.detector.pulse_charge)?;
        let scenario = Scenario {
            source,
            amplifier,
            detector,
            grid,
            trajectories: self.run.trajectories,
            seed: self.run.seed,
            plan: self.run.plan,
            bandwidth_ratio: self.run.bandwidth_ratio,
            discard_transient: self.run.discard_transient,
            retain_envelopes: self.run.retain_envelopes,
            allow_unphysical: false,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// One oracle comparison recorded in the summary and manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

/// Provenance record of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub seed: u64,
    pub code_version: String,
    pub wall_clock_s: f64,
    pub files: Vec<FileDigest>,
    pub checks: Vec<CheckResult>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
