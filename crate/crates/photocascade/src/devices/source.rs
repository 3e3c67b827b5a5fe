use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::signal::ComplexEnvelope;

use super::excess::ExcessCorrelation;
use super::ou::sample_stationary_complex_ou;

/// Deterministic flux envelope `w0(t)` of a coherent source, photons/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxEnvelope {
    Constant { flux: f64 },
    GaussianPulse { peak: f64, center: f64, width: f64 },
}

impl FluxEnvelope {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { flux } => {
                if flux.is_finite() && flux >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("coherent flux must be >= 0, got {flux}")))
                }
            }
            Self::GaussianPulse { peak, width, center } => {
                if peak.is_finite() && peak >= 0.0 && width > 0.0 && center.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("pulse needs peak >= 0, width > 0".into()))
                }
            }
        }
    }

    pub fn flux_at(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { flux } => flux,
            Self::GaussianPulse { peak, center, width } => {
                let x = (t - center) / width;
                peak * (-0.5 * x * x).exp()
            }
        }
    }

    /// Flux of a stationary envelope; pulses are not stationary.
    pub fn stationary_flux(&self) -> Option<f64> {
        match *self {
            Self::Constant { flux } => Some(flux),
            Self::GaussianPulse { .. } => None,
        }
    }
}

/// Light source feeding the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceModel {
    /// Deterministic envelope with `|E(t)|^2 = w0(t)`.
    Coherent { envelope: FluxEnvelope },
    /// Gaussian chaotic light: circular complex Ornstein-Uhlenbeck envelope
    /// with `<E*(t)E(t')> = n0 exp(-(gamma_c/2)|t-t'|)`.
    GaussianThermal { mean_flux: f64, coherence_rate: f64 },
    /// Source known only through its stationary flux and excess intensity
    /// correlation; not sampleable, used by the analytic moment path. This is
    /// the only way a nonclassical (sub-Poissonian) source enters.
    MomentSpecified { mean_flux: f64, excess: ExcessCorrelation },
}

impl SourceModel {
    pub fn coherent_constant(flux: f64) -> Self {
        Self::Coherent { envelope: FluxEnvelope::Constant { flux } }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Coherent { envelope } => envelope.validate(),
            Self::GaussianThermal { mean_flux, coherence_rate } => {
                if !(*mean_flux >= 0.0) {
                    return Err(Error::InvalidParameter("thermal mean flux must be >= 0".into()));
                }
                if !(*coherence_rate > 0.0) {
                    return Err(Error::InvalidParameter("thermal coherence rate must be > 0".into()));
                }
                Ok(())
            }
            Self::MomentSpecified { mean_flux, excess } => {
                if !(*mean_flux >= 0.0) {
                    return Err(Error::InvalidParameter("mean flux must be >= 0".into()));
                }
                excess.validate()
            }
        }
    }

    pub fn is_sampleable(&self) -> bool {
        !matches!(self, Self::MomentSpecified { .. })
    }

    /// Stationary mean flux `n0`, when the source is stationary.
    pub fn stationary_flux(&self) -> Option<f64> {
        match self {
            Self::Coherent { envelope } => envelope.stationary_flux(),
            Self::GaussianThermal { mean_flux, .. } => Some(*mean_flux),
            Self::MomentSpecified { mean_flux, .. } => Some(*mean_flux),
        }
    }

    /// Excess intensity correlation of a stationary source.
    pub fn excess_correlation(&self) -> Option<ExcessCorrelation> {
        match self {
            Self::Coherent { envelope } => {
                envelope.stationary_flux().map(|_| ExcessCorrelation::None)
            }
            Self::GaussianThermal { mean_flux, coherence_rate } => {
                Some(ExcessCorrelation::thermal(*mean_flux, *coherence_rate))
            }
            Self::MomentSpecified { excess, .. } => Some(excess.clone()),
        }
    }

    /// Characteristic spectral width of the radiated intensity fluctuations.
    pub fn spectral_width(&self) -> f64 {
        match self {
            Self::Coherent { .. } => 0.0,
            Self::GaussianThermal { coherence_rate, .. } => *coherence_rate,
            Self::MomentSpecified { excess, .. } => excess.spectral_width(),
        }
    }
}

/// Draws one envelope trajectory of a sampleable source.
pub fn sample_source(model: &SourceModel, grid: TimeGrid, rng: &mut impl Rng) -> Result<ComplexEnvelope> {
    model.validate()?;
    match model {
        SourceModel::Coherent { envelope } => {
            let samples = grid
                .times()
                .map(|t| Complex64::new(envelope.flux_at(t).sqrt(), 0.0))
                .collect();
            ComplexEnvelope::new(grid, samples)
        }
        SourceModel::GaussianThermal { mean_flux, coherence_rate } => {
            Ok(sample_stationary_complex_ou(grid, *mean_flux, *coherence_rate, rng))
        }
        SourceModel::MomentSpecified { .. } => Err(Error::NotSampleable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_coherent_source_is_dark() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let grid = TimeGrid::new(0.0, 0.1, 32).unwrap();
        let e = sample_source(&SourceModel::coherent_constant(0.0), grid, &mut rng).unwrap();
        assert!(e.samples().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn coherent_envelope_carries_the_flux() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let grid = TimeGrid::new(0.0, 0.1, 32).unwrap();
        let e = sample_source(&SourceModel::coherent_constant(450.0), grid, &mut rng).unwrap();
        for v in e.intensity().samples() {
            assert!((v - 450.0).abs() < 1e-9);
        }
    }

    #[test]
    fn thermal_ensemble_mean_flux() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(33);
        let grid = TimeGrid::new(0.0, 0.02, 64).unwrap();
        let n0 = 3.0;
        let gamma_c = 5.0;
        let model = SourceModel::GaussianThermal { mean_flux: n0, coherence_rate: gamma_c };
        let trials = 10_000;
        let mut mean = 0.0;
        let mut corr = 0.0;
        let lag_bins = 20; // tau = 0.4 = 2/gamma_c
        for _ in 0..trials {
            let e = sample_source(&model, grid, &mut rng).unwrap();
            let s = e.samples();
            mean += s[0].norm_sqr();
            corr += (s[0].conj() * s[lag_bins]).re;
        }
        mean /= trials as f64;
        corr /= trials as f64;
        // intensity of thermal light has variance n0^2 per sample
        assert!((mean - n0).abs() < 3.0 * n0 / (trials as f64).sqrt());
        let expected = n0 * (-0.5 * gamma_c * 0.4f64).exp();
        assert!((corr - expected).abs() < 0.05 * n0, "lag corr {corr} vs {expected}");
    }

    #[test]
    fn moment_source_is_not_sampleable() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let grid = TimeGrid::new(0.0, 0.1, 8).unwrap();
        let model =
            SourceModel::MomentSpecified { mean_flux: 1.0, excess: ExcessCorrelation::None };
        assert!(matches!(sample_source(&model, grid, &mut rng), Err(Error::NotSampleable)));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SourceModel::coherent_constant(-1.0).validate().is_err());
        assert!(SourceModel::GaussianThermal { mean_flux: 1.0, coherence_rate: 0.0 }
            .validate()
            .is_err());
    }
}
