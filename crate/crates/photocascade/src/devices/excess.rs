use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Excess intensity correlation of a source over the coherent baseline:
/// `n2(tau) = <w(t) w(t+tau)> - n0^2`, with its analytic Fourier transform
/// `n2(omega) = integral dtau exp(i omega tau) n2(tau)`.
///
/// The transform of the *full* correlation differs only by a zero-frequency
/// delta carrying the `n0^2` baseline, which never enters spectra evaluated
/// at `omega > 0`. Negative transforms describe sub-Poissonian light; the
/// admissible depth is bounded by `-n0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExcessCorrelation {
    /// No excess: coherent-like intensity statistics.
    None,
    /// `n2(tau) = amplitude * exp(-rate |tau|)`, transform
    /// `2 amplitude rate / (rate^2 + omega^2)`.
    Lorentzian { amplitude: f64, rate: f64 },
    /// Gaussian spectral notch/peak of `depth` at `+-center`:
    /// `n2(omega) = depth [exp(-(omega-center)^2/2 sigma^2) + exp(-(omega+center)^2/2 sigma^2)]`,
    /// `n2(tau) = (2 sigma depth / sqrt(2 pi)) exp(-sigma^2 tau^2 / 2) cos(center tau)`.
    GaussianLine { depth: f64, center: f64, sigma: f64 },
}

impl ExcessCorrelation {
    /// Thermal (Gaussian chaotic) light of mean flux `n0` and coherence rate
    /// `gamma_c`: excess `n0^2 exp(-gamma_c |tau|)`.
    pub fn thermal(n0: f64, gamma_c: f64) -> Self {
        Self::Lorentzian { amplitude: n0 * n0, rate: gamma_c }
    }

    /// Sub-Poissonian line saturating the depth bound: the transform equals
    /// `-n0` at `omega = +-center` up to the (numerically vanishing,
    /// `center >= 7 sigma` is enforced) overlap of the two lobes.
    pub fn boundary_line(n0: f64, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(center >= 7.0 * sigma) {
            return Err(Error::InvalidParameter(
                "boundary line requires sigma > 0 and center >= 7 sigma".into(),
            ));
        }
        Ok(Self::GaussianLine { depth: -n0, center, sigma })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::None => Ok(()),
            Self::Lorentzian { amplitude, rate } => {
                if !amplitude.is_finite() || !(rate > 0.0) {
                    Err(Error::InvalidParameter("lorentzian excess needs finite amplitude, rate > 0".into()))
                } else {
                    Ok(())
                }
            }
            Self::GaussianLine { depth, center, sigma } => {
                if !depth.is_finite() || !(sigma > 0.0) || !(center > 0.0) {
                    Err(Error::InvalidParameter(
                        "gaussian line needs finite depth, center > 0, sigma > 0".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `n2(tau)`; symmetric in `tau` by construction.
    pub fn correlation(&self, tau: f64) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Lorentzian { amplitude, rate } => amplitude * (-rate * tau.abs()).exp(),
            Self::GaussianLine { depth, center, sigma } => {
                let gauss = (-0.5 * sigma * sigma * tau * tau).exp();
                2.0 * sigma * depth / (2.0 * std::f64::consts::PI).sqrt() * gauss * (center * tau).cos()
            }
        }
    }

    /// Analytic transform `n2(omega)`.
    pub fn spectrum(&self, omega: f64) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Lorentzian { amplitude, rate } => {
                2.0 * amplitude * rate / (rate * rate + omega * omega)
            }
            Self::GaussianLine { depth, center, sigma } => {
                let lobe = |x: f64| (-0.5 * x * x / (sigma * sigma)).exp();
                depth * (lobe(omega - center) + lobe(omega + center))
            }
        }
    }

    /// Characteristic spectral width, used for amplifier bandwidth checks.
    pub fn spectral_width(&self) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Lorentzian { rate, .. } => rate,
            Self::GaussianLine { center, sigma, .. } => center + 3.0 * sigma,
        }
    }
}
