//! Photocount distributions as Poisson transforms of the integrated flux.
//!
//! For a counting window in which the detected flux integrates to `W`, the
//! pulse count is Poisson with mean `eta W`; mixing over the law of `W`
//! gives `P(n) = E_W[exp(-eta W) (eta W)^n / n!]`. A point mass reproduces a
//! Poisson distribution, an exponential law the geometric (single-cell
//! thermal) distribution `P(n) = nbar^n / (1 + nbar)^{n+1}`.

use statrs::function::gamma::ln_gamma;

use crate::devices::DetectorModel;
use crate::error::{Error, Result};

use super::quad::integrate;

/// Law of the integrated flux `W = integral w(t) dt` over the counting
/// window (photons).
#[derive(Debug, Clone)]
pub enum IntensityLaw {
    /// Deterministic window flux (coherent light).
    PointMass { integrated_flux: f64 },
    /// Exponential law (single-cell thermal light).
    Exponential { mean: f64 },
    /// Samples of `W`, e.g. from simulated envelopes.
    Empirical { samples: Vec<f64> },
}

impl IntensityLaw {
    fn validate(&self) -> Result<()> {
        match self {
            Self::PointMass { integrated_flux } => {
                if *integrated_flux >= 0.0 && integrated_flux.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("integrated flux must be >= 0".into()))
                }
            }
            Self::Exponential { mean } => {
                if *mean > 0.0 && mean.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("exponential mean must be > 0".into()))
                }
            }
            Self::Empirical { samples } => {
                if samples.is_empty() {
                    return Err(Error::EmptyEnsemble("no intensity samples".into()));
                }
                if let Some(index) = samples.iter().position(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::NegativeFlux { index, value: samples[index] });
                }
                Ok(())
            }
        }
    }

    fn mean(&self) -> f64 {
        match self {
            Self::PointMass { integrated_flux } => *integrated_flux,
            Self::Exponential { mean } => *mean,
            Self::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }
}

/// Distribution of the total pulse count in a window.
#[derive(Debug, Clone)]
pub struct CountDistribution {
    probabilities: Vec<f64>,
    tail_mass: f64,
}

impl CountDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn cdf(&self, n: usize) -> f64 {
        self.probabilities.iter().take(n + 1).sum()
    }

    /// Kolmogorov-Smirnov distance to another count distribution.
    pub fn ks_distance(&self, other: &CountDistribution) -> f64 {
        let len = self.probabilities.len().max(other.probabilities.len());
        let mut fa = 0.0;
        let mut fb = 0.0;
        let mut d = 0.0f64;
        for n in 0..len {
            fa += self.probability(n);
            fb += other.probability(n);
            d = d.max((fa - fb).abs());
        }
        d
    }
}

/// Sup distance between the empirical CDF of observed totals and a count
/// distribution.
pub fn ks_distance_counts(observed: &[u64], law: &CountDistribution) -> f64 {
    if observed.is_empty() {
        return 1.0;
    }
    let mut sorted = observed.to_vec();
    sorted.sort_unstable();
    let max = *sorted.last().unwrap() as usize;
    let total = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut idx = 0;
    let mut f_law = 0.0;
    for n in 0..=max.max(law.probabilities.len().saturating_sub(1)) {
        while idx < sorted.len() && sorted[idx] as usize <= n {
            idx += 1;
        }
        let f_emp = idx as f64 / total;
        f_law += law.probability(n);
        d = d.max((f_emp - f_law).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at level `alpha`.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_two_sample_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn ln_poisson_pmf(n: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * mean.ln() - mean - ln_gamma(n as f64 + 1.0)
}

fn poisson_pmf(n: usize, mean: f64) -> f64 {
    ln_poisson_pmf(n, mean).exp()
}

const TAIL_TARGET: f64 = 1e-9;
const QUAD_REL_TOL: f64 = 1e-9;

/// Photocount distribution of a detector fed by light whose window-integrated
/// flux follows `intensity_law`. Truncated once the accumulated tail is below
/// 1e-9 (reported as `tail_mass`).
pub fn photocount_distribution(
    intensity_law: &IntensityLaw,
    detector: &DetectorModel,
) -> Result<CountDistribution> {
    detector.validate()?;
    intensity_law.validate()?;
    let eta = detector.efficiency;
    let mean_counts = eta * intensity_law.mean();
    // crude cap well beyond any realistic tail at the 1e-9 level
    let hard_cap = (10.0 * mean_counts + 50.0 * (mean_counts + 1.0).sqrt() + 200.0) as usize;

    let mut probabilities = Vec::new();
    let mut cumulative = 0.0;
    for n in 0..=hard_cap {
        let p = match intensity_law {
            IntensityLaw::PointMass { integrated_flux } => poisson_pmf(n, eta * integrated_flux),
            IntensityLaw::Exponential { mean } => {
                // the integrand is a Gamma(n+1, rate) bump; integrate a
                // +-15 sigma window around it
                let rate = 1.0 / mean + eta;
                let shape = (n + 1) as f64;
                let lower = ((shape - 15.0 * shape.sqrt() - 10.0) / rate).max(0.0);
                let upper = (shape + 15.0 * shape.sqrt() + 40.0) / rate;
                let f = |w: f64| (-w / mean).exp() / mean * poisson_pmf(n, eta * w);
                integrate(&f, lower, upper, QUAD_REL_TOL, 1e-300)
            }
            IntensityLaw::Empirical { samples } => {
                samples.iter().map(|&w| poisson_pmf(n, eta * w)).sum::<f64>() / samples.len() as f64
            }
        };
        probabilities.push(p.max(0.0));
        cumulative += p;
        if 1.0 - cumulative < TAIL_TARGET && n as f64 > mean_counts {
            break;
        }
    }
    Ok(CountDistribution { probabilities, tail_mass: (1.0 - cumulative).max(0.0) })
}
