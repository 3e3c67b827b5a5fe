use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::signal::{ComplexEnvelope, RealSignal};

/// Ideal Poissonian photodetector: pulse probability per unit time is
/// `eta * w(t)` with `w = |E|^2` the photon flux, every pulse carrying
/// charge `q`, all pulses independent given the field. No dark counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Quantum efficiency, in (0, 1].
    pub efficiency: f64,
    /// Charge per photodetection pulse.
    pub pulse_charge: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, pulse_charge: f64) -> Result<Self> {
        let model = Self { efficiency, pulse_charge };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.pulse_charge > 0.0) {
            return Err(Error::InvalidParameter("pulse charge must be > 0".into()));
        }
        Ok(())
    }
}

/// Photodetection pulse counts per time bin, with the pulse charge that
/// converts them to a current.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotocurrentRecord {
    grid: TimeGrid,
    counts: Vec<u32>,
    pulse_charge: f64,
}

impl PhotocurrentRecord {
    pub fn new(grid: TimeGrid, counts: Vec<u32>, pulse_charge: f64) -> Result<Self> {
        if counts.len() != grid.len() {
            return Err(Error::GridMismatch("count vector length differs from grid".into()));
        }
        Ok(Self { grid, counts, pulse_charge })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn pulse_charge(&self) -> f64 {
        self.pulse_charge
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// Photocurrent `J(t) = q * counts(t) / dt`.
    pub fn current(&self) -> RealSignal {
        let scale = self.pulse_charge / self.grid.dt();
        RealSignal::new(self.grid, self.counts.iter().map(|&c| scale * f64::from(c)).collect())
            .expect("finite by construction")
    }
}

/// Detects one envelope trajectory: per-bin counts are Poisson with mean
/// `eta * |E(t)|^2 * dt`, independent across bins given the field.
pub fn detect(
    field: &ComplexEnvelope,
    model: &DetectorModel,
    rng: &mut impl Rng,
) -> Result<PhotocurrentRecord> {
    model.validate()?;
    let grid = *field.grid();
    let dt = grid.dt();
    let mut max_mean = 0.0f64;
    let mut counts = Vec::with_capacity(grid.len());
    for (index, e) in field.samples().iter().enumerate() {
        let w = e.norm_sqr();
        if w < 0.0 || !w.is_finite() {
            return Err(Error::NegativeFlux { index, value: w });
        }
        let mean = model.efficiency * w * dt;
        max_mean = max_mean.max(mean);
        let c = if mean == 0.0 {
            0
        } else {
            Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?
                .sample(rng) as u32
        };
        counts.push(c);
    }
    if max_mean > 0.1 {
        // one report per process is enough; every record would spam
        static COARSE_GRID_WARNED: std::sync::Once = std::sync::Once::new();
        COARSE_GRID_WARNED.call_once(|| {
            log::warn!(
                "detector bin mean reaches {max_mean:.3} counts; \
                 per-bin Poisson stays exact but the grid poorly resolves the flux"
            );
        });
    }
    PhotocurrentRecord::new(grid, counts, model.pulse_charge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dark_detector_stays_dark() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        let grid = TimeGrid::new(0.0, 0.1, 128).unwrap();
        let field = ComplexEnvelope::zeros(grid);
        let model = DetectorModel::new(0.8, 1.0).unwrap();
        let rec = detect(&field, &model, &mut rng).unwrap();
        assert_eq!(rec.total_counts(), 0);
    }

    #[test]
    fn mean_and_variance_of_total_counts() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(14);
        let grid = TimeGrid::new(0.0, 0.01, 100).unwrap();
        let w: f64 = 40.0;
        let eta = 0.7;
        let field = ComplexEnvelope::new(
            grid,
            vec![num_complex::Complex64::new(w.sqrt(), 0.0); 100],
        )
        .unwrap();
        let model = DetectorModel::new(eta, 2.0).unwrap();
        let trials = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let n = detect(&field, &model, &mut rng).unwrap().total_counts() as f64;
            sum += n;
            sum_sq += n * n;
        }
        let mean = sum / trials as f64;
        let var = sum_sq / trials as f64 - mean * mean;
        let expect = eta * w * 1.0; // eta * w * T
        let se_mean = (expect / trials as f64).sqrt();
        assert!((mean - expect).abs() < 3.0 * se_mean, "mean {mean} vs {expect}");
        // variance of the variance estimator for Poisson ~ 2 mu^2 / N (plus mu/N)
        let se_var = ((2.0 * expect * expect + expect) / trials as f64).sqrt();
        assert!((var - expect).abs() < 3.0 * se_var, "var {var} vs {expect}");
    }

    #[test]
    fn current_conversion() {
        let grid = TimeGrid::new(0.0, 0.5, 3).unwrap();
        let rec = PhotocurrentRecord::new(grid, vec![0, 2, 5], 1.5).unwrap();
        assert_eq!(rec.current().samples(), &[0.0, 6.0, 15.0]);
    }

    #[test]
    fn efficiency_bounds() {
        assert!(DetectorModel::new(0.0, 1.0).is_err());
        assert!(DetectorModel::new(1.01, 1.0).is_err());
        assert!(DetectorModel::new(1.0, 0.0).is_err());
        assert!(DetectorModel::new(1.0, 1.0).is_ok());
    }
}
