use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ComplexEnvelope;

use super::ou::sample_stationary_complex_ou;

/// How the amplifier's spontaneous noise is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Exact-discretization Ornstein-Uhlenbeck noise with stationary flux
    /// `n_a` and correlation decay `gamma_a/2`; requires `gamma_a*dt <= 0.1`
    /// so the correlation is resolved on the grid.
    #[default]
    ExactOu,
    /// Delta-correlated limit: independent per-bin draws with spectral
    /// density `4 n_a / gamma_a`. Valid for spectra well below `gamma_a`
    /// only; the per-bin flux is grid dependent.
    White,
}

/// Phase-insensitive coherent amplifier, `E1 = sqrt(T_a) E0 + E_a(t)`.
///
/// The added noise `E_a` is circular complex Gaussian, independent of the
/// input, with `<E_a* E_a(tau)> = n_a exp(-(gamma_a/2)|tau|)` and no
/// anomalous correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierModel {
    /// Power transfer `T_a` (gain above 1, attenuation below).
    pub power_transfer: f64,
    /// Added-noise photon flux `n_a` (photons/s).
    pub added_noise_flux: f64,
    /// Noise bandwidth `gamma_a` (1/s).
    pub noise_bandwidth: f64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
}

impl AmplifierModel {
    pub fn new(power_transfer: f64, added_noise_flux: f64, noise_bandwidth: f64) -> Result<Self> {
        let model = Self {
            power_transfer,
            added_noise_flux,
            noise_bandwidth,
            noise_mode: NoiseMode::ExactOu,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_transfer > 0.0) {
            return Err(Error::InvalidParameter("power transfer must be > 0".into()));
        }
        if !(self.added_noise_flux >= 0.0) {
            return Err(Error::InvalidParameter("added-noise flux must be >= 0".into()));
        }
        if !(self.noise_bandwidth > 0.0) {
            return Err(Error::InvalidParameter("noise bandwidth must be > 0".into()));
        }
        Ok(())
    }

    /// Spectral density of the added noise, `4 n_a / gamma_a`.
    pub fn noise_spectral_density(&self) -> f64 {
        4.0 * self.added_noise_flux / self.noise_bandwidth
    }
}

/// Applies the amplifier to one envelope trajectory.
pub fn amplify(
    input: &ComplexEnvelope,
    model: &AmplifierModel,
    rng: &mut impl Rng,
) -> Result<ComplexEnvelope> {
    model.validate()?;
    let grid = *input.grid();
    let dt = grid.dt();
    match model.noise_mode {
        NoiseMode::ExactOu => {
            if model.noise_bandwidth * dt > 0.1 {
                return Err(Error::Bandwidth(format!(
                    "gamma_a*dt = {:.3} exceeds 0.1; refine the grid or select white noise mode",
                    model.noise_bandwidth * dt
                )));
            }
        }
        NoiseMode::White => {}
    }
    let gain = model.power_transfer.sqrt();
    let noise = match model.noise_mode {
        NoiseMode::ExactOu => {
            sample_stationary_complex_ou(grid, model.added_noise_flux, model.noise_bandwidth, rng)
        }
        NoiseMode::White => {
            let sd = (model.noise_spectral_density() / dt / 2.0).sqrt();
            let samples = (0..grid.len())
                .map(|_| {
                    Complex64::new(
                        sd * rng.sample::<f64, _>(StandardNormal),
                        sd * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect();
            ComplexEnvelope::new(grid, samples).expect("finite")
        }
    };
    let samples = input
        .samples()
        .iter()
        .zip(noise.samples())
        .map(|(e, a)| gain * e + a)
        .collect();
    ComplexEnvelope::new(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use rand::SeedableRng;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 0.01, 64).unwrap()
    }

    #[test]
    fn transparent_amplifier_is_identity() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let model = AmplifierModel::new(1.0, 0.0, 10.0).unwrap();
        let input = ComplexEnvelope::new(
            grid(),
            (0..64).map(|k| Complex64::new(k as f64, -0.5 * k as f64)).collect(),
        )
        .unwrap();
        let out = amplify(&input, &model, &mut rng).unwrap();
        assert_eq!(out.samples(), input.samples());
    }

    #[test]
    fn noise_only_flux_and_fourth_moment() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        let n_a = 4.0;
        let model = AmplifierModel::new(2.0, n_a, 10.0).unwrap();
        let input = ComplexEnvelope::zeros(grid());
        let trials = 20_000;
        let mut flux = 0.0;
        let mut fourth = 0.0;
        for _ in 0..trials {
            let out = amplify(&input, &model, &mut rng).unwrap();
            let v = out.samples()[0].norm_sqr();
            flux += v;
            fourth += v * v;
        }
        flux /= trials as f64;
        fourth /= trials as f64;
        let se_flux = n_a / (trials as f64).sqrt();
        assert!((flux - n_a).abs() < 3.0 * se_flux, "flux {flux} vs {n_a}");
        // |E|^4 of a circular Gaussian: 2 n_a^2, sd ~ sqrt(20) n_a^2
        let se_fourth = (20.0f64).sqrt() * n_a * n_a / (trials as f64).sqrt();
        assert!((fourth - 2.0 * n_a * n_a).abs() < 3.0 * se_fourth, "fourth {fourth}");
    }

    #[test]
    fn linear_in_input_for_fixed_noise_draw() {
        let model = AmplifierModel::new(4.0, 2.5, 10.0).unwrap();
        let alpha = Complex64::new(1.3, -0.4);
        let input = ComplexEnvelope::new(
            grid(),
            (0..64).map(|k| alpha * Complex64::new(0.1 * k as f64, 0.2)).collect(),
        )
        .unwrap();
        let zero = ComplexEnvelope::zeros(grid());
        let mut rng1 = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let mut rng2 = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let with_input = amplify(&input, &model, &mut rng1).unwrap();
        let noise_only = amplify(&zero, &model, &mut rng2).unwrap();
        for k in 0..64 {
            let diff = with_input.samples()[k] - noise_only.samples()[k];
            let expect = 2.0 * input.samples()[k];
            assert!((diff - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn bandwidth_precondition_enforced_for_ou() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        let coarse = TimeGrid::new(0.0, 0.05, 16).unwrap();
        let model = AmplifierModel::new(2.0, 1.0, 10.0).unwrap();
        let input = ComplexEnvelope::zeros(coarse);
        assert!(matches!(amplify(&input, &model, &mut rng), Err(Error::Bandwidth(_))));
        let mut white = model;
        white.noise_mode = NoiseMode::White;
        assert!(amplify(&input, &white, &mut rng).is_ok());
    }

    #[test]
    fn white_mode_per_bin_variance() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let mut model = AmplifierModel::new(1.0, 5.0, 20.0).unwrap();
        model.noise_mode = NoiseMode::White;
        let g = grid();
        let input = ComplexEnvelope::zeros(g);
        let trials = 5_000;
        let mut flux = 0.0;
        for _ in 0..trials {
            flux += amplify(&input, &model, &mut rng).unwrap().samples()[10].norm_sqr();
        }
        flux /= trials as f64;
        let expect = model.noise_spectral_density() / g.dt();
        assert!((flux - expect).abs() < 4.0 * expect / (trials as f64).sqrt() * 1.5);
    }
}
