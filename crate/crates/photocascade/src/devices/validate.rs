//! Quantum-consistency validators for device parameters.
//!
//! An amplifier of gain `T_a > 1` must add noise: its spectral density
//! `4 n_a / gamma_a` is bounded below by `T_a - 1` (the hard quantum bound)
//! and, more weakly, by `(T_a - 1)/2` (the value below which a boundary
//! sub-Poissonian source would drive the photocurrent spectrum negative).
//! A moment-specified source must keep its excess spectrum above `-n0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

use super::amplifier::AmplifierModel;
use super::excess::ExcessCorrelation;
use super::source::SourceModel;

/// Hard lower bound on `4 n_a / gamma_a`: `T_a - 1` for gain, `0` otherwise.
pub fn caves_bound(power_transfer: f64) -> f64 {
    0.5 * ((power_transfer - 1.0) + (power_transfer - 1.0).abs())
}

/// Weak classical-consistency bound on `4 n_a / gamma_a`: `(T_a - 1)/2`,
/// which may be negative (inactive) for attenuators.
pub fn weak_bound(power_transfer: f64) -> f64 {
    0.5 * (power_transfer - 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplifierLimitReport {
    /// `4 n_a / gamma_a`, the spectral density of the added noise.
    pub noise_density: f64,
    pub caves_bound: f64,
    pub weak_bound: f64,
    pub caves_ok: bool,
    pub weak_ok: bool,
    /// `noise_density - bound`; nonnegative means the bound is respected.
    pub caves_margin: f64,
    pub weak_margin: f64,
}

pub fn validate_amplifier(model: &AmplifierModel) -> AmplifierLimitReport {
    let density = model.noise_spectral_density();
    let caves = caves_bound(model.power_transfer);
    let weak = weak_bound(model.power_transfer);
    AmplifierLimitReport {
        noise_density: density,
        caves_bound: caves,
        weak_bound: weak,
        caves_ok: density >= caves,
        weak_ok: density >= weak,
        caves_margin: density - caves,
        weak_margin: density - weak,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentSourceReport {
    /// Minimum of the excess spectrum over the checked frequencies.
    pub min_value: f64,
    /// Frequency at which the minimum occurs.
    pub min_omega: f64,
    /// `min_value + n0`; the bound requires this to be >= 0.
    pub margin: f64,
    pub ok: bool,
}

/// Checks the sub-Poissonian depth bound `n2(omega) >= -n0` on the DFT
/// frequencies of `grid` (the analytic transform of the excess family is
/// evaluated; see [`numeric_excess_spectrum`] for the direct discrete
/// transform used as a cross-check).
pub fn validate_moment_source(model: &SourceModel, grid: &TimeGrid) -> Result<MomentSourceReport> {
    let SourceModel::MomentSpecified { mean_flux, excess } = model else {
        return Err(Error::InvalidParameter(
            "moment-source validation applies to moment-specified sources".into(),
        ));
    };
    excess.validate()?;
    check_symmetry(excess, grid)?;
    let n0 = *mean_flux;
    let mut min_value = f64::INFINITY;
    let mut min_omega = 0.0;
    for k in 0..=grid.len() / 2 {
        let omega = grid.dft_omega(k);
        let value = excess.spectrum(omega);
        if value < min_value {
            min_value = value;
            min_omega = omega;
        }
    }
    let margin = min_value + n0;
    let tol = 1e-9 * n0.max(1.0);
    Ok(MomentSourceReport { min_value, min_omega, margin, ok: margin >= -tol })
}

fn check_symmetry(excess: &ExcessCorrelation, grid: &TimeGrid) -> Result<()> {
    let scale = excess.correlation(0.0).abs().max(1e-300);
    for k in 1..grid.len().min(64) {
        let tau = grid.dt() * k as f64;
        if (excess.correlation(tau) - excess.correlation(-tau)).abs() > 1e-9 * scale {
            return Err(Error::InvalidParameter(
                "excess correlation must be symmetric in tau".into(),
            ));
        }
    }
    Ok(())
}

/// Direct discrete transform of the sampled excess correlation,
/// `dt * sum_m exp(i omega m dt) n2(m dt)` over lags `|m| < n`. Used as an
/// independent oracle for the analytic transforms.
pub fn numeric_excess_spectrum(excess: &ExcessCorrelation, grid: &TimeGrid, omega: f64) -> f64 {
    let dt = grid.dt();
    let mut acc = excess.correlation(0.0);
    for m in 1..grid.len() {
        let tau = dt * m as f64;
        acc += 2.0 * (omega * tau).cos() * excess.correlation(tau);
    }
    acc * dt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caves_and_weak_bound_table() {
        assert_eq!(caves_bound(0.5), 0.0);
        assert_eq!(caves_bound(1.0), 0.0);
        assert_eq!(caves_bound(2.0), 1.0);
        assert_eq!(caves_bound(3.0), 2.0);
        assert_eq!(weak_bound(0.5), -0.25);
        assert_eq!(weak_bound(1.0), 0.0);
        assert_eq!(weak_bound(2.0), 0.5);
        assert_eq!(weak_bound(3.0), 1.0);
    }

    #[test]
    fn attenuator_without_noise_passes() {
        let model = AmplifierModel::new(0.5, 0.0, 10.0).unwrap();
        let report = validate_amplifier(&model);
        assert!(report.caves_ok && report.weak_ok);
        assert_eq!(report.caves_margin, 0.0);
        assert_eq!(report.weak_margin, 0.25);
    }

    #[test]
    fn unity_gain_boundary() {
        let model = AmplifierModel::new(1.0, 0.0, 10.0).unwrap();
        let report = validate_amplifier(&model);
        assert!(report.caves_ok && report.weak_ok);
        assert_eq!(report.caves_bound, 0.0);
        assert_eq!(report.weak_bound, 0.0);
    }

    #[test]
    fn gain_two_bounds() {
        // at T_a = 2 the hard bound on 4 n_a/gamma_a is 1, the weak one 0.5
        let noiseless = AmplifierModel::new(2.0, 0.0, 10.0).unwrap();
        let report = validate_amplifier(&noiseless);
        assert!(!report.caves_ok && !report.weak_ok);
        assert_eq!(report.caves_bound, 1.0);
        assert_eq!(report.weak_bound, 0.5);
        // exactly at the hard bound: n_a = gamma_a / 4
        let at_bound = AmplifierModel::new(2.0, 2.5, 10.0).unwrap();
        let report = validate_amplifier(&at_bound);
        assert!(report.caves_ok);
        assert_eq!(report.caves_margin, 0.0);
    }

    #[test]
    fn monotone_in_added_noise() {
        for t in [0.5, 1.0, 2.0, 4.0] {
            let mut prev_pass = false;
            for k in 0..40 {
                let model = AmplifierModel::new(t, 0.05 * k as f64, 1.0).unwrap();
                let pass = validate_amplifier(&model).caves_ok;
                assert!(!prev_pass || pass, "increasing n_a must never turn pass into fail");
                prev_pass = pass;
            }
        }
    }

    #[test]
    fn moment_source_boundary_and_violation() {
        let grid = TimeGrid::new(0.0, 0.05, 4096).unwrap();
        let n0 = 100.0;
        // zero excess: coherent-like, margin n0
        let ok = SourceModel::MomentSpecified { mean_flux: n0, excess: ExcessCorrelation::None };
        let r = validate_moment_source(&ok, &grid).unwrap();
        assert!(r.ok);
        assert_eq!(r.margin, n0);

        // boundary: n2(tau) = -n0 gamma_s e^{-gamma_s|tau|} / 2 has transform
        // -n0 gamma_s^2/(gamma_s^2+omega^2), minimum exactly -n0 at omega = 0
        let gamma_s = 2.0;
        let boundary = SourceModel::MomentSpecified {
            mean_flux: n0,
            excess: ExcessCorrelation::Lorentzian { amplitude: -n0 * gamma_s / 2.0, rate: gamma_s },
        };
        let r = validate_moment_source(&boundary, &grid).unwrap();
        assert!(r.ok, "boundary case must pass");
        assert_eq!(r.margin, 0.0, "boundary case has zero margin");
        assert_eq!(r.min_omega, 0.0);

        // scaled up fourfold: violates the bound at omega = 0
        let bad = SourceModel::MomentSpecified {
            mean_flux: n0,
            excess: ExcessCorrelation::Lorentzian { amplitude: -2.0 * n0 * gamma_s, rate: gamma_s },
        };
        let r = validate_moment_source(&bad, &grid).unwrap();
        assert!(!r.ok);
        assert!(r.margin < 0.0);
    }

    #[test]
    fn lorentzian_transform_cross_checked_numerically() {
        // long window, fine grid: the discrete transform approximates the
        // analytic Lorentzian transform closely at the checked frequencies
        let gamma_s = 1.0;
        let excess = ExcessCorrelation::Lorentzian { amplitude: -50.0, rate: gamma_s };
        let grid = TimeGrid::new(0.0, 0.005, 16384).unwrap(); // window 82/gamma_s
        for k in [0usize, 3, 17, 64] {
            let omega = grid.dft_omega(k);
            let numeric = numeric_excess_spectrum(&excess, &grid, omega);
            let analytic = excess.spectrum(omega);
            assert!(
                (numeric - analytic).abs() < 5e-3 * 100.0,
                "omega={omega}: numeric {numeric} vs analytic {analytic}"
            );
        }
    }
}
