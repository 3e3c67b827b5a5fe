//! Analytic photocurrent fluctuation spectrum and the noise-limit boundary.
//!
//! For `omega > 0` (the zero-frequency constant is excluded) the spectrum of
//! the stationary chain is
//!
//! `J2(omega)/q^2 = eta (T_a n0 + n_a)
//!    + eta^2 (T_a^2 n2(omega) + 8 T_a n0 n_a / gamma_a + 2 n_a^2 / gamma_a)`,
//!
//! where `n2(omega)` is the transform of the source's excess intensity
//! correlation. At a frequency where a sub-Poissonian source saturates
//! `n2 = -n0`, the spectrum collapses to
//! `eta T_a n0 (1 - eta T_a + 8 eta n_a/gamma_a) + eta n_a (1 + 2 eta n_a/gamma_a)`
//! per `q^2`; keeping it nonnegative for arbitrary `n0` forces the weak
//! noise bound `8 n_a / gamma_a >= T_a - 1` at unit efficiency.

use serde::Serialize;

use crate::devices::{caves_bound, weak_bound, AmplifierModel, DetectorModel};
use crate::error::{Error, Result};
use crate::signal::SpectrumSeries;

/// Evaluates the analytic spectrum (current^2 x time units, `q^2` included)
/// at strictly positive frequencies.
pub fn analytic_spectrum(
    n0: f64,
    n2_spectrum: &dyn Fn(f64) -> f64,
    amplifier: Option<&AmplifierModel>,
    detector: &DetectorModel,
    omegas: &[f64],
) -> Result<SpectrumSeries> {
    detector.validate()?;
    if let Some(a) = amplifier {
        a.validate()?;
    }
    if let Some(&bad) = omegas.iter().find(|&&w| !(w > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "spectrum is defined for omega > 0 only, got {bad}"
        )));
    }
    let (t_a, n_a, gamma_a) = match amplifier {
        Some(a) => (a.power_transfer, a.added_noise_flux, a.noise_bandwidth),
        None => (1.0, 0.0, f64::INFINITY),
    };
    let eta = detector.efficiency;
    let q2 = detector.pulse_charge * detector.pulse_charge;
    let values = omegas
        .iter()
        .map(|&w| {
            q2 * (eta * (t_a * n0 + n_a)
                + eta
                    * eta
                    * (t_a * t_a * n2_spectrum(w)
                        + (8.0 * t_a * n0 * n_a + 2.0 * n_a * n_a) / gamma_a))
        })
        .collect();
    SpectrumSeries::new(omegas.to_vec(), values, None)
}

/// Spectrum at a bound-saturating frequency, split into the coefficient of
/// `n0` and the pure noise term (both per `q^2`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryTerms {
    /// `eta T_a (1 - eta T_a + 8 eta n_a / gamma_a)`.
    pub n0_coefficient: f64,
    /// `eta n_a (1 + 2 eta n_a / gamma_a)`.
    pub noise_term: f64,
}

impl BoundaryTerms {
    pub fn spectrum_per_q2(&self, n0: f64) -> f64 {
        self.n0_coefficient * n0 + self.noise_term
    }
}

/// Terms of the analytic spectrum at a frequency where the source excess
/// saturates `n2 = -n0`.
pub fn boundary_source_spectrum_terms(
    amplifier: &AmplifierModel,
    detector: &DetectorModel,
) -> BoundaryTerms {
    let eta = detector.efficiency;
    let t_a = amplifier.power_transfer;
    let n_a = amplifier.added_noise_flux;
    let gamma_a = amplifier.noise_bandwidth;
    BoundaryTerms {
        n0_coefficient: eta * t_a * (1.0 - eta * t_a + 8.0 * eta * n_a / gamma_a),
        noise_term: eta * n_a * (1.0 + 2.0 * eta * n_a / gamma_a),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CavesBoundaryPoint {
    pub power_transfer: f64,
    /// Hard quantum bound on `4 n_a / gamma_a`.
    pub caves: f64,
    /// Weak bound `(T_a - 1)/2`, clamped at zero where inactive.
    pub weak_clamped: f64,
    /// Unclamped weak bound (negative for attenuators).
    pub weak_raw: f64,
}

/// Minimal noise densities along a gain sweep. The hard bound dominates the
/// weak one everywhere, with equality only at `T_a <= 1`.
pub fn caves_boundary_curve(power_transfers: &[f64]) -> Result<Vec<CavesBoundaryPoint>> {
    let mut out = Vec::with_capacity(power_transfers.len());
    for &t in power_transfers {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("power transfer must be > 0, got {t}")));
        }
        let caves = caves_bound(t);
        let weak_raw = weak_bound(t);
        let point =
            CavesBoundaryPoint { power_transfer: t, caves, weak_raw, weak_clamped: weak_raw.max(0.0) };
        debug_assert!(point.caves >= point.weak_raw);
        out.push(point);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::ExcessCorrelation;

    fn detector(eta: f64) -> DetectorModel {
        DetectorModel::new(eta, 1.0).unwrap()
    }

    #[test]
    fn flat_spectrum_without_amplifier() {
        let n0 = 50.0;
        let det = detector(0.6);
        let s = analytic_spectrum(n0, &|_| 0.0, None, &det, &[1.0, 2.0, 5.0]).unwrap();
        for &v in s.values() {
            assert!((v - 0.6 * n0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_frequencies() {
        let det = detector(1.0);
        assert!(analytic_spectrum(1.0, &|_| 0.0, None, &det, &[0.0]).is_err());
        assert!(analytic_spectrum(1.0, &|_| 0.0, None, &det, &[-1.0]).is_err());
    }

    #[test]
    fn boundary_coefficient_vanishes_at_weak_bound() {
        // eta = 1 and 8 n_a / gamma_a = T_a - 1 kill the n0 coefficient
        let t_a = 4.0;
        let gamma_a = 80.0;
        let n_a = (t_a - 1.0) * gamma_a / 8.0;
        let amp = AmplifierModel::new(t_a, n_a, gamma_a).unwrap();
        let det = detector(1.0);
        let terms = boundary_source_spectrum_terms(&amp, &det);
        assert!(terms.n0_coefficient.abs() < 1e-12);
        assert!((terms.noise_term - n_a * (1.0 + 2.0 * n_a / gamma_a)).abs() < 1e-12);

        // cross-check against the full spectrum with n2 pinned at -n0
        for n0 in [10.0, 1e4] {
            let s = analytic_spectrum(n0, &|_| -n0, Some(&amp), &det, &[3.0]).unwrap();
            assert!(
                (s.values()[0] - terms.spectrum_per_q2(n0)).abs() < 1e-9 * terms.noise_term,
                "n0 = {n0}"
            );
        }
    }

    #[test]
    fn sub_bound_amplifier_goes_negative_with_boundary_source() {
        // noise below the weak bound: spectrum turns negative for large n0
        let t_a = 4.0;
        let gamma_a = 80.0;
        let n_a = 0.5 * (t_a - 1.0) * gamma_a / 8.0;
        let amp = AmplifierModel::new(t_a, n_a, gamma_a).unwrap();
        let det = detector(1.0);
        let n0 = 1e6;
        let s = analytic_spectrum(n0, &|_| -n0, Some(&amp), &det, &[3.0]).unwrap();
        assert!(s.values()[0] < 0.0, "spectrum should demonstrate the inconsistency");
    }

    #[test]
    fn weak_bound_keeps_spectrum_nonnegative() {
        // any depth-admissible source, eta <= 1, amplifier at the weak bound
        let t_a = 3.0;
        let gamma_a = 60.0;
        let n_a = (t_a - 1.0) * gamma_a / 8.0;
        let amp = AmplifierModel::new(t_a, n_a, gamma_a).unwrap();
        for eta in [0.25, 0.5, 1.0] {
            let det = detector(eta);
            for n0 in [0.0, 1.0, 1e3, 1e7] {
                let excess = ExcessCorrelation::boundary_line(n0, 10.0, 1.0).unwrap();
                let omegas: Vec<f64> = (1..200).map(|k| 0.1 * k as f64).collect();
                let s =
                    analytic_spectrum(n0, &|w| excess.spectrum(w), Some(&amp), &det, &omegas).unwrap();
                assert!(s.values().iter().all(|&v| v >= -1e-9 * (1.0 + n0)), "eta={eta} n0={n0}");
            }
        }
    }

    #[test]
    fn caves_curve_values() {
        let pts = caves_boundary_curve(&[0.5, 1.0, 2.0, 3.0]).unwrap();
        let caves: Vec<f64> = pts.iter().map(|p| p.caves).collect();
        let weak: Vec<f64> = pts.iter().map(|p| p.weak_raw).collect();
        assert_eq!(caves, vec![0.0, 0.0, 1.0, 2.0]);
        assert_eq!(weak, vec![-0.25, 0.0, 0.5, 1.0]);
        assert_eq!(pts[0].weak_clamped, 0.0);
        assert!(caves_boundary_curve(&[0.0]).is_err());
    }
}
