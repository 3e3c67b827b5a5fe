//! Photocurrent moment formulas.
//!
//! Conditional on the detected flux `w1(t)`, the photocurrent has
//!
//! `mean(t)/q = eta w1(t)`,
//! `corr(t,t')/q^2 = eta w1(t) delta(t-t') + eta^2 w1(t) w1(t')`;
//!
//! unconditionally, for a stationary source of flux `n0` and excess
//! intensity correlation `n2(tau)` behind an amplifier `(T_a, n_a, gamma_a)`,
//!
//! `mean/q = eta (T_a n0 + n_a)`,
//! `corr(tau)/q^2 = eta (T_a n0 + n_a) delta(tau)
//!   + eta^2 { T_a^2 [n0^2 + n2(tau)] + 2 T_a n0 n_a [1 + 4 delta(tau)/gamma_a]
//!   + n_a^2 [1 + 2 delta(tau)/gamma_a] }`,
//!
//! with the finite-bandwidth beat notes of the amplifier noise folded into
//! delta weights (valid on time scales long against `1/gamma_a`). On the
//! grid, `delta(0)` maps to `1/dt`.

use std::sync::Arc;

use crate::devices::{AmplifierModel, DetectorModel, SourceModel};
use crate::error::{Error, Result};
use crate::signal::RealSignal;

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type TwoTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// First and second photocurrent moments, the second split into a smooth
/// part and the weight of its equal-time delta ridge.
#[derive(Clone)]
pub struct MomentSet {
    mean: TimeFn,
    shot_weight: TimeFn,
    smooth: TwoTimeFn,
}

impl MomentSet {
    pub fn mean_at(&self, t: f64) -> f64 {
        (self.mean)(t)
    }

    /// Coefficient of `delta(t - t')` in the correlation, units current^2 * time.
    pub fn shot_weight_at(&self, t: f64) -> f64 {
        (self.shot_weight)(t)
    }

    /// Smooth (delta-free) part of `<J(t) J(t')>`.
    pub fn smooth_at(&self, t: f64, t_prime: f64) -> f64 {
        (self.smooth)(t, t_prime)
    }

    /// Full second moment discretized on a grid of bin width `dt`: the delta
    /// ridge contributes `shot_weight/dt` on the diagonal.
    pub fn correlation_on_grid(&self, t: f64, t_prime: f64, dt: f64) -> f64 {
        let smooth = self.smooth_at(t, t_prime);
        if (t - t_prime).abs() < 0.5 * dt {
            smooth + self.shot_weight_at(t) / dt
        } else {
            smooth
        }
    }
}

/// Moments of the photocurrent conditional on a given detected flux.
pub fn conditional_moments(flux: &RealSignal, detector: &DetectorModel) -> Result<MomentSet> {
    detector.validate()?;
    if let Some(index) = flux.samples().iter().position(|&w| w < 0.0) {
        return Err(Error::NegativeFlux { index, value: flux.samples()[index] });
    }
    let grid = *flux.grid();
    let samples: Arc<[f64]> = flux.samples().to_vec().into();
    let lookup = move |t: f64| -> f64 {
        let k = ((t - grid.t0()) / grid.dt()).round();
        let k = (k.max(0.0) as usize).min(grid.len() - 1);
        samples[k]
    };
    let eta = detector.efficiency;
    let q = detector.pulse_charge;
    let mean_lookup = lookup.clone();
    let shot_lookup = lookup.clone();
    Ok(MomentSet {
        mean: Arc::new(move |t| q * eta * mean_lookup(t)),
        shot_weight: Arc::new(move |t| q * q * eta * shot_lookup(t)),
        smooth: Arc::new(move |t, tp| q * q * eta * eta * lookup(t) * lookup(tp)),
    })
}

/// Unconditional stationary moments of the full chain.
///
/// The source must be stationary: a constant-flux coherent source, thermal
/// light, or a moment-specified source.
pub fn unconditional_moments(
    source: &SourceModel,
    amplifier: Option<&AmplifierModel>,
    detector: &DetectorModel,
) -> Result<MomentSet> {
    source.validate()?;
    detector.validate()?;
    if let Some(a) = amplifier {
        a.validate()?;
    }
    let n0 = source
        .stationary_flux()
        .ok_or_else(|| Error::InvalidParameter("source is not stationary; no moment data".into()))?;
    let excess = source
        .excess_correlation()
        .ok_or_else(|| Error::InvalidParameter("source provides no intensity correlation".into()))?;
    let (t_a, n_a, gamma_a) = match amplifier {
        Some(a) => (a.power_transfer, a.added_noise_flux, a.noise_bandwidth),
        None => (1.0, 0.0, f64::INFINITY),
    };
    let eta = detector.efficiency;
    let q = detector.pulse_charge;

    let mean_flux = eta * (t_a * n0 + n_a);
    let shot = q * q
        * (mean_flux + eta * eta * (8.0 * t_a * n0 * n_a + 2.0 * n_a * n_a) / gamma_a);
    let smooth_const = eta * eta * (2.0 * t_a * n0 * n_a + n_a * n_a + t_a * t_a * n0 * n0);
    Ok(MomentSet {
        mean: Arc::new(move |_| q * mean_flux),
        shot_weight: Arc::new(move |_| shot),
        smooth: Arc::new(move |t, tp| {
            q * q * (smooth_const + eta * eta * t_a * t_a * excess.correlation(t - tp))
        }),
    })
}
