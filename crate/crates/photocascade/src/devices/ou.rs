use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::grid::TimeGrid;
use crate::signal::ComplexEnvelope;

/// Circularly symmetric complex Ornstein-Uhlenbeck process by exact
/// discretization, started from its stationary law:
///
/// `<E*(t) E(t')> = variance * exp(-(gamma/2) |t-t'|)`, `<E E> = 0`.
///
/// The update `E_{k+1} = rho E_k + sqrt(variance (1-rho^2)) xi_k` with
/// `rho = exp(-(gamma/2) dt)` reproduces the exponential correlation exactly
/// at the grid points for any `dt`.
pub fn sample_stationary_complex_ou(
    grid: TimeGrid,
    variance: f64,
    gamma: f64,
    rng: &mut impl Rng,
) -> ComplexEnvelope {
    let n = grid.len();
    let mut samples = Vec::with_capacity(n);
    if variance == 0.0 {
        return ComplexEnvelope::zeros(grid);
    }
    let rho = (-0.5 * gamma * grid.dt()).exp();
    let step_sd = (variance * (1.0 - rho * rho) / 2.0).sqrt();
    let init_sd = (variance / 2.0).sqrt();
    let mut value = Complex64::new(
        init_sd * rng.sample::<f64, _>(StandardNormal),
        init_sd * rng.sample::<f64, _>(StandardNormal),
    );
    samples.push(value);
    for _ in 1..n {
        let kick = Complex64::new(
            step_sd * rng.sample::<f64, _>(StandardNormal),
            step_sd * rng.sample::<f64, _>(StandardNormal),
        );
        value = rho * value + kick;
        samples.push(value);
    }
    ComplexEnvelope::new(grid, samples).expect("finite by construction")
}
