//! Causal linear-response kernels and retarded convolution.
//!
//! A kernel is stored for lags `tau = k*dt`, `k >= 0`, and is identically
//! zero at negative lag. Convolution with a signal is the discrete retarded
//! response `out[i] = dt * sum_{k<=i} kernel[k] * in[i-k]`, truncated to the
//! observation window.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::signal::{ComplexEnvelope, RealSignal};

/// Sample values of a response kernel: real for broad-band response, complex
/// for the narrow-band (envelope) response.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSamples {
    BroadBand(Vec<f64>),
    NarrowBand(Vec<Complex64>),
}

/// Causal response kernel sampled at nonnegative lags.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseKernel {
    grid: TimeGrid,
    samples: KernelSamples,
}

impl ResponseKernel {
    pub fn broad_band(grid: TimeGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch("kernel length differs from grid".into()));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, samples: KernelSamples::BroadBand(samples) })
    }

    pub fn narrow_band(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch("kernel length differs from grid".into()));
        }
        if let Some(index) = samples.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, samples: KernelSamples::NarrowBand(samples) })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &KernelSamples {
        &self.samples
    }

    /// Kernel value at lag index `k` (complex view; broad-band kernels have
    /// zero imaginary part). Negative lags are identically zero by
    /// construction and not stored.
    pub fn at(&self, k: usize) -> Complex64 {
        match &self.samples {
            KernelSamples::BroadBand(v) => Complex64::new(v[k], 0.0),
            KernelSamples::NarrowBand(v) => v[k],
        }
    }

    /// Discrete delta kernel `1/dt` at lag `m`, zero elsewhere.
    pub fn delta_at(grid: TimeGrid, m: usize) -> Result<Self> {
        if m >= grid.len() {
            return Err(Error::InvalidParameter("delta lag outside grid".into()));
        }
        let mut samples = vec![0.0; grid.len()];
        samples[m] = 1.0 / grid.dt();
        Self::broad_band(grid, samples)
    }
}

/// Broad-band single-mode retarded response, `G_R(tau) = scale*sin(omega0*tau)`
/// for `tau >= 0`.
pub fn single_mode_retarded_kernel(grid: TimeGrid, omega0: f64, scale: f64) -> Result<ResponseKernel> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!("omega0 must be positive, got {omega0}")));
    }
    let dt = grid.dt();
    let samples = (0..grid.len()).map(|k| scale * (omega0 * dt * k as f64).sin()).collect();
    ResponseKernel::broad_band(grid, samples)
}

/// Narrow-band single-mode retarded response,
/// `Delta_R(tau) = i*scale*exp(-i*detuning*tau)` for `tau >= 0`.
pub fn narrowband_retarded_kernel(grid: TimeGrid, detuning: f64, scale: f64) -> Result<ResponseKernel> {
    let dt = grid.dt();
    let i = Complex64::new(0.0, 1.0);
    let samples = (0..grid.len())
        .map(|k| i * scale * Complex64::new(0.0, -detuning * dt * k as f64).exp())
        .collect();
    ResponseKernel::narrow_band(grid, samples)
}

fn convolve(kernel: &ResponseKernel, input: &[Complex64], grid: &TimeGrid) -> Result<Vec<Complex64>> {
    kernel.grid().check_same_dt(grid)?;
    let dt = grid.dt();
    let klen = kernel.grid().len();
    let out = (0..input.len())
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=i.min(klen - 1) {
                acc += kernel.at(k) * input[i - k];
            }
            acc * dt
        })
        .collect();
    Ok(out)
}

/// Retarded convolution of a real signal with a broad-band kernel.
pub fn convolve_causal(kernel: &ResponseKernel, input: &RealSignal) -> Result<RealSignal> {
    match kernel.samples() {
        KernelSamples::BroadBand(k) => {
            kernel.grid().check_same_dt(input.grid())?;
            let dt = input.grid().dt();
            let x = input.samples();
            let out: Vec<f64> = (0..x.len())
                .map(|i| {
                    let mut acc = 0.0;
                    for (j, kv) in k.iter().take(i + 1).enumerate() {
                        acc += kv * x[i - j];
                    }
                    acc * dt
                })
                .collect();
            RealSignal::new(*input.grid(), out)
        }
        KernelSamples::NarrowBand(_) => Err(Error::InvalidParameter(
            "narrow-band kernel applied to a real signal; convert to an envelope first".into(),
        )),
    }
}

/// Retarded convolution of a complex envelope with a kernel of either kind.
pub fn convolve_causal_envelope(kernel: &ResponseKernel, input: &ComplexEnvelope) -> Result<ComplexEnvelope> {
    let out = convolve(kernel, input.samples(), input.grid())?;
    ComplexEnvelope::new(*input.grid(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, dt: f64) -> TimeGrid {
        TimeGrid::new(0.0, dt, n).unwrap()
    }

    #[test]
    fn identity_kernel_reproduces_input_exactly() {
        // dt a power of two so dt * (1/dt) is exact in binary floating point
        let g = grid(32, 0.25);
        let kernel = ResponseKernel::delta_at(g, 0).unwrap();
        let input = RealSignal::from_fn(g, |t| (1.3 * t).sin() + 0.2).unwrap();
        let out = convolve_causal(&kernel, &input).unwrap();
        assert_eq!(out.samples(), input.samples());
    }

    #[test]
    fn delta_at_lag_shifts_and_zero_pads() {
        let g = grid(16, 0.5);
        let kernel = ResponseKernel::delta_at(g, 3).unwrap();
        let input = RealSignal::from_fn(g, |t| t + 1.0).unwrap();
        let out = convolve_causal(&kernel, &input).unwrap();
        for i in 0..3 {
            assert_eq!(out.samples()[i], 0.0);
        }
        for i in 3..16 {
            assert_eq!(out.samples()[i], input.samples()[i - 3]);
        }
    }

    #[test]
    fn sine_kernel_impulse_response() {
        let g = grid(128, 0.125);
        let omega0 = 2.0;
        let scale = 0.7;
        let kernel = single_mode_retarded_kernel(g, omega0, scale).unwrap();
        let mut impulse = vec![0.0; 128];
        let m = 5;
        impulse[m] = 1.0 / g.dt();
        let input = RealSignal::new(g, impulse).unwrap();
        let out = convolve_causal(&kernel, &input).unwrap();
        for i in 0..128 {
            let expect = if i >= m { scale * (omega0 * g.dt() * (i - m) as f64).sin() } else { 0.0 };
            assert!((out.samples()[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_kernel_values_at_peak_and_node() {
        // omega0 and dt chosen so pi/2 and pi land on grid lags
        let omega0 = PI / 2.0;
        let g = grid(16, 1.0);
        let kernel = single_mode_retarded_kernel(g, omega0, 2.5).unwrap();
        // tau = pi/(2 omega0) = 1.0 -> lag index 1: peak value = scale
        assert!((kernel.at(1).re - 2.5).abs() < 1e-12);
        // omega0 tau = pi -> lag index 2: node
        assert!(kernel.at(2).re.abs() < 1e-12);
        assert!(single_mode_retarded_kernel(g, 0.0, 1.0).is_err());
        assert!(single_mode_retarded_kernel(g, -1.0, 1.0).is_err());
    }

    #[test]
    fn narrowband_kernel_modulus_and_zero_detuning() {
        let g = grid(64, 0.2);
        let k0 = narrowband_retarded_kernel(g, 0.0, 1.5).unwrap();
        for k in 0..64 {
            let v = k0.at(k);
            assert!((v - Complex64::new(0.0, 1.5)).norm() < 1e-12);
        }
        let k1 = narrowband_retarded_kernel(g, 3.0, 1.5).unwrap();
        for k in 0..64 {
            assert!((k1.at(k).norm() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_is_linear() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let g = grid(48, 0.5);
        let kernel = single_mode_retarded_kernel(g, 1.7, 0.9).unwrap();
        let f = RealSignal::new(g, (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let h = RealSignal::new(g, (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let (a, b) = (0.3, -1.1);
        let combo = RealSignal::new(
            g,
            f.samples().iter().zip(h.samples()).map(|(x, y)| a * x + b * y).collect(),
        )
        .unwrap();
        let lhs = convolve_causal(&kernel, &combo).unwrap();
        let cf = convolve_causal(&kernel, &f).unwrap();
        let ch = convolve_causal(&kernel, &h).unwrap();
        for i in 0..48 {
            let rhs = a * cf.samples()[i] + b * ch.samples()[i];
            assert!((lhs.samples()[i] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch_is_error() {
        let g = grid(16, 0.5);
        let other = grid(16, 0.25);
        let kernel = ResponseKernel::delta_at(g, 0).unwrap();
        let input = RealSignal::zeros(other);
        assert!(convolve_causal(&kernel, &input).is_err());
    }
}
