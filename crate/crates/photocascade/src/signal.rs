//! Sampled time-domain signals and the frequency-part splitting.
//!
//! A real broad-band signal `f(t)` decomposes into frequency-positive and
//! frequency-negative parts: the positive part collects the `exp(-i w t)`
//! components with `w > 0`, the negative part the `exp(+i w t)` ones, and for
//! a real signal the two are complex conjugates. On a finite grid the split
//! is performed on the DFT components; the DC bin (and, for even lengths, the
//! Nyquist bin, which represents both `+w` and `-w` equally) is shared
//! half/half between the parts so that reconstruction and the conjugation
//! symmetry both hold exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::TimeGrid;

/// Real-valued sampled signal (photon flux, photocurrent, broad-band field).
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    grid: TimeGrid,
    samples: Vec<f64>,
}

impl RealSignal {
    pub fn new(grid: TimeGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a {}-bin grid",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { samples: vec![0.0; grid.len()], grid }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.times().map(&f).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.samples.len() as f64
    }
}

/// Complex-valued sampled signal (slowly varying optical envelope).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a {}-bin grid",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { samples: vec![Complex64::new(0.0, 0.0); grid.len()], grid }
    }

    pub fn from_real(signal: &RealSignal) -> Self {
        Self {
            grid: *signal.grid(),
            samples: signal.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Instantaneous intensity `|E(t)|^2` (photon flux when the envelope is
    /// in photon-flux units).
    pub fn intensity(&self) -> RealSignal {
        RealSignal {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|v| v.conj()).collect() }
    }
}

/// One-sided spectrum sampled on strictly increasing angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    frequencies: Vec<f64>,
    values: Vec<f64>,
    ci_halfwidth: Option<Vec<f64>>,
}

impl SpectrumSeries {
    pub fn new(frequencies: Vec<f64>, values: Vec<f64>, ci_halfwidth: Option<Vec<f64>>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::InvalidParameter("frequency/value length mismatch".into()));
        }
        if let Some(ci) = &ci_halfwidth {
            if ci.len() != values.len() {
                return Err(Error::InvalidParameter("ci length mismatch".into()));
            }
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("frequencies must be strictly increasing".into()));
        }
        Ok(Self { frequencies, values, ci_halfwidth })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ci_halfwidth(&self) -> Option<&[f64]> {
        self.ci_halfwidth.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the grid frequency closest to `omega`.
    pub fn value_near(&self, omega: f64) -> (f64, f64, Option<f64>) {
        let k = self
            .frequencies
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - omega).abs().partial_cmp(&(b.1 - omega).abs()).unwrap())
            .map(|(k, _)| k)
            .expect("non-empty spectrum");
        (self.frequencies[k], self.values[k], self.ci_halfwidth.as_ref().map(|c| c[k]))
    }
}

/// Splits a signal into its frequency-positive and frequency-negative parts.
///
/// The positive part holds the `exp(-i w t)` components with `w > 0`; the DC
/// and (even length) Nyquist bins are shared half/half. The parts sum back to
/// the input, and for real input the negative part is the complex conjugate
/// of the positive part.
pub fn split_frequency(envelope: &ComplexEnvelope) -> (ComplexEnvelope, ComplexEnvelope) {
    let n = envelope.grid.len();
    let mut spec: Vec<Complex64> = envelope.samples.clone();
    fft::forward(&mut spec);

    // DFT index k contributes exp(+2 pi i j k / n) on inversion, i.e. physics
    // frequency -w_k; indices above n/2 alias to +w. Build the two halves.
    let mut pos = vec![Complex64::new(0.0, 0.0); n];
    let mut neg = vec![Complex64::new(0.0, 0.0); n];
    let half = Complex64::new(0.5, 0.0);
    for k in 0..n {
        let shared = k == 0 || (n % 2 == 0 && k == n / 2);
        if shared {
            pos[k] = spec[k] * half;
            neg[k] = spec[k] * half;
        } else if 2 * k < n {
            neg[k] = spec[k];
        } else {
            pos[k] = spec[k];
        }
    }
    let scale = 1.0 / n as f64;
    fft::inverse(&mut pos);
    fft::inverse(&mut neg);
    for v in pos.iter_mut().chain(neg.iter_mut()) {
        *v *= scale;
    }
    (
        ComplexEnvelope { grid: envelope.grid, samples: pos },
        ComplexEnvelope { grid: envelope.grid, samples: neg },
    )
}

/// Frequency-part split of a real signal.
pub fn split_frequency_real(signal: &RealSignal) -> (ComplexEnvelope, ComplexEnvelope) {
    split_frequency(&ComplexEnvelope::from_real(signal))
}
