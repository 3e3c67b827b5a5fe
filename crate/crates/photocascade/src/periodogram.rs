//! Segment-averaged periodogram estimator.
//!
//! Records are mean-subtracted, cut into non-overlapping rectangular segments
//! of `segment_bins` samples, and the one-sided periodogram
//! `P(w_k) = dt * |X_k|^2 / M` is averaged over every segment of every
//! record. With this normalization white noise of per-bin variance `s^2`
//! estimates a flat level `s^2 * dt`, the two-sided spectral density of the
//! sampled process. Frequencies start at `2*pi/(M*dt)`; the DC bin, which the
//! mean subtraction zeroes, is not reported.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::{RealSignal, SpectrumSeries};

/// Streaming accumulator so large ensembles can be processed without keeping
/// per-segment spectra around. Accumulation order does not affect the result
/// beyond floating-point association, so callers that need bit-for-bit
/// reproducibility feed segments in a fixed order.
#[derive(Debug, Clone)]
pub struct PeriodogramAccumulator {
    segment_bins: usize,
    dt: f64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    segments: u64,
}

impl PeriodogramAccumulator {
    pub fn new(segment_bins: usize, dt: f64) -> Result<Self> {
        if segment_bins < 2 {
            return Err(Error::InvalidParameter("segment must span at least 2 bins".into()));
        }
        let half = segment_bins / 2;
        Ok(Self { segment_bins, dt, sum: vec![0.0; half], sum_sq: vec![0.0; half], segments: 0 })
    }

    pub fn segment_bins(&self) -> usize {
        self.segment_bins
    }

    pub fn segments(&self) -> u64 {
        self.segments
    }

    /// Adds every complete segment of one record. The record mean is removed
    /// before segmenting.
    pub fn add_record(&mut self, record: &RealSignal) -> Result<()> {
        if record.grid().dt() != self.dt {
            return Err(Error::GridMismatch("record dt differs from accumulator".into()));
        }
        if record.grid().len() < self.segment_bins {
            return Err(Error::RecordTooShort(format!(
                "{} bins < segment of {}",
                record.grid().len(),
                self.segment_bins
            )));
        }
        let mean = record.mean();
        let m = self.segment_bins;
        let norm = self.dt / m as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for seg in record.samples().chunks_exact(m) {
            for (b, &x) in buf.iter_mut().zip(seg) {
                *b = Complex64::new(x - mean, 0.0);
            }
            fft::forward(&mut buf);
            for k in 0..m / 2 {
                let p = norm * buf[k + 1].norm_sqr();
                self.sum[k] += p;
                self.sum_sq[k] += p * p;
            }
            self.segments += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &PeriodogramAccumulator) {
        assert_eq!(self.segment_bins, other.segment_bins);
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self.segments += other.segments;
    }

    /// Mean spectrum with per-point standard error of the segment mean.
    pub fn finish(&self) -> Result<SpectrumSeries> {
        if self.segments == 0 {
            return Err(Error::EmptyEnsemble("no segments accumulated".into()));
        }
        let m = self.segment_bins;
        let count = self.segments as f64;
        let freqs: Vec<f64> = (0..m / 2)
            .map(|k| 2.0 * std::f64::consts::PI * (k + 1) as f64 / (m as f64 * self.dt))
            .collect();
        let values: Vec<f64> = self.sum.iter().map(|s| s / count).collect();
        let ci = if self.segments > 1 {
            Some(
                self.sum_sq
                    .iter()
                    .zip(&values)
                    .map(|(sq, mean)| {
                        let var = (sq / count - mean * mean).max(0.0) * count / (count - 1.0);
                        (var / count).sqrt()
                    })
                    .collect(),
            )
        } else {
            None
        };
        SpectrumSeries::new(freqs, values, ci)
    }
}

/// Averaged-segment periodogram of a set of records.
pub fn periodogram(records: &[RealSignal], segment_bins: usize) -> Result<SpectrumSeries> {
    let first = records.first().ok_or_else(|| Error::EmptyEnsemble("no records".into()))?;
    let mut acc = PeriodogramAccumulator::new(segment_bins, first.grid().dt())?;
    for r in records {
        first.grid().check_same(r.grid())?;
        acc.add_record(r)?;
    }
    acc.finish()
}
