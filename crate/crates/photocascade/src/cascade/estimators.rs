//! Ensemble estimators: per-bin mean current, two-time correlations,
//! total-count statistics, and the fluctuation spectrum.
//!
//! Standard errors come from the trajectory-to-trajectory scatter of
//! per-trajectory statistics (delete-one jackknife, which for these sample
//! means reduces to the usual standard error of the mean).

use std::collections::BTreeMap;

use crate::devices::PhotocurrentRecord;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::periodogram::PeriodogramAccumulator;
use crate::signal::{RealSignal, SpectrumSeries};

/// Which second-moment estimate to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationMode {
    #[default]
    None,
    /// Time-origin averaged `<J(t) J(t+tau)>` over the analysis window;
    /// valid for stationary scenarios.
    Stationary { max_lag_bins: usize },
    /// Full two-time matrix on a decimated grid, for pulsed sources.
    TwoTime { stride: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct EstimatorOptions {
    /// First bin of the analysis window (transient discard).
    pub analysis_start_bin: usize,
    pub correlation: CorrelationMode,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self { analysis_start_bin: 0, correlation: CorrelationMode::None }
    }
}

/// Raw stationary second moment `<J(t) J(t+tau)>` per lag.
#[derive(Debug, Clone)]
pub struct CorrelationEstimate {
    pub dt: f64,
    pub values: Vec<f64>,
    pub se: Vec<f64>,
}

/// Two-time second moment on a decimated grid.
#[derive(Debug, Clone)]
pub struct TwoTimeEstimate {
    pub times: Vec<f64>,
    /// Row-major `values[a * times.len() + b] = <J(t_a) J(t_b)>`.
    pub values: Vec<f64>,
    pub se: Vec<f64>,
}

/// Histogram of total pulse counts per trajectory.
#[derive(Debug, Clone, Default)]
pub struct CountHistogram {
    bins: BTreeMap<u64, u64>,
    trajectories: u64,
}

impl CountHistogram {
    pub fn add(&mut self, total: u64) {
        *self.bins.entry(total).or_insert(0) += 1;
        self.trajectories += 1;
    }

    pub fn merge(&mut self, other: &CountHistogram) {
        for (&n, &c) in &other.bins {
            *self.bins.entry(n).or_insert(0) += c;
        }
        self.trajectories += other.trajectories;
    }

    pub fn bins(&self) -> &BTreeMap<u64, u64> {
        &self.bins
    }

    pub fn trajectories(&self) -> u64 {
        self.trajectories
    }

    pub fn mean(&self) -> f64 {
        if self.trajectories == 0 {
            return 0.0;
        }
        self.bins.iter().map(|(&n, &c)| n as f64 * c as f64).sum::<f64>() / self.trajectories as f64
    }

    /// Expanded per-trajectory totals, ordered; for KS-style comparisons.
    pub fn totals(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.trajectories as usize);
        for (&n, &c) in &self.bins {
            out.extend(std::iter::repeat(n).take(c as usize));
        }
        out
    }
}

/// Streaming moment accumulator; merge order must be fixed by the caller for
/// bit-reproducible output.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    grid: TimeGrid,
    opts: EstimatorOptions,
    trajectories: u64,
    mean_sum: Vec<f64>,
    mean_sum_sq: Vec<f64>,
    avg_sum: f64,
    avg_sum_sq: f64,
    corr_sum: Vec<f64>,
    corr_sum_sq: Vec<f64>,
    two_time_sum: Vec<f64>,
    two_time_sum_sq: Vec<f64>,
    two_time_len: usize,
    counts: CountHistogram,
}

impl MomentAccumulator {
    pub fn new(grid: TimeGrid, opts: EstimatorOptions) -> Result<Self> {
        let n = grid.len();
        if opts.analysis_start_bin >= n {
            return Err(Error::InvalidParameter("analysis window is empty".into()));
        }
        let window = n - opts.analysis_start_bin;
        let (corr_len, two_time_len) = match opts.correlation {
            CorrelationMode::None => (0, 0),
            CorrelationMode::Stationary { max_lag_bins } => {
                if max_lag_bins + 1 >= window {
                    return Err(Error::InvalidParameter(
                        "stationary lags exceed the analysis window".into(),
                    ));
                }
                (max_lag_bins + 1, 0)
            }
            CorrelationMode::TwoTime { stride } => {
                if stride == 0 {
                    return Err(Error::InvalidParameter("stride must be positive".into()));
                }
                (0, window.div_ceil(stride))
            }
        };
        Ok(Self {
            grid,
            opts,
            trajectories: 0,
            mean_sum: vec![0.0; n],
            mean_sum_sq: vec![0.0; n],
            avg_sum: 0.0,
            avg_sum_sq: 0.0,
            corr_sum: vec![0.0; corr_len],
            corr_sum_sq: vec![0.0; corr_len],
            two_time_sum: vec![0.0; two_time_len * two_time_len],
            two_time_sum_sq: vec![0.0; two_time_len * two_time_len],
            two_time_len,
            counts: CountHistogram::default(),
        })
    }

    pub fn add_record(&mut self, record: &PhotocurrentRecord) -> Result<()> {
        self.grid.check_same(record.grid())?;
        let current = record.current();
        let j = current.samples();
        let start = self.opts.analysis_start_bin;
        for (k, &v) in j.iter().enumerate() {
            self.mean_sum[k] += v;
            self.mean_sum_sq[k] += v * v;
        }
        let window = &j[start..];
        let avg = window.iter().sum::<f64>() / window.len() as f64;
        self.avg_sum += avg;
        self.avg_sum_sq += avg * avg;
        match self.opts.correlation {
            CorrelationMode::None => {}
            CorrelationMode::Stationary { .. } => {
                for m in 0..self.corr_sum.len() {
                    let pairs = window.len() - m;
                    let mut acc = 0.0;
                    for a in 0..pairs {
                        acc += window[a] * window[a + m];
                    }
                    let c = acc / pairs as f64;
                    self.corr_sum[m] += c;
                    self.corr_sum_sq[m] += c * c;
                }
            }
            CorrelationMode::TwoTime { stride } => {
                let m = self.two_time_len;
                for a in 0..m {
                    let ja = window[a * stride];
                    for b in 0..m {
                        let v = ja * window[b * stride];
                        self.two_time_sum[a * m + b] += v;
                        self.two_time_sum_sq[a * m + b] += v * v;
                    }
                }
            }
        }
        self.counts.add(record.total_counts());
        self.trajectories += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        assert_eq!(self.grid, other.grid);
        for (a, b) in self.mean_sum.iter_mut().zip(&other.mean_sum) {
            *a += b;
        }
        for (a, b) in self.mean_sum_sq.iter_mut().zip(&other.mean_sum_sq) {
            *a += b;
        }
        self.avg_sum += other.avg_sum;
        self.avg_sum_sq += other.avg_sum_sq;
        for (a, b) in self.corr_sum.iter_mut().zip(&other.corr_sum) {
            *a += b;
        }
        for (a, b) in self.corr_sum_sq.iter_mut().zip(&other.corr_sum_sq) {
            *a += b;
        }
        for (a, b) in self.two_time_sum.iter_mut().zip(&other.two_time_sum) {
            *a += b;
        }
        for (a, b) in self.two_time_sum_sq.iter_mut().zip(&other.two_time_sum_sq) {
            *a += b;
        }
        self.counts.merge(&other.counts);
        self.trajectories += other.trajectories;
    }

    pub fn finish(&self) -> Result<EstimatorReport> {
        if self.trajectories < 2 {
            return Err(Error::EmptyEnsemble(format!(
                "need at least 2 trajectories, got {}",
                self.trajectories
            )));
        }
        let k = self.trajectories as f64;
        let mean_std = |sum: f64, sum_sq: f64| -> (f64, f64) {
            let mean = sum / k;
            let var = ((sum_sq / k - mean * mean).max(0.0)) * k / (k - 1.0);
            (mean, (var / k).sqrt())
        };
        let mut mean_current = Vec::with_capacity(self.mean_sum.len());
        let mut mean_current_se = Vec::with_capacity(self.mean_sum.len());
        for (s, sq) in self.mean_sum.iter().zip(&self.mean_sum_sq) {
            let (m, se) = mean_std(*s, *sq);
            mean_current.push(m);
            mean_current_se.push(se);
        }
        let (global_mean_current, global_mean_current_se) = mean_std(self.avg_sum, self.avg_sum_sq);
        let stationary_correlation = match self.opts.correlation {
            CorrelationMode::Stationary { .. } => {
                let mut values = Vec::with_capacity(self.corr_sum.len());
                let mut se = Vec::with_capacity(self.corr_sum.len());
                for (s, sq) in self.corr_sum.iter().zip(&self.corr_sum_sq) {
                    let (m, e) = mean_std(*s, *sq);
                    values.push(m);
                    se.push(e);
                }
                Some(CorrelationEstimate { dt: self.grid.dt(), values, se })
            }
            _ => None,
        };
        let two_time = match self.opts.correlation {
            CorrelationMode::TwoTime { stride } => {
                let m = self.two_time_len;
                let times = (0..m)
                    .map(|a| self.grid.time(self.opts.analysis_start_bin + a * stride))
                    .collect();
                let mut values = Vec::with_capacity(m * m);
                let mut se = Vec::with_capacity(m * m);
                for (s, sq) in self.two_time_sum.iter().zip(&self.two_time_sum_sq) {
                    let (v, e) = mean_std(*s, *sq);
                    values.push(v);
                    se.push(e);
                }
                Some(TwoTimeEstimate { times, values, se })
            }
            _ => None,
        };
        Ok(EstimatorReport {
            grid: self.grid,
            analysis_start_bin: self.opts.analysis_start_bin,
            trajectories: self.trajectories as usize,
            mean_current,
            mean_current_se,
            global_mean_current,
            global_mean_current_se,
            stationary_correlation,
            two_time,
            counts: self.counts.clone(),
        })
    }
}

/// Ensemble moment and count statistics.
#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub grid: TimeGrid,
    pub analysis_start_bin: usize,
    pub trajectories: usize,
    pub mean_current: Vec<f64>,
    pub mean_current_se: Vec<f64>,
    /// Time-averaged mean current over the analysis window.
    pub global_mean_current: f64,
    pub global_mean_current_se: f64,
    pub stationary_correlation: Option<CorrelationEstimate>,
    pub two_time: Option<TwoTimeEstimate>,
    pub counts: CountHistogram,
}

/// Trajectories per accumulation block; shared with the streaming pipeline
/// so both paths produce bit-identical statistics.
pub(crate) const ACCUMULATION_BLOCK: usize = 64;

/// Unbiased ensemble moments of a set of records.
pub fn estimate_moments(
    records: &[PhotocurrentRecord],
    opts: &EstimatorOptions,
) -> Result<EstimatorReport> {
    let first = records
        .first()
        .ok_or_else(|| Error::EmptyEnsemble("no records".into()))?;
    let mut acc: Option<MomentAccumulator> = None;
    for chunk in records.chunks(ACCUMULATION_BLOCK) {
        let mut block = MomentAccumulator::new(*first.grid(), *opts)?;
        for r in chunk {
            block.add_record(r)?;
        }
        match acc.as_mut() {
            None => acc = Some(block),
            Some(a) => a.merge(&block),
        }
    }
    acc.expect("at least one record").finish()
}

/// Averaged-segment spectrum of the photocurrent fluctuations over the
/// analysis window. Each record must hold at least four segments.
pub fn estimate_spectrum(
    records: &[PhotocurrentRecord],
    segment_bins: usize,
    analysis_start_bin: usize,
) -> Result<SpectrumSeries> {
    let first = records
        .first()
        .ok_or_else(|| Error::EmptyEnsemble("no records".into()))?;
    let window = first.grid().len().saturating_sub(analysis_start_bin);
    if window < 4 * segment_bins {
        return Err(Error::RecordTooShort(format!(
            "analysis window of {window} bins holds fewer than 4 segments of {segment_bins}"
        )));
    }
    let mut acc: Option<PeriodogramAccumulator> = None;
    for chunk in records.chunks(ACCUMULATION_BLOCK) {
        let mut block = PeriodogramAccumulator::new(segment_bins, first.grid().dt())?;
        for r in chunk {
            first.grid().check_same(r.grid())?;
            block.add_record(&analysis_window(r, analysis_start_bin))?;
        }
        match acc.as_mut() {
            None => acc = Some(block),
            Some(a) => a.merge(&block),
        }
    }
    acc.expect("at least one record").finish()
}

pub(crate) fn analysis_window(record: &PhotocurrentRecord, start: usize) -> RealSignal {
    let current = record.current();
    let g = record.grid();
    let sub = TimeGrid::new(g.time(start), g.dt(), g.len() - start).expect("valid sub-grid");
    RealSignal::new(sub, current.samples()[start..].to_vec()).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(counts: Vec<u32>) -> PhotocurrentRecord {
        let grid = TimeGrid::new(0.0, 0.5, counts.len()).unwrap();
        PhotocurrentRecord::new(grid, counts, 1.0).unwrap()
    }

    #[test]
    fn deterministic_records_have_zero_se() {
        let records: Vec<_> = (0..4).map(|_| record(vec![1, 2, 3, 4, 5, 6, 7, 8])).collect();
        let report = estimate_moments(
            &records,
            &EstimatorOptions {
                analysis_start_bin: 0,
                correlation: CorrelationMode::Stationary { max_lag_bins: 3 },
            },
        )
        .unwrap();
        assert!(report.mean_current_se.iter().all(|&s| s == 0.0));
        assert_eq!(report.global_mean_current_se, 0.0);
        let corr = report.stationary_correlation.unwrap();
        assert!(corr.se.iter().all(|&s| s == 0.0));
        assert_eq!(report.counts.mean(), 36.0);
    }

    #[test]
    fn single_record_is_not_an_ensemble() {
        let records = vec![record(vec![1, 1, 1, 1])];
        assert!(matches!(
            estimate_moments(&records, &EstimatorOptions::default()),
            Err(Error::EmptyEnsemble(_))
        ));
    }

    #[test]
    fn iid_poisson_bins_correlation() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Poisson};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(88);
        let mu_counts = 2.0; // per bin
        let dt = 0.5;
        let n = 256;
        let grid = TimeGrid::new(0.0, dt, n).unwrap();
        let pois = Poisson::new(mu_counts).unwrap();
        let records: Vec<_> = (0..2000)
            .map(|_| {
                let counts: Vec<u32> = (0..n).map(|_| pois.sample(&mut rng) as u32).collect();
                PhotocurrentRecord::new(grid, counts, 1.0).unwrap()
            })
            .collect();
        let report = estimate_moments(
            &records,
            &EstimatorOptions {
                analysis_start_bin: 0,
                correlation: CorrelationMode::Stationary { max_lag_bins: 4 },
            },
        )
        .unwrap();
        let mu = mu_counts / dt; // mean current with q = 1
        let corr = report.stationary_correlation.unwrap();
        // off-diagonal lags: product of independent means
        for m in 1..=4 {
            let expect = mu * mu;
            assert!(
                (corr.values[m] - expect).abs() < 4.0 * corr.se[m],
                "lag {m}: {} vs {expect} (se {})",
                corr.values[m],
                corr.se[m]
            );
        }
        // equal-time: second moment of counts / dt^2 = (mu_counts + mu_counts^2)/dt^2
        let expect0 = (mu_counts + mu_counts * mu_counts) / (dt * dt);
        assert!((corr.values[0] - expect0).abs() < 4.0 * corr.se[0]);
    }

    #[test]
    fn doubling_trajectories_shrinks_se() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Poisson};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let grid = TimeGrid::new(0.0, 0.25, 64).unwrap();
        let pois = Poisson::new(1.5).unwrap();
        let mut make = |count: usize| -> Vec<PhotocurrentRecord> {
            (0..count)
                .map(|_| {
                    let counts: Vec<u32> = (0..64).map(|_| pois.sample(&mut rng) as u32).collect();
                    PhotocurrentRecord::new(grid, counts, 1.0).unwrap()
                })
                .collect()
        };
        let small = estimate_moments(&make(2000), &EstimatorOptions::default()).unwrap();
        let large = estimate_moments(&make(4000), &EstimatorOptions::default()).unwrap();
        let ratio = small.global_mean_current_se / large.global_mean_current_se;
        assert!((ratio - 2f64.sqrt()).abs() < 0.2 * 2f64.sqrt(), "ratio {ratio}");
    }

    #[test]
    fn two_time_matrix_shape() {
        let records: Vec<_> = (0..8).map(|_| record(vec![2; 16])).collect();
        let report = estimate_moments(
            &records,
            &EstimatorOptions {
                analysis_start_bin: 0,
                correlation: CorrelationMode::TwoTime { stride: 4 },
            },
        )
        .unwrap();
        let tt = report.two_time.unwrap();
        assert_eq!(tt.times.len(), 4);
        assert_eq!(tt.values.len(), 16);
        // constant records: every entry is (2/0.5)^2 = 16
        assert!(tt.values.iter().all(|&v| (v - 16.0).abs() < 1e-12));
    }

    #[test]
    fn spectrum_needs_four_segments() {
        let records: Vec<_> = (0..2).map(|_| record(vec![1; 64])).collect();
        assert!(estimate_spectrum(&records, 32, 0).is_err());
        assert!(estimate_spectrum(&records, 16, 0).is_ok());
    }
}
