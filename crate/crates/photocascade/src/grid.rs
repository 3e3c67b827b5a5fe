use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid shared by every sampled signal.
///
/// Signals and kernels are sampled at bin centers `t0 + k*dt`. Operations on
/// two signals require the grids to match exactly; silent resampling is never
/// performed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("grid needs at least one bin".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        Ok(Self { t0, dt, n })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time at bin `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    /// Total window length `n*dt`.
    pub fn span(&self) -> f64 {
        self.dt * self.n as f64
    }

    /// Angular DFT frequency of bin `k` for a transform of length `n`,
    /// `2*pi*k/(n*dt)`.
    pub fn dft_omega(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / (self.n as f64 * self.dt)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.time(k))
    }

    pub fn check_same(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Grids agree in bin width only (kernels may be defined on a grid with a
    /// different origin or length than the signal they act on).
    pub fn check_same_dt(&self, other: &TimeGrid) -> Result<()> {
        if self.dt == other.dt {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("dt {} vs {}", self.dt, other.dt)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(TimeGrid::new(0.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, -1.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn times_and_span() {
        let g = TimeGrid::new(1.0, 0.5, 4).unwrap();
        let t: Vec<f64> = g.times().collect();
        assert_eq!(t, vec![1.0, 1.5, 2.0, 2.5]);
        assert_eq!(g.span(), 2.0);
    }

    #[test]
    fn mixed_grid_is_error() {
        let a = TimeGrid::new(0.0, 0.5, 4).unwrap();
        let b = TimeGrid::new(0.0, 0.5, 5).unwrap();
        assert!(a.check_same(&b).is_err());
        assert!(a.check_same_dt(&b).is_ok());
    }
}
