//! CSV emission. First column is time (s) or angular frequency (rad/s);
//! headers carry units; values are written in shortest round-trip form, so
//! identical runs produce byte-identical files.

use crate::cascade::EstimatorReport;
use crate::error::{Error, Result};
use crate::signal::SpectrumSeries;

fn to_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Config(e.to_string()))
}

fn record(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) -> Result<()> {
    w.write_record(fields).map_err(|e| Error::Config(e.to_string()))
}

pub fn timeseries_csv(report: &EstimatorReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    record(
        &mut w,
        &["time_s".into(), "mean_current_charge_per_s".into(), "se_charge_per_s".into()],
    )?;
    for (k, (m, se)) in report.mean_current.iter().zip(&report.mean_current_se).enumerate() {
        record(&mut w, &[report.grid.time(k).to_string(), m.to_string(), se.to_string()])?;
    }
    to_bytes(w)
}

pub fn spectrum_csv(spectrum: &SpectrumSeries, analytic: Option<&SpectrumSeries>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "omega_rad_per_s".to_string(),
        "spectrum_charge2_per_s".to_string(),
        "ci_halfwidth_charge2_per_s".to_string(),
    ];
    if analytic.is_some() {
        header.push("analytic_charge2_per_s".to_string());
    }
    record(&mut w, &header)?;
    for k in 0..spectrum.len() {
        let mut row = vec![
            spectrum.frequencies()[k].to_string(),
            spectrum.values()[k].to_string(),
            spectrum.ci_halfwidth().map(|c| c[k]).unwrap_or(0.0).to_string(),
        ];
        if let Some(a) = analytic {
            row.push(a.values()[k].to_string());
        }
        record(&mut w, &row)?;
    }
    to_bytes(w)
}

pub fn counts_csv(report: &EstimatorReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    record(&mut w, &["total_pulses".into(), "trajectories".into(), "probability".into()])?;
    let total = report.counts.trajectories() as f64;
    for (&n, &c) in report.counts.bins() {
        record(&mut w, &[n.to_string(), c.to_string(), (c as f64 / total).to_string()])?;
    }
    to_bytes(w)
}

pub fn correlation_csv(report: &EstimatorReport) -> Result<Option<Vec<u8>>> {
    let Some(corr) = &report.stationary_correlation else {
        return Ok(None);
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    record(
        &mut w,
        &["lag_s".into(), "correlation_charge2_per_s2".into(), "se_charge2_per_s2".into()],
    )?;
    for (m, (v, se)) in corr.values.iter().zip(&corr.se).enumerate() {
        record(&mut w, &[(corr.dt * m as f64).to_string(), v.to_string(), se.to_string()])?;
    }
    to_bytes(w).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{estimate_moments, EstimatorOptions};
    use crate::devices::PhotocurrentRecord;
    use crate::grid::TimeGrid;

    #[test]
    fn csv_shapes() {
        let grid = TimeGrid::new(0.0, 0.5, 4).unwrap();
        let records: Vec<_> = (0..3)
            .map(|k| PhotocurrentRecord::new(grid, vec![k, 1, 2, 0], 1.0).unwrap())
            .collect();
        let report = estimate_moments(&records, &EstimatorOptions::default()).unwrap();
        let ts = String::from_utf8(timeseries_csv(&report).unwrap()).unwrap();
        assert!(ts.starts_with("time_s,mean_current_charge_per_s,se_charge_per_s\n"));
        assert_eq!(ts.lines().count(), 5);
        let counts = String::from_utf8(counts_csv(&report).unwrap()).unwrap();
        assert!(counts.contains("total_pulses"));
        assert!(correlation_csv(&report).unwrap().is_none());
    }
}
