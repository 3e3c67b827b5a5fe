//! Statistical end-to-end checks of the simulated chain against the
//! closed-form oracles.

use photocascade::analytics::{
    ks_distance_counts, ks_two_sample_critical_value, photocount_distribution,
    unconditional_moments, IntensityLaw,
};
use photocascade::cascade::{
    run_chain, run_pipeline, CorrelationMode, ExecutionPlan, PipelineOptions, Scenario,
};
use photocascade::devices::{
    amplify, sample_source, AmplifierModel, DetectorModel, SourceModel,
};
use photocascade::rng::{SeedSplitter, StreamRole};
use photocascade::TimeGrid;

fn scenario(
    source: SourceModel,
    amplifier: Option<AmplifierModel>,
    detector: DetectorModel,
    grid: TimeGrid,
    trajectories: usize,
    seed: u64,
) -> Scenario {
    Scenario {
        source,
        amplifier,
        detector,
        grid,
        trajectories,
        seed,
        plan: ExecutionPlan::Chain,
        bandwidth_ratio: 10.0,
        discard_transient: true,
        retain_envelopes: false,
        allow_unphysical: false,
    }
}

/// Coherent constant flux, transparent chain: total counts are exactly
/// Poisson(eta w T).
#[test]
fn coherent_totals_are_poisson() {
    use statrs::distribution::{DiscreteCDF, Poisson};
    let grid = TimeGrid::new(0.0, 0.004, 256).unwrap();
    let w = 600.0;
    let eta = 0.7;
    let s = scenario(
        SourceModel::coherent_constant(w),
        None,
        DetectorModel::new(eta, 1.0).unwrap(),
        grid,
        50_000,
        0x90D1,
    );
    let out = run_pipeline(&s, &PipelineOptions::default()).unwrap();
    let mean = eta * w * grid.span();
    let reference = Poisson::new(mean).unwrap();
    let totals = out.report.counts.totals();
    // KS against the exact CDF
    let mut sorted = totals.clone();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut idx = 0usize;
    for value in 0..=*sorted.last().unwrap() {
        while idx < sorted.len() && sorted[idx] <= value {
            idx += 1;
        }
        d = d.max((idx as f64 / n - reference.cdf(value)).abs());
    }
    let critical = 1.6276 / n.sqrt(); // alpha = 0.01
    assert!(d < critical, "KS {d:.5} vs critical {critical:.5}");
}

/// The composite-source and composite-detector execution plans draw from
/// different substreams but must produce the same count law.
#[test]
fn execution_plans_agree_in_distribution() {
    let grid = TimeGrid::new(0.0, 0.002, 128).unwrap();
    let amplifier = AmplifierModel::new(2.0, 12.5, 50.0).unwrap(); // at the hard bound
    let detector = DetectorModel::new(0.8, 1.0).unwrap();
    let source = SourceModel::GaussianThermal { mean_flux: 400.0, coherence_rate: 5.0 };
    let base = scenario(source, Some(amplifier), detector, grid, 100_000, 0x90D2);

    let mut cs = base.clone();
    cs.plan = ExecutionPlan::CompositeSource;
    let mut cd = base;
    cd.plan = ExecutionPlan::CompositeDetector;

    let a = run_pipeline(&cs, &PipelineOptions::default()).unwrap();
    let b = run_pipeline(&cd, &PipelineOptions::default()).unwrap();
    let ta = a.report.counts.totals();
    let tb = b.report.counts.totals();

    // two-sample KS
    let mut xa = ta.clone();
    let mut xb = tb.clone();
    xa.sort_unstable();
    xb.sort_unstable();
    let hi = *xa.last().unwrap().max(xb.last().unwrap());
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d = 0.0f64;
    for value in 0..=hi {
        while ia < xa.len() && xa[ia] <= value {
            ia += 1;
        }
        while ib < xb.len() && xb[ib] <= value {
            ib += 1;
        }
        d = d.max((ia as f64 / xa.len() as f64 - ib as f64 / xb.len() as f64).abs());
    }
    let critical = ks_two_sample_critical_value(0.01, xa.len(), xb.len());
    assert!(d < critical, "plan KS distance {d:.5} vs critical {critical:.5}");
}

/// Full printed moment formulas against simulation at gain 4 with the noise
/// density pinned at the hard bound: mean, low-frequency spectrum, and the
/// smooth correlation at lags long against 1/gamma_a.
#[test]
fn unconditional_moments_match_simulation_at_the_bound() {
    let t_a = 4.0;
    let gamma_a = 50.0;
    let n_a = 3.0 * gamma_a / 4.0; // 4 n_a / gamma_a = T_a - 1 = 3
    let n0 = 300.0;
    let amplifier = AmplifierModel::new(t_a, n_a, gamma_a).unwrap();
    let detector = DetectorModel::new(1.0, 1.0).unwrap();
    let source = SourceModel::coherent_constant(n0);
    // 50 transient bins (5/gamma_a) plus four 4096-bin segments
    let grid = TimeGrid::new(0.0, 0.002, 16434).unwrap();
    let s = scenario(source.clone(), Some(amplifier), detector, grid, 2048, 0x90D3);
    let out = run_pipeline(
        &s,
        &PipelineOptions {
            segment_bins: Some(4096),
            correlation: CorrelationMode::Stationary { max_lag_bins: 96 },
            threads: None,
        },
    )
    .unwrap();

    let oracle = unconditional_moments(&source, Some(&amplifier), &detector).unwrap();

    // mean
    let expected_mean = oracle.mean_at(0.0);
    let mean_dev = (out.report.global_mean_current - expected_mean).abs();
    assert!(
        mean_dev <= 3.0 * out.report.global_mean_current_se,
        "mean {} vs {expected_mean}",
        out.report.global_mean_current
    );

    // spectrum at omega << gamma_a: flat value from the printed delta weights
    let spectrum = out.spectrum.unwrap();
    let omega = spectrum.frequencies()[2];
    let (_, value, ci) = spectrum.value_near(omega);
    let expected_spectrum = oracle.shot_weight_at(0.0); // transform of the delta ridge
    assert!(
        (value - expected_spectrum).abs() <= 3.0 * ci.unwrap(),
        "spectrum {value} vs {expected_spectrum} at omega {omega}"
    );

    // smooth correlation at lag >> 1/gamma_a (printed constant part)
    let corr = out.report.stationary_correlation.unwrap();
    let lag = 96;
    let tau = corr.dt * lag as f64;
    assert!(tau * gamma_a > 9.0, "lag must be deep in the smooth region");
    let expected_corr = oracle.smooth_at(0.0, tau);
    assert!(
        (corr.values[lag] - expected_corr).abs() <= 3.0 * corr.se[lag],
        "corr {} vs {expected_corr}",
        corr.values[lag]
    );
}

/// Two-path consistency for amplified coherent light in one detection
/// window: the Poisson mixture over simulated integrated fluxes agrees with
/// directly simulated counts.
#[test]
fn amplified_coherent_counts_match_mixture_oracle() {
    let grid = TimeGrid::new(0.0, 0.002, 64).unwrap();
    let amplifier = AmplifierModel::new(2.0, 12.5, 50.0).unwrap();
    let detector = DetectorModel::new(0.9, 1.0).unwrap();
    let source = SourceModel::coherent_constant(250.0);

    // path 1: integrated-flux samples -> Poisson mixture
    let splitter = SeedSplitter::new(0x90D4);
    let samples: Vec<f64> = (0..100_000u64)
        .map(|i| {
            let e0 = sample_source(&source, grid, &mut splitter.stream(i, StreamRole::Auxiliary))
                .unwrap();
            let e1 = amplify(&e0, &amplifier, &mut splitter.stream(i, StreamRole::AmplifierNoise))
                .unwrap();
            e1.intensity().samples().iter().sum::<f64>() * grid.dt()
        })
        .collect();
    let oracle =
        photocount_distribution(&IntensityLaw::Empirical { samples }, &detector).unwrap();

    // path 2: full chain simulation
    let s = scenario(source, Some(amplifier), detector, grid, 100_000, 0x90D5);
    let ensemble = run_chain(&s).unwrap();
    let totals: Vec<u64> = ensemble.records.iter().map(|r| r.total_counts()).collect();

    let d = ks_distance_counts(&totals, &oracle);
    let critical = ks_two_sample_critical_value(0.01, totals.len(), 100_000);
    assert!(d < critical, "two-path KS {d:.5} vs critical {critical:.5}");
}

/// Amplifier noise must not correlate with the input field.
#[test]
fn amplifier_noise_is_input_independent() {
    let grid = TimeGrid::new(0.0, 0.002, 32).unwrap();
    let amplifier = AmplifierModel::new(2.0, 10.0, 50.0).unwrap();
    let source = SourceModel::GaussianThermal { mean_flux: 100.0, coherence_rate: 4.0 };
    let splitter = SeedSplitter::new(0x90D6);
    let trials = 40_000u64;
    let gain = 2.0f64.sqrt();
    let mut cross = num_complex::Complex64::new(0.0, 0.0);
    let mut input_power = 0.0;
    let mut noise_power = 0.0;
    for i in 0..trials {
        let e0 =
            sample_source(&source, grid, &mut splitter.stream(i, StreamRole::SourceField)).unwrap();
        let e1 =
            amplify(&e0, &amplifier, &mut splitter.stream(i, StreamRole::AmplifierNoise)).unwrap();
        let a = e1.samples()[7] - gain * e0.samples()[7];
        cross += e0.samples()[7].conj() * a;
        input_power += e0.samples()[7].norm_sqr();
        noise_power += a.norm_sqr();
    }
    let n = trials as f64;
    let correlation = (cross / n).norm() / ((input_power / n) * (noise_power / n)).sqrt();
    // |corr| of independent complex pairs ~ Rayleigh with scale 1/sqrt(2n)
    assert!(correlation < 3.0 / (2.0 * n).sqrt(), "cross correlation {correlation}");
}

/// Simulated photocurrent records always carry a nonnegative spectrum.
#[test]
fn estimated_spectra_are_nonnegative() {
    let grid = TimeGrid::new(0.0, 0.01, 2048).unwrap();
    let s = scenario(
        SourceModel::GaussianThermal { mean_flux: 50.0, coherence_rate: 2.0 },
        None,
        DetectorModel::new(1.0, 1.0).unwrap(),
        grid,
        64,
        0x90D7,
    );
    let out = run_pipeline(
        &s,
        &PipelineOptions { segment_bins: Some(256), ..Default::default() },
    )
    .unwrap();
    assert!(out.spectrum.unwrap().values().iter().all(|&v| v >= 0.0));
}

/// Thermal light in a single coherence cell: geometric count law with mean
/// eta n0 T.
#[test]
fn thermal_single_cell_totals_are_geometric() {
    let grid = TimeGrid::new(0.0, 1.0 / 32.0, 32).unwrap();
    let n0 = 3.0;
    let s = scenario(
        SourceModel::GaussianThermal { mean_flux: n0, coherence_rate: 2e-3 },
        None,
        DetectorModel::new(1.0, 1.0).unwrap(),
        grid,
        50_000,
        0x90D8,
    );
    let out = run_pipeline(&s, &PipelineOptions::default()).unwrap();
    let nbar = n0 * grid.span();
    let mut expect_cdf = 0.0;
    let mut d = 0.0f64;
    let totals = out.report.counts.totals();
    let mut sorted = totals.clone();
    sorted.sort_unstable();
    let mut idx = 0usize;
    for n in 0..=*sorted.last().unwrap() {
        expect_cdf += nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1);
        while idx < sorted.len() && sorted[idx] <= n {
            idx += 1;
        }
        d = d.max((idx as f64 / sorted.len() as f64 - expect_cdf).abs());
    }
    let critical = 1.6276 / (sorted.len() as f64).sqrt();
    assert!(d < critical, "KS {d:.5} vs critical {critical:.5}");
}
