//! Scenario-driven command line front end.
//!
//! Exit codes: 0 success, 1 runtime/identity failure, 2 configuration error,
//! 3 physics-validator rejection.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use photocascade::analytics::{analytic_spectrum, boundary_source_spectrum_terms};
use photocascade::cascade::{run_pipeline, CorrelationMode, PipelineOptions, Scenario};
use photocascade::config::{sha256_hex, CheckResult, FileDigest, RunManifest, ScenarioConfig};
use photocascade::devices::{validate_moment_source, SourceModel};
use photocascade::error::Error;
use photocascade::lattice::suite::{associativity_dev, equivalence_suite};
use photocascade::lattice::io as lattice_io;
use photocascade::output;

#[derive(Parser)]
#[command(name = "cascade", version, about = "Cascaded electro-optical chain simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write CSV artifacts plus a summary.
    Run(RunArgs),
    /// Run the physics validators without simulating.
    Validate { config: PathBuf },
    /// Run the exact lattice identity suite on table fixtures.
    Compose { fixtures: PathBuf },
    /// Sweep one parameter and tabulate the analytic spectrum at a frequency.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory for CSV artifacts and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trajectory count in the config.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Worker threads (default: rayon's choice).
    #[arg(long)]
    threads: Option<usize>,
    /// Run even if the physics validators reject the parameters.
    #[arg(long)]
    allow_unphysical: bool,
    /// Re-run and verify output digests against the existing manifest
    /// instead of writing files.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Parameter to sweep: t_a | n_a | eta | n0 | gamma_a | gamma_c.
    #[arg(long)]
    param: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Frequency (rad/s) at which the analytic spectrum is evaluated.
    #[arg(long)]
    omega: f64,
    /// Also simulate each point and report the estimated spectrum there.
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Validate { config } => cmd_validate(&config),
        Command::Compose { fixtures } => cmd_compose(&fixtures),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::InvalidParameter(_) => 2,
                Error::PhysicsRejected(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn load(config_path: &Path) -> Result<(ScenarioConfig, Scenario, String), Error> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Error::Config(format!("{}: {e}", config_path.display())))?;
    let config = ScenarioConfig::from_str(&text)?;
    let scenario = config.to_scenario()?;
    Ok((config, scenario, text))
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let (config, mut scenario, text) = load(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(n) = args.trajectories {
        scenario.trajectories = n;
    }
    scenario.allow_unphysical = args.allow_unphysical;

    let physics = scenario.physics_report();
    if !physics.is_physical() && !args.allow_unphysical {
        return Err(Error::PhysicsRejected(physics.violations().join("; ")));
    }

    let correlation = match config.run.max_lag_bins {
        Some(lags) => CorrelationMode::Stationary { max_lag_bins: lags },
        None => CorrelationMode::None,
    };
    let opts = PipelineOptions {
        segment_bins: config.run.segment_bins,
        correlation,
        threads: args.threads,
    };
    let result = run_pipeline(&scenario, &opts)?;
    let checks = run_checks(&config, &scenario, &result);

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    files.push(("timeseries.csv".into(), output::timeseries_csv(&result.report)?));
    files.push(("counts.csv".into(), output::counts_csv(&result.report)?));
    if let Some(bytes) = output::correlation_csv(&result.report)? {
        files.push(("correlation.csv".into(), bytes));
    }
    if let Some(spectrum) = &result.spectrum {
        let analytic = analytic_reference(&scenario, spectrum.frequencies());
        files.push(("spectrum.csv".into(), output::spectrum_csv(spectrum, analytic.as_ref())?));
    }
    let mut summary = String::new();
    for check in &checks {
        summary.push_str(&toml_check(check));
    }
    files.push(("summary.toml".into(), summary.into_bytes()));
    files.sort_by(|a, b| a.0.cmp(&b.0));

    let manifest = RunManifest {
        config_digest: sha256_hex(text.as_bytes()),
        seed: scenario.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_s: started.elapsed().as_secs_f64(),
        files: files
            .iter()
            .map(|(name, bytes)| FileDigest { name: name.clone(), sha256: sha256_hex(bytes) })
            .collect(),
        checks: checks.clone(),
    };

    if args.check {
        let existing = RunManifest::read(&args.out.join("manifest.toml"))?;
        let mut mismatches = Vec::new();
        if existing.config_digest != manifest.config_digest {
            mismatches.push("config digest".to_string());
        }
        for file in &manifest.files {
            match existing.files.iter().find(|f| f.name == file.name) {
                Some(old) if old.sha256 == file.sha256 => {}
                Some(_) => mismatches.push(file.name.clone()),
                None => mismatches.push(format!("{} (missing from manifest)", file.name)),
            }
        }
        if mismatches.is_empty() {
            println!("check ok: {} files reproduced byte-identically", manifest.files.len());
        } else {
            eprintln!("check failed: {}", mismatches.join(", "));
            return Ok(ExitCode::from(1));
        }
    } else {
        std::fs::create_dir_all(&args.out)?;
        for (name, bytes) in &files {
            std::fs::write(args.out.join(name), bytes)?;
        }
        manifest.write(&args.out.join("manifest.toml"))?;
        println!(
            "wrote {} files to {} in {:.2}s",
            files.len() + 1,
            args.out.display(),
            started.elapsed().as_secs_f64()
        );
    }

    for check in &checks {
        println!(
            "check {}: {} (value {:.6e}, expected {:.6e}, tolerance {:.3e})",
            check.name,
            if check.pass { "pass" } else { "FAIL" },
            check.value,
            check.expected,
            check.tolerance
        );
    }
    if checks.iter().all(|c| c.pass) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn toml_check(check: &CheckResult) -> String {
    format!(
        "[[check]]\nname = {:?}\npass = {}\nvalue = {:?}\nexpected = {:?}\ntolerance = {:?}\ndetail = {:?}\n\n",
        check.name, check.pass, check.value, check.expected, check.tolerance, check.detail
    )
}

fn analytic_reference(
    scenario: &Scenario,
    omegas: &[f64],
) -> Option<photocascade::SpectrumSeries> {
    let n0 = scenario.source.stationary_flux()?;
    let excess = scenario.source.excess_correlation()?;
    analytic_spectrum(
        n0,
        &|w| excess.spectrum(w),
        scenario.amplifier.as_ref(),
        &scenario.detector,
        omegas,
    )
    .ok()
}

fn run_checks(
    config: &ScenarioConfig,
    scenario: &Scenario,
    result: &photocascade::cascade::PipelineOutput,
) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    if let (Some(n0), Some(_)) =
        (scenario.source.stationary_flux(), scenario.source.excess_correlation())
    {
        let (t_a, n_a) = match &scenario.amplifier {
            Some(a) => (a.power_transfer, a.added_noise_flux),
            None => (1.0, 0.0),
        };
        let expected =
            scenario.detector.pulse_charge * scenario.detector.efficiency * (t_a * n0 + n_a);
        let se = result.report.global_mean_current_se;
        let tolerance = config.checks.mean_sigmas * se;
        checks.push(CheckResult {
            name: "mean-current-vs-analytic".into(),
            pass: (result.report.global_mean_current - expected).abs() <= tolerance,
            value: result.report.global_mean_current,
            expected,
            tolerance,
            detail: format!("{} standard errors", config.checks.mean_sigmas),
        });
    }
    if let Some(spectrum) = &result.spectrum {
        if let Some(analytic) = analytic_reference(scenario, spectrum.frequencies()) {
            let dt = scenario.grid.dt();
            let resolution = spectrum.frequencies()[0];
            let nyquist = std::f64::consts::PI / dt;
            let [lo, hi] = config
                .checks
                .spectrum_band_rad_per_s
                .unwrap_or([4.0 * resolution, 0.8 * nyquist]);
            let mut worst = 0.0f64;
            let mut worst_value = 0.0;
            let mut worst_expected = 0.0;
            for ((&w, &v), &a) in spectrum
                .frequencies()
                .iter()
                .zip(spectrum.values())
                .zip(analytic.values())
            {
                if w < lo || w > hi {
                    continue;
                }
                let rel = (v - a).abs() / a.abs().max(1e-300);
                if rel > worst {
                    worst = rel;
                    worst_value = v;
                    worst_expected = a;
                }
            }
            checks.push(CheckResult {
                name: "spectrum-vs-analytic".into(),
                pass: worst <= config.checks.spectrum_rel_tol,
                value: worst_value,
                expected: worst_expected,
                tolerance: config.checks.spectrum_rel_tol,
                detail: format!(
                    "max relative deviation {:.4} over omega in [{lo:.4}, {hi:.4}] rad/s",
                    worst
                ),
            });
        }
    }
    checks
}

fn cmd_validate(config_path: &Path) -> Result<ExitCode, Error> {
    let (_, scenario, _) = load(config_path)?;
    let physics = scenario.physics_report();
    if let Some(a) = &physics.amplifier {
        println!("[amplifier]");
        println!("noise_density = {}", a.noise_density);
        println!("caves_bound = {}", a.caves_bound);
        println!("caves_ok = {}", a.caves_ok);
        println!("caves_margin = {}", a.caves_margin);
        println!("weak_bound = {}", a.weak_bound);
        println!("weak_ok = {}", a.weak_ok);
        println!("weak_margin = {}", a.weak_margin);
        println!();
    }
    if let Some(b) = &physics.bandwidth {
        println!("[bandwidth]");
        println!("noise_bandwidth_per_s = {}", b.noise_bandwidth);
        println!("signal_width_per_s = {}", b.signal_width);
        println!("required_ratio = {}", b.required_ratio);
        println!("ok = {}", b.ok);
        println!();
    }
    if matches!(scenario.source, SourceModel::MomentSpecified { .. }) {
        let report = validate_moment_source(&scenario.source, &scenario.grid)?;
        println!("[moment_source]");
        println!("min_value_per_s2 = {}", report.min_value);
        println!("min_omega_rad_per_s = {}", report.min_omega);
        println!("margin_per_s2 = {}", report.margin);
        println!("ok = {}", report.ok);
        println!();
    }
    if physics.amplifier.is_none() {
        println!("# no amplifier configured; nothing to bound");
    }
    for violation in physics.violations() {
        println!("# violation: {violation}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compose(fixtures: &Path) -> Result<ExitCode, Error> {
    let pa = lattice_io::read_table(&fixtures.join("pa.toml"))?;
    let pb = lattice_io::read_table(&fixtures.join("pb.toml"))?;
    let kernel = lattice_io::read_kernel(&fixtures.join("kernel.toml"))?;
    let report = equivalence_suite(&pa, &pb, &kernel)?;
    println!("commutation_dev = {:e}", report.commutation_dev);
    println!("factorization_dev = {:e}", report.factorization_dev);
    if let Some(dev) = report.zero_kernel_dev {
        println!("zero_kernel_identity_dev = {:e} (kernel is zero: dressing is the identity)", dev);
    }
    println!("signed = {}", report.signed);
    let mut max_dev = report.max_dev();

    let chain_parts = ["source.toml", "stage_a.toml", "stage_d.toml"];
    if chain_parts.iter().all(|f| fixtures.join(f).exists()) {
        let source = lattice_io::read_distribution(&fixtures.join("source.toml"))?;
        let stage_a = lattice_io::read_table(&fixtures.join("stage_a.toml"))?;
        let stage_d = lattice_io::read_table(&fixtures.join("stage_d.toml"))?;
        let dev = associativity_dev(&source, &stage_a, &stage_d)?;
        println!("associativity_dev = {dev:e}");
        max_dev = max_dev.max(dev);
    }
    println!("max_dev = {max_dev:e}");
    if max_dev < 1e-12 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("identity deviations exceed 1e-12");
        Ok(ExitCode::from(1))
    }
}

const SWEEP_PARAMS: [&str; 6] = ["t_a", "n_a", "eta", "n0", "gamma_a", "gamma_c"];

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Error> {
    if !SWEEP_PARAMS.contains(&args.param.as_str()) {
        return Err(Error::Config(format!(
            "parameter {:?} is not sweepable; choose one of {SWEEP_PARAMS:?}",
            args.param
        )));
    }
    if args.steps < 2 || !(args.to > args.from) {
        return Err(Error::Config("sweep range must have at least 2 increasing steps".into()));
    }
    if !(args.omega > 0.0) {
        return Err(Error::Config("omega must be positive".into()));
    }
    let (_, base, _) = load(&args.config)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Config(e.to_string()))?;
    let mut header = vec![
        args.param.clone(),
        "n0_coefficient_per_s".to_string(),
        "analytic_spectrum_charge2_per_s".to_string(),
    ];
    if args.simulate {
        header.push("simulated_spectrum_charge2_per_s".to_string());
        header.push("simulated_ci_halfwidth".to_string());
    }
    w.write_record(&header).map_err(|e| Error::Config(e.to_string()))?;

    for k in 0..args.steps {
        let value = args.from + (args.to - args.from) * k as f64 / (args.steps - 1) as f64;
        let mut scenario = base.clone();
        apply_sweep_value(&mut scenario, &args.param, value)?;
        let n0 = scenario
            .source
            .stationary_flux()
            .ok_or_else(|| Error::Config("sweep needs a stationary source".into()))?;
        let excess = scenario.source.excess_correlation().unwrap();
        let analytic = analytic_spectrum(
            n0,
            &|wq| excess.spectrum(wq),
            scenario.amplifier.as_ref(),
            &scenario.detector,
            &[args.omega],
        )?
        .values()[0];
        let coefficient = match &scenario.amplifier {
            Some(a) => boundary_source_spectrum_terms(a, &scenario.detector).n0_coefficient,
            None => {
                let eta = scenario.detector.efficiency;
                eta * (1.0 - eta)
            }
        };
        let mut row = vec![value.to_string(), coefficient.to_string(), analytic.to_string()];
        if args.simulate {
            let mut sim = scenario.clone();
            sim.allow_unphysical = true;
            let seg = (sim.grid.len() - sim.analysis_start_bin()) / 4;
            let opts = PipelineOptions {
                segment_bins: Some(seg),
                correlation: CorrelationMode::None,
                threads: args.threads,
            };
            let out = run_pipeline(&sim, &opts)?;
            let spectrum = out.spectrum.expect("requested");
            let (_, v, ci) = spectrum.value_near(args.omega);
            row.push(v.to_string());
            row.push(ci.unwrap_or(0.0).to_string());
        }
        w.write_record(&row).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn apply_sweep_value(scenario: &mut Scenario, param: &str, value: f64) -> Result<(), Error> {
    match param {
        "t_a" | "n_a" | "gamma_a" => {
            let amp = scenario
                .amplifier
                .as_mut()
                .ok_or_else(|| Error::Config(format!("sweeping {param} needs an amplifier")))?;
            match param {
                "t_a" => amp.power_transfer = value,
                "n_a" => amp.added_noise_flux = value,
                _ => amp.noise_bandwidth = value,
            }
        }
        "eta" => scenario.detector.efficiency = value,
        "n0" => match &mut scenario.source {
            SourceModel::Coherent { envelope } => match envelope {
                photocascade::devices::FluxEnvelope::Constant { flux } => *flux = value,
                _ => return Err(Error::Config("cannot sweep n0 of a pulsed source".into())),
            },
            SourceModel::GaussianThermal { mean_flux, .. } => *mean_flux = value,
            SourceModel::MomentSpecified { mean_flux, .. } => *mean_flux = value,
        },
        "gamma_c" => match &mut scenario.source {
            SourceModel::GaussianThermal { coherence_rate, .. } => *coherence_rate = value,
            _ => return Err(Error::Config("gamma_c applies to thermal sources".into())),
        },
        _ => unreachable!("whitelist checked"),
    }
    Ok(())
}
