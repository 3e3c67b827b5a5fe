//! C ABI for the photocascade simulator.
//!
//! Scenarios are opaque handles built from TOML config text; results come
//! back through out-parameters. Every function returns a status code; the
//! thread-local message of the last failure is available through
//! [`pcas_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use photocascade::analytics::{analytic_spectrum, boundary_source_spectrum_terms};
use photocascade::cascade::{run_pipeline, CorrelationMode, PipelineOptions, Scenario};
use photocascade::config::ScenarioConfig;
use photocascade::devices::{caves_bound, validate_amplifier, weak_bound, AmplifierModel};
use photocascade::error::Error;

/// Status codes mirroring the CLI exit contract.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcasStatus {
    Ok = 0,
    /// Simulation or estimation failed at runtime.
    Runtime = 1,
    /// Malformed configuration or invalid argument.
    Config = 2,
    /// Physics validators rejected the parameters.
    Physics = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(error: &Error) -> PcasStatus {
    match error {
        Error::Config(_) | Error::InvalidParameter(_) => PcasStatus::Config,
        Error::PhysicsRejected(_) => PcasStatus::Physics,
        _ => PcasStatus::Runtime,
    }
}

fn fail(error: Error) -> PcasStatus {
    let status = status_of(&error);
    set_error(error.to_string());
    status
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pcas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Opaque scenario handle.
pub struct PcasScenario {
    scenario: Scenario,
    segment_bins: Option<usize>,
}

/// Parses TOML config text into a scenario handle. On success `*out` owns
/// the scenario; release it with [`pcas_scenario_free`].
///
/// # Safety
/// `config_text` must be a valid NUL-terminated UTF-8 string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcas_scenario_from_toml(
    config_text: *const c_char,
    out: *mut *mut PcasScenario,
) -> PcasStatus {
    if config_text.is_null() || out.is_null() {
        set_error("null argument".into());
        return PcasStatus::NullArgument;
    }
    let text = match CStr::from_ptr(config_text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("config text is not valid UTF-8".into());
            return PcasStatus::Config;
        }
    };
    let config = match ScenarioConfig::from_str(text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let scenario = match config.to_scenario() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let handle = Box::new(PcasScenario { scenario, segment_bins: config.run.segment_bins });
    *out = Box::into_raw(handle);
    PcasStatus::Ok
}

/// Releases a scenario handle. Null is ignored.
///
/// # Safety
/// `scenario` must be a pointer returned by [`pcas_scenario_from_toml`],
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn pcas_scenario_free(scenario: *mut PcasScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Headline statistics of one simulated run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PcasRunSummary {
    /// Time-averaged mean photocurrent over the analysis window.
    pub mean_current: f64,
    /// Standard error of the mean current.
    pub mean_current_se: f64,
    /// Mean total pulse count per trajectory.
    pub mean_total_counts: f64,
    /// Trajectories simulated.
    pub trajectories: u64,
}

/// Runs the scenario and fills `summary`.
///
/// # Safety
/// `scenario` must be a live handle and `summary` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcas_scenario_run(
    scenario: *const PcasScenario,
    threads: usize,
    allow_unphysical: bool,
    summary: *mut PcasRunSummary,
) -> PcasStatus {
    let Some(handle) = scenario.as_ref() else {
        set_error("null scenario".into());
        return PcasStatus::NullArgument;
    };
    if summary.is_null() {
        set_error("null summary pointer".into());
        return PcasStatus::NullArgument;
    }
    let mut s = handle.scenario.clone();
    s.allow_unphysical = allow_unphysical;
    let opts = PipelineOptions {
        segment_bins: None,
        correlation: CorrelationMode::None,
        threads: (threads > 0).then_some(threads),
    };
    match run_pipeline(&s, &opts) {
        Ok(out) => {
            *summary = PcasRunSummary {
                mean_current: out.report.global_mean_current,
                mean_current_se: out.report.global_mean_current_se,
                mean_total_counts: out.report.counts.mean(),
                trajectories: out.report.trajectories as u64,
            };
            PcasStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Estimates the photocurrent spectrum of the scenario.
///
/// Two-call protocol: pass `frequencies = values = NULL` to query the number
/// of spectral points via `*len`; then call again with buffers of that
/// capacity (and `*len` set to it) to fill them.
///
/// # Safety
/// `scenario` must be a live handle; `len` must be valid; the buffers, when
/// non-null, must hold at least `*len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pcas_scenario_spectrum(
    scenario: *const PcasScenario,
    threads: usize,
    allow_unphysical: bool,
    frequencies: *mut f64,
    values: *mut f64,
    len: *mut usize,
) -> PcasStatus {
    let Some(handle) = scenario.as_ref() else {
        set_error("null scenario".into());
        return PcasStatus::NullArgument;
    };
    if len.is_null() {
        set_error("null length pointer".into());
        return PcasStatus::NullArgument;
    }
    let Some(segment_bins) = handle.segment_bins else {
        set_error("config has no run.segment_bins; spectrum estimation not configured".into());
        return PcasStatus::Config;
    };
    let mut s = handle.scenario.clone();
    s.allow_unphysical = allow_unphysical;
    let opts = PipelineOptions {
        segment_bins: Some(segment_bins),
        correlation: CorrelationMode::None,
        threads: (threads > 0).then_some(threads),
    };
    let spectrum = match run_pipeline(&s, &opts) {
        Ok(out) => out.spectrum.expect("segment_bins set"),
        Err(e) => return fail(e),
    };
    if frequencies.is_null() || values.is_null() {
        *len = spectrum.len();
        return PcasStatus::Ok;
    }
    if *len < spectrum.len() {
        set_error(format!("buffer of {} too small for {} points", *len, spectrum.len()));
        return PcasStatus::Config;
    }
    for (k, (&f, &v)) in spectrum.frequencies().iter().zip(spectrum.values()).enumerate() {
        *frequencies.add(k) = f;
        *values.add(k) = v;
    }
    *len = spectrum.len();
    PcasStatus::Ok
}

/// Amplifier noise-limit report, C view.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PcasAmplifierReport {
    pub noise_density: f64,
    pub caves_bound: f64,
    pub weak_bound: f64,
    pub caves_margin: f64,
    pub weak_margin: f64,
    pub caves_ok: bool,
    pub weak_ok: bool,
}

/// Validates an amplifier parameter triple against the noise limits.
///
/// # Safety
/// `report` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcas_validate_amplifier(
    power_transfer: f64,
    added_noise_flux: f64,
    noise_bandwidth: f64,
    report: *mut PcasAmplifierReport,
) -> PcasStatus {
    if report.is_null() {
        set_error("null report pointer".into());
        return PcasStatus::NullArgument;
    }
    let model = match AmplifierModel::new(power_transfer, added_noise_flux, noise_bandwidth) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let r = validate_amplifier(&model);
    *report = PcasAmplifierReport {
        noise_density: r.noise_density,
        caves_bound: r.caves_bound,
        weak_bound: r.weak_bound,
        caves_margin: r.caves_margin,
        weak_margin: r.weak_margin,
        caves_ok: r.caves_ok,
        weak_ok: r.weak_ok,
    };
    PcasStatus::Ok
}

/// Hard lower bound on the amplifier noise density `4 n_a / gamma_a`.
#[no_mangle]
pub extern "C" fn pcas_caves_bound(power_transfer: f64) -> f64 {
    caves_bound(power_transfer)
}

/// Weak lower bound `(T_a - 1)/2` on the noise density.
#[no_mangle]
pub extern "C" fn pcas_weak_bound(power_transfer: f64) -> f64 {
    weak_bound(power_transfer)
}

/// Analytic photocurrent spectrum (per `q^2 = 1`, flat excess `n2`) of a
/// chain with the given parameters, written to `*value`.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcas_analytic_spectrum_point(
    n0: f64,
    n2_at_omega: f64,
    power_transfer: f64,
    added_noise_flux: f64,
    noise_bandwidth: f64,
    efficiency: f64,
    omega: f64,
    value: *mut f64,
) -> PcasStatus {
    if value.is_null() {
        set_error("null value pointer".into());
        return PcasStatus::NullArgument;
    }
    let amplifier = match AmplifierModel::new(power_transfer, added_noise_flux, noise_bandwidth) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let detector = match photocascade::devices::DetectorModel::new(efficiency, 1.0) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    match analytic_spectrum(n0, &|_| n2_at_omega, Some(&amplifier), &detector, &[omega]) {
        Ok(s) => {
            *value = s.values()[0];
            PcasStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Coefficient of `n0` in the spectrum at a bound-saturating frequency;
/// zero exactly at the weak noise bound for unit efficiency.
///
/// # Safety
/// `coefficient` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcas_boundary_n0_coefficient(
    power_transfer: f64,
    added_noise_flux: f64,
    noise_bandwidth: f64,
    efficiency: f64,
    coefficient: *mut f64,
) -> PcasStatus {
    if coefficient.is_null() {
        set_error("null coefficient pointer".into());
        return PcasStatus::NullArgument;
    }
    let amplifier = match AmplifierModel::new(power_transfer, added_noise_flux, noise_bandwidth) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let detector = match photocascade::devices::DetectorModel::new(efficiency, 1.0) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    *coefficient = boundary_source_spectrum_terms(&amplifier, &detector).n0_coefficient;
    PcasStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"
[grid]
t0_s = 0.0
dt_s = 0.002
bins = 256

[source.coherent]
flux_per_s = 500.0

[detector]
efficiency = 1.0
pulse_charge = 1.0

[run]
trajectories = 400
seed = 99
segment_bins = 64
"#;

    #[test]
    fn scenario_round_trip_through_the_abi() {
        let text = CString::new(CONFIG).unwrap();
        let mut handle: *mut PcasScenario = ptr::null_mut();
        let status = unsafe { pcas_scenario_from_toml(text.as_ptr(), &mut handle) };
        assert_eq!(status, PcasStatus::Ok);
        let mut summary = PcasRunSummary {
            mean_current: 0.0,
            mean_current_se: 0.0,
            mean_total_counts: 0.0,
            trajectories: 0,
        };
        let status = unsafe { pcas_scenario_run(handle, 2, false, &mut summary) };
        assert_eq!(status, PcasStatus::Ok);
        assert_eq!(summary.trajectories, 400);
        assert!((summary.mean_current - 500.0).abs() < 4.0 * summary.mean_current_se);

        let mut len = 0usize;
        let status = unsafe {
            pcas_scenario_spectrum(handle, 2, false, ptr::null_mut(), ptr::null_mut(), &mut len)
        };
        assert_eq!(status, PcasStatus::Ok);
        assert_eq!(len, 32);
        let mut freqs = vec![0.0; len];
        let mut values = vec![0.0; len];
        let status = unsafe {
            pcas_scenario_spectrum(handle, 2, false, freqs.as_mut_ptr(), values.as_mut_ptr(), &mut len)
        };
        assert_eq!(status, PcasStatus::Ok);
        assert!(freqs.windows(2).all(|w| w[0] < w[1]));
        unsafe { pcas_scenario_free(handle) };
    }

    #[test]
    fn bad_config_reports_config_status() {
        let text = CString::new("not toml at all [").unwrap();
        let mut handle: *mut PcasScenario = ptr::null_mut();
        let status = unsafe { pcas_scenario_from_toml(text.as_ptr(), &mut handle) };
        assert_eq!(status, PcasStatus::Config);
        let msg = unsafe { CStr::from_ptr(pcas_last_error_message()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn unphysical_scenario_reports_physics_status() {
        let config = CONFIG.replace(
            "[detector]",
            "[amplifier]\npower_transfer = 2.0\nadded_noise_flux_per_s = 0.0\nnoise_bandwidth_per_s = 5.0\n\n[detector]",
        );
        let text = CString::new(config).unwrap();
        let mut handle: *mut PcasScenario = ptr::null_mut();
        assert_eq!(unsafe { pcas_scenario_from_toml(text.as_ptr(), &mut handle) }, PcasStatus::Ok);
        let mut summary = PcasRunSummary {
            mean_current: 0.0,
            mean_current_se: 0.0,
            mean_total_counts: 0.0,
            trajectories: 0,
        };
        let status = unsafe { pcas_scenario_run(handle, 1, false, &mut summary) };
        assert_eq!(status, PcasStatus::Physics);
        let status = unsafe { pcas_scenario_run(handle, 1, true, &mut summary) };
        assert_eq!(status, PcasStatus::Ok);
        unsafe { pcas_scenario_free(handle) };
    }

    #[test]
    fn bounds_match_library() {
        assert_eq!(pcas_caves_bound(3.0), 2.0);
        assert_eq!(pcas_weak_bound(3.0), 1.0);
        let mut report = PcasAmplifierReport {
            noise_density: 0.0,
            caves_bound: 0.0,
            weak_bound: 0.0,
            caves_margin: 0.0,
            weak_margin: 0.0,
            caves_ok: false,
            weak_ok: false,
        };
        let status = unsafe { pcas_validate_amplifier(2.0, 2.5, 10.0, &mut report) };
        assert_eq!(status, PcasStatus::Ok);
        assert!(report.caves_ok);
        assert_eq!(report.caves_margin, 0.0);

        let mut coeff = 1.0;
        let status = unsafe { pcas_boundary_n0_coefficient(4.0, 30.0, 80.0, 1.0, &mut coeff) };
        assert_eq!(status, PcasStatus::Ok);
        assert!(coeff.abs() < 1e-12);
    }
}
