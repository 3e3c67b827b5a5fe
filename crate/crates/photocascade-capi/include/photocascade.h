#ifndef PHOTOCASCADE_H
#define PHOTOCASCADE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit contract.
 */
typedef enum PcasStatus {
  Ok = 0,
  /**
   * Simulation or estimation failed at runtime.
   */
  Runtime = 1,
  /**
   * Malformed configuration or invalid argument.
   */
  Config = 2,
  /**
   * Physics validators rejected the parameters.
   */
  Physics = 3,
  /**
   * A required pointer argument was null.
   */
  NullArgument = 4,
} PcasStatus;

/**
 * Opaque scenario handle.
 */
typedef struct PcasScenario PcasScenario;

/**
 * Headline statistics of one simulated run.
 */
typedef struct PcasRunSummary {
  /**
   * Time-averaged mean photocurrent over the analysis window.
   */
  double mean_current;
  /**
   * Standard error of the mean current.
   */
  double mean_current_se;
  /**
   * Mean total pulse count per trajectory.
   */
  double mean_total_counts;
  /**
   * Trajectories simulated.
   */
  uint64_t trajectories;
} PcasRunSummary;

/**
 * Amplifier noise-limit report, C view.
 */
typedef struct PcasAmplifierReport {
  double noise_density;
  double caves_bound;
  double weak_bound;
  double caves_margin;
  double weak_margin;
  bool caves_ok;
  bool weak_ok;
} PcasAmplifierReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pcas_last_error_message(void);

/**
 * Parses TOML config text into a scenario handle. On success `*out` owns
 * the scenario; release it with [`pcas_scenario_free`].
 *
 * # Safety
 * `config_text` must be a valid NUL-terminated UTF-8 string and `out` a
 * valid pointer.
 */
enum PcasStatus pcas_scenario_from_toml(const char *config_text, struct PcasScenario **out);

/**
 * Releases a scenario handle. Null is ignored.
 *
 * # Safety
 * `scenario` must be a pointer returned by [`pcas_scenario_from_toml`],
 * released at most once.
 */
void pcas_scenario_free(struct PcasScenario *scenario);

/**
 * Runs the scenario and fills `summary`.
 *
 * # Safety
 * `scenario` must be a live handle and `summary` a valid pointer.
 */
enum PcasStatus pcas_scenario_run(const struct PcasScenario *scenario,
                                  uintptr_t threads,
                                  bool allow_unphysical,
                                  struct PcasRunSummary *summary);

/**
 * Estimates the photocurrent spectrum of the scenario.
 *
 * Two-call protocol: pass `frequencies = values = NULL` to query the number
 * of spectral points via `*len`; then call again with buffers of that
 * capacity (and `*len` set to it) to fill them.
 *
 * # Safety
 * `scenario` must be a live handle; `len` must be valid; the buffers, when
 * non-null, must hold at least `*len` doubles.
 */
enum PcasStatus pcas_scenario_spectrum(const struct PcasScenario *scenario,
                                       uintptr_t threads,
                                       bool allow_unphysical,
                                       double *frequencies,
                                       double *values,
                                       uintptr_t *len);

/**
 * Validates an amplifier parameter triple against the noise limits.
 *
 * # Safety
 * `report` must be a valid pointer.
 */
enum PcasStatus pcas_validate_amplifier(double power_transfer,
                                        double added_noise_flux,
                                        double noise_bandwidth,
                                        struct PcasAmplifierReport *report);

/**
 * Hard lower bound on the amplifier noise density `4 n_a / gamma_a`.
 */
double pcas_caves_bound(double power_transfer);

/**
 * Weak lower bound `(T_a - 1)/2` on the noise density.
 */
double pcas_weak_bound(double power_transfer);

/**
 * Analytic photocurrent spectrum (per `q^2 = 1`, flat excess `n2`) of a
 * chain with the given parameters, written to `*value`.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum PcasStatus pcas_analytic_spectrum_point(double n0,
                                             double n2_at_omega,
                                             double power_transfer,
                                             double added_noise_flux,
                                             double noise_bandwidth,
                                             double efficiency,
                                             double omega,
                                             double *value);

/**
 * Coefficient of `n0` in the spectrum at a bound-saturating frequency;
 * zero exactly at the weak noise bound for unit efficiency.
 *
 * # Safety
 * `coefficient` must be a valid pointer.
 */
enum PcasStatus pcas_boundary_n0_coefficient(double power_transfer,
                                             double added_noise_flux,
                                             double noise_bandwidth,
                                             double efficiency,
                                             double *coefficient);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTOCASCADE_H */
