#ifndef PARAMOSC_H
#define PARAMOSC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ParamoscMode {
  PARAMOSC_MODE_MINUS = 0,
  PARAMOSC_MODE_PLUS = 1,
} ParamoscMode;

typedef enum ParamoscStatus {
  PARAMOSC_STATUS_OK = 0,
  PARAMOSC_STATUS_NULL_POINTER = 1,
  PARAMOSC_STATUS_INVALID_PARAMETER = 2,
  PARAMOSC_STATUS_INVALID_CONFIG = 3,
  /**
   * Integration failed: step underflow, non-finite values, drift abort.
   */
  PARAMOSC_STATUS_INTEGRATION_FAILURE = 4,
  PARAMOSC_STATUS_OUT_OF_RANGE = 5,
  /**
   * Quantity undefined for the given state (singular or non-normalisable).
   */
  PARAMOSC_STATUS_DOMAIN = 6,
  PARAMOSC_STATUS_PANIC = 7,
} ParamoscStatus;

/**
 * Both normal-mode trajectories of a scenario.
 */
typedef struct ParamoscEvolution ParamoscEvolution;

/**
 * Validated drive parameters.
 */
typedef struct ParamoscScenario ParamoscScenario;

/**
 * Integrator settings. `fixed_step > 0` selects fixed-step RK4, otherwise
 * the adaptive Dormand–Prince pair is used.
 */
typedef struct ParamoscIntegrator {
  double rel_tol;
  double abs_tol;
  double max_step;
  double initial_step;
  double fixed_step;
} ParamoscIntegrator;

typedef struct ParamoscComplex {
  double re;
  double im;
} ParamoscComplex;

typedef struct ParamoscFloquet {
  /**
   * Row-major one-period monodromy matrix.
   */
  double monodromy[4];
  double trace;
  double det;
  /**
   * Canonical-time Floquet exponent.
   */
  struct ParamoscComplex exponent;
  bool stable;
  bool marginal;
} ParamoscFloquet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *paramosc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`) and returns the length the full message
 * needs, including the terminator. Pass a null `buf` to query the length.
 *
 * # Safety
 * `buf` must be null or point to at least `len` writable bytes.
 */
size_t paramosc_last_error_message(char *buf, size_t len);

/**
 * Fills `out` with the default adaptive settings.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum ParamoscStatus paramosc_integrator_default(struct ParamoscIntegrator *out);

/**
 * # Safety
 * `out` must be null or valid for writes. On success `*out` owns a handle
 * to release with [`paramosc_scenario_free`].
 */
enum ParamoscStatus paramosc_scenario_new(double omega,
                                          double g,
                                          double delta_g,
                                          double drive_freq,
                                          double t0,
                                          struct ParamoscScenario **out);

/**
 * # Safety
 * `s` must be null or a handle from [`paramosc_scenario_new`] not yet freed.
 */
void paramosc_scenario_free(struct ParamoscScenario *s);

/**
 * `γ(t) = g + Δg·cos Ωt`.
 *
 * # Safety
 * `s` must be a live scenario handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_scenario_coupling_at(const struct ParamoscScenario *s,
                                                  double t,
                                                  double *out);

/**
 * `ε∓²(t) = ω² ∓ 2ωγ(t)`; may be negative.
 *
 * # Safety
 * `s` must be a live scenario handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_scenario_mode_frequency_squared(const struct ParamoscScenario *s,
                                                             enum ParamoscMode mode,
                                                             double t,
                                                             double *out);

/**
 * Canonical Mathieu parameters `(a, b)` of one mode.
 *
 * # Safety
 * `s` must be a live scenario handle, `a` and `b` valid for writes.
 */
enum ParamoscStatus paramosc_scenario_mathieu_params(const struct ParamoscScenario *s,
                                                     enum ParamoscMode mode,
                                                     double *a,
                                                     double *b);

/**
 * Monodromy and Floquet data of `f'' + (a − 2b·cos 2τ)f = 0`. A null `cfg`
 * selects the default integrator.
 *
 * # Safety
 * `cfg` must be null or valid for reads, `out` valid for writes.
 */
enum ParamoscStatus paramosc_monodromy(double a,
                                       double b,
                                       const struct ParamoscIntegrator *cfg,
                                       struct ParamoscFloquet *out);

/**
 * Evolves both normal modes from their thermal seeds up to `t_end`.
 *
 * # Safety
 * `s` must be a live scenario handle, `cfg` null or valid for reads, `out`
 * valid for writes. On success `*out` must be released with
 * [`paramosc_evolution_free`].
 */
enum ParamoscStatus paramosc_evolution_new(const struct ParamoscScenario *s,
                                           double t_end,
                                           const struct ParamoscIntegrator *cfg,
                                           struct ParamoscEvolution **out);

/**
 * # Safety
 * `e` must be null or a handle from [`paramosc_evolution_new`] not yet freed.
 */
void paramosc_evolution_free(struct ParamoscEvolution *e);

/**
 * `B(t)` and `Ḃ(t)` of one mode.
 *
 * # Safety
 * `e` must be a live evolution handle, `b` and `bdot` valid for writes.
 */
enum ParamoscStatus paramosc_evolution_state(const struct ParamoscEvolution *e,
                                             enum ParamoscMode mode,
                                             double t,
                                             struct ParamoscComplex *b,
                                             struct ParamoscComplex *bdot);

/**
 * `ξ∓ = −iḂ∓/B∓` at `t`.
 *
 * # Safety
 * `e` must be a live evolution handle, outputs valid for writes.
 */
enum ParamoscStatus paramosc_evolution_xi(const struct ParamoscEvolution *e,
                                          double t,
                                          struct ParamoscComplex *xi_minus,
                                          struct ParamoscComplex *xi_plus);

/**
 * Linear entropy `1 − tr ρ²` of either oscillator at `t`.
 *
 * # Safety
 * `e` must be a live evolution handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_evolution_linear_entropy(const struct ParamoscEvolution *e,
                                                      double t,
                                                      double *out);

/**
 * Purity computed from the Wigner quadratic form, independent of the
 * linear-entropy formula.
 *
 * # Safety
 * `e` must be a live evolution handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_evolution_purity_from_wigner(const struct ParamoscEvolution *e,
                                                          double t,
                                                          double *out);

/**
 * Reduced-state Wigner function `W(q, p)` at `t`.
 *
 * # Safety
 * `e` must be a live evolution handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_evolution_wigner(const struct ParamoscEvolution *e,
                                              double t,
                                              double q,
                                              double p,
                                              double *out);

/**
 * Joint ground-state density `|Ψ₀₀(x₁, x₂, t)|²`.
 *
 * # Safety
 * `e` must be a live evolution handle, `out` valid for writes.
 */
enum ParamoscStatus paramosc_evolution_joint_density(const struct ParamoscEvolution *e,
                                                     double x1,
                                                     double x2,
                                                     double t,
                                                     double *out);

/**
 * Gaussian von Neumann entropy for a given purity in (0, 1].
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum ParamoscStatus paramosc_von_neumann_entropy(double purity, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAMOSC_H */
