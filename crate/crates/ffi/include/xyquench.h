#ifndef XYQUENCH_H
#define XYQUENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum XyqStatus {
  XYQ_STATUS_OK = 0,
  XYQ_STATUS_NULL_POINTER = 1,
  XYQ_STATUS_INVALID_ARGUMENT = 2,
  XYQ_STATUS_NON_CONVERGENCE = 3,
  XYQ_STATUS_NO_BRACKET = 4,
  XYQ_STATUS_NON_PHYSICAL = 5,
  XYQ_STATUS_IO = 6,
  XYQ_STATUS_PANIC = 7,
} XyqStatus;

// Status of one scan row.
typedef enum XyqRowStatus {
  XYQ_ROW_STATUS_OK = 0,
  XYQ_ROW_STATUS_NON_CONVERGED = 1,
  XYQ_ROW_STATUS_NON_PHYSICAL = 2,
} XyqRowStatus;

// Opaque quench description: model parameters plus quadrature settings.
typedef struct XyqModel XyqModel;

// Opaque scan result.
typedef struct XyqScan XyqScan;

// Nearest-neighbour correlators and the transverse magnetization.
typedef struct XyqCorrelators {
  double m_z;
  double t_xx;
  double t_yy;
  double t_zz;
  double t_xy;
} XyqCorrelators;

// Correlators together with the derived observables.
typedef struct XyqObservables {
  struct XyqCorrelators correlators;
  double log_negativity;
  double energy;
} XyqObservables;

// Outcome of the energy-matching solve.
typedef struct XyqBetaMatch {
  // `INFINITY` when the state matches the ground state.
  double beta;
  double quench_energy;
  double eq_energy_at_beta;
  double residual;
  size_t iterations;
} XyqBetaMatch;

// One row of a scan. Fields are `NAN` where the row carries no value.
typedef struct XyqScanRow {
  double axis_value;
  struct XyqObservables observables;
  double m_z_equilibrium;
  double log_negativity_equilibrium;
  enum XyqRowStatus status;
} XyqScanRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *xyq_version(void);

// Message describing the last failure on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *xyq_last_error_message(void);

// Creates a quench handle with default tolerances.
enum XyqStatus xyq_model_new(double gamma,
                             double field_a,
                             double field_b,
                             double alpha,
                             struct XyqModel **out);

// Releases a handle from [`xyq_model_new`]. NULL is ignored.
void xyq_model_free(struct XyqModel *model);

// Overrides the quadrature tolerances and subdivision budget.
enum XyqStatus xyq_model_set_tolerances(struct XyqModel *model,
                                        double abs_tol,
                                        double rel_tol,
                                        size_t max_subdivisions);

// Overrides the energy residual tolerance of [`xyq_match_beta`].
enum XyqStatus xyq_model_set_solver_tolerance(struct XyqModel *model, double solver_tol);

// Thermal-state observables at inverse temperature `beta` and field `h`.
enum XyqStatus xyq_equilibrium(double gamma, double beta, double h, struct XyqObservables *out);

// Observables of the evolved state at time `t >= 0`.
enum XyqStatus xyq_quench_observables(const struct XyqModel *model,
                                      double t,
                                      struct XyqObservables *out);

// Inverse temperature whose equilibrium energy at the final field equals
// the conserved post-quench energy.
enum XyqStatus xyq_match_beta(const struct XyqModel *model, struct XyqBetaMatch *out);

// Logarithmic negativity of the two-site state built from `correlators`.
enum XyqStatus xyq_log_negativity(const struct XyqCorrelators *correlators, double *out);

// Time series over the inclusive grid `start, start + step, ..., stop`.
enum XyqStatus xyq_time_series(const struct XyqModel *model,
                               double start,
                               double stop,
                               double step,
                               struct XyqScan **out);

// Number of rows in a scan; 0 for NULL.
size_t xyq_scan_len(const struct XyqScan *scan);

// Copies row `index` of a scan.
enum XyqStatus xyq_scan_row(const struct XyqScan *scan, size_t index, struct XyqScanRow *out);

// Releases a scan. NULL is ignored.
void xyq_scan_free(struct XyqScan *scan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XYQUENCH_H */
