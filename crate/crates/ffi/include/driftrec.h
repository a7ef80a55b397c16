#ifndef DRIFTREC_H
#define DRIFTREC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum DriftrecStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidParameter = 2,
  Unstable = 3,
  Singular = 4,
  NumericalFailure = 5,
  BudgetExhausted = 6,
  DimensionMismatch = 7,
} DriftrecStatus;

/**
 * Opaque stationary covariance.
 */
typedef struct DriftrecCovariance DriftrecCovariance;

/**
 * Opaque drift matrix.
 */
typedef struct DriftrecMatrix DriftrecMatrix;

/**
 * Opaque sampled trajectory.
 */
typedef struct DriftrecTrajectory DriftrecTrajectory;

/**
 * Assumption diagnostics for one row (plain struct, caller-owned).
 */
typedef struct DriftrecAssumptions {
  double c_min;
  double alpha;
  double rho_min;
  /**
   * Discrete stability constant; NaN when no step size was supplied.
   */
  double d;
  uintptr_t support_size;
  double theta_min;
} DriftrecAssumptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a sparse-shift drift matrix: -shift*I plus Bernoulli(k/p) entries.
 */
enum DriftrecStatus driftrec_matrix_sparse_shift(uintptr_t p,
                                                 uintptr_t k,
                                                 double shift,
                                                 uint64_t seed,
                                                 struct DriftrecMatrix **out);

/**
 * Creates a signed k-regular drift matrix with entry magnitude theta_min.
 */
enum DriftrecStatus driftrec_matrix_signed_regular(uintptr_t p,
                                                   uintptr_t k,
                                                   double theta_min,
                                                   double rho,
                                                   uint64_t seed,
                                                   struct DriftrecMatrix **out);

/**
 * Creates a shifted graph-Laplacian drift matrix over a random
 * degree-bounded graph.
 */
enum DriftrecStatus driftrec_matrix_laplacian(uintptr_t p,
                                              uintptr_t k,
                                              double m,
                                              uint64_t seed,
                                              struct DriftrecMatrix **out);

/**
 * Wraps caller-supplied row-major data (copied) as a drift matrix.
 */
enum DriftrecStatus driftrec_matrix_from_data(uintptr_t p,
                                              const double *data,
                                              struct DriftrecMatrix **out);

uintptr_t driftrec_matrix_dim(const struct DriftrecMatrix *matrix);

/**
 * Copies the matrix into `out` (row-major, length p*p).
 */
enum DriftrecStatus driftrec_matrix_copy_data(const struct DriftrecMatrix *matrix, double *out);

void driftrec_matrix_free(struct DriftrecMatrix *matrix);

/**
 * Solves the continuous Lyapunov equation for the stationary covariance.
 */
enum DriftrecStatus driftrec_solve_continuous(const struct DriftrecMatrix *matrix,
                                              struct DriftrecCovariance **out);

/**
 * Solves the discrete-model stationary covariance at step eta.
 */
enum DriftrecStatus driftrec_solve_discrete(const struct DriftrecMatrix *matrix,
                                            double eta,
                                            struct DriftrecCovariance **out);

/**
 * Copies the covariance into `out` (row-major, length p*p).
 */
enum DriftrecStatus driftrec_covariance_copy_data(const struct DriftrecCovariance *cov,
                                                  double *out);

void driftrec_covariance_free(struct DriftrecCovariance *cov);

/**
 * Evaluates the recovery assumptions for one row. Pass eta <= 0 for the
 * continuous model.
 */
enum DriftrecStatus driftrec_check_assumptions(const struct DriftrecMatrix *matrix,
                                               const struct DriftrecCovariance *cov,
                                               uintptr_t row,
                                               double eta,
                                               struct DriftrecAssumptions *out);

/**
 * Simulates n transitions of the discrete model from a stationary start.
 */
enum DriftrecStatus driftrec_simulate_discrete(const struct DriftrecMatrix *matrix,
                                               double eta,
                                               uintptr_t n,
                                               uint64_t seed,
                                               struct DriftrecTrajectory **out);

/**
 * Number of stored states (transitions + 1).
 */
uintptr_t driftrec_trajectory_len(const struct DriftrecTrajectory *traj);

/**
 * Copies state row `t` into `out` (length p).
 */
enum DriftrecStatus driftrec_trajectory_state(const struct DriftrecTrajectory *traj,
                                              uintptr_t t,
                                              double *out);

void driftrec_trajectory_free(struct DriftrecTrajectory *traj);

/**
 * l1-regularized estimation of the signed support from a trajectory under
 * the linear basis. `signs_out` (length p*p, row-major) receives -1/0/+1;
 * `coeffs_out` may be null or length p*p.
 */
enum DriftrecStatus driftrec_recover_linear(const struct DriftrecTrajectory *traj,
                                            double lambda,
                                            int8_t *signs_out,
                                            double *coeffs_out);

/**
 * Smallest eigenvalue of -(Theta + Theta*)/2; positive means stable.
 */
enum DriftrecStatus driftrec_stability_margin(const struct DriftrecMatrix *matrix, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DRIFTREC_H */
