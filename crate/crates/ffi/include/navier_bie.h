#ifndef NAVIER_BIE_H
#define NAVIER_BIE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Boundary parametrization.
typedef enum NbParamKind {
  // Arc-length resampling with the arc-length formulation.
  NB_PARAM_KIND_ARC = 0,
  // The analytic parametrization with the general formulation.
  NB_PARAM_KIND_NATURAL = 1,
} NbParamKind;

// Linear solver.
typedef enum NbSolver {
  // LU with partial pivoting.
  NB_SOLVER_DIRECT = 0,
  // Unrestarted GMRES.
  NB_SOLVER_GMRES = 1,
} NbSolver;

// Result codes of every fallible call.
typedef enum NbStatus {
  // Success.
  NB_STATUS_OK = 0,
  // A required pointer argument was null.
  NB_STATUS_NULL_POINTER = 1,
  // Invalid input (unknown geometry, bad N, bad parameters, non-UTF-8 string).
  NB_STATUS_INVALID_ARGUMENT = 2,
  // Numerical breakdown (eigen/SVD failure, non-finite values, reparametrization).
  NB_STATUS_NUMERICAL = 3,
  // The direct solver met a numerically zero pivot.
  NB_STATUS_SINGULAR_SYSTEM = 4,
  // GMRES did not reach the tolerance.
  NB_STATUS_NON_CONVERGENCE = 5,
  // An evaluation point lies inside the scatterer.
  NB_STATUS_INTERIOR_POINT = 6,
  // An evaluation point lies within the near-field exclusion band.
  NB_STATUS_NEAR_FIELD = 7,
  // A Rust panic was caught at the boundary.
  NB_STATUS_PANIC = 8,
  // File-system failure.
  NB_STATUS_IO = 9,
} NbStatus;

// Opaque problem handle: boundary, parameters, formulation and source.
typedef struct NbProblem NbProblem;

// Opaque handle to a solved problem.
typedef struct NbSolution NbSolution;

// Summary of a solve.
typedef struct NbSolveInfo {
  // Grid size `N` (the system has `2N` unknowns).
  size_t n;
  // GMRES matrix–vector products (0 for the direct solver).
  size_t iterations;
  // Achieved relative residual.
  double residual;
  // Assembly wall time in milliseconds.
  double assemble_ms;
  // Solve wall time in milliseconds.
  double solve_ms;
} NbSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *nb_version(void);

// Message of the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *nb_last_error_message(void);

// Creates a problem on a built-in geometry (`"ellipse"`, `"kite"`, `"cavity"`)
// with Lamé constants `lambda`, `mu` at frequency `omega`. `eps <= 0` selects
// the default complexification. The point source starts at the geometry's
// default interior location with polarization `(1, 1)`.
enum NbStatus nb_problem_new_builtin(const char *geometry,
                                     enum NbParamKind kind,
                                     double omega,
                                     double lambda,
                                     double mu,
                                     double eps,
                                     struct NbProblem **out);

// Moves the interior point source to `(x, y)`.
enum NbStatus nb_problem_set_source(struct NbProblem *problem, double x, double y);

// Enables (`true`) or disables the regularizer.
enum NbStatus nb_problem_set_regularized(struct NbProblem *problem, bool regularized);

// Releases a problem handle (null is ignored).
void nb_problem_free(struct NbProblem *problem);

// Assembles and solves the `N`-point system (`tol` is the GMRES tolerance).
enum NbStatus nb_solve(const struct NbProblem *problem,
                       size_t n,
                       enum NbSolver solver,
                       double tol,
                       struct NbSolution **out);

// Fills `info` with the solve summary.
enum NbStatus nb_solution_info(const struct NbSolution *solution, struct NbSolveInfo *info);

// Evaluates the scattered displacement at `count` points (`points`: `2·count`
// doubles) into `out` (`4·count` doubles).
enum NbStatus nb_solution_evaluate(const struct NbSolution *solution,
                                   const double *points,
                                   size_t count,
                                   double *out);

// Max error against the exact point-source field over `count` points on the
// circle of radius `radius`.
enum NbStatus nb_solution_farfield_error(const struct NbSolution *solution,
                                         size_t count,
                                         double radius,
                                         double *out);

// Releases a solution handle (null is ignored).
void nb_solution_free(struct NbSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NAVIER_BIE_H */
