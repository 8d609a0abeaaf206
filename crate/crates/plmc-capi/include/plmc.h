/* C interface to the projected Langevin sampling library. */

#ifndef PLMC_H
#define PLMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Call outcome. `PLMC_STATUS_INVALID_ARGUMENT` marks inputs the library
// refused (null pointers, shape mismatches, parameters off their domain);
// `PLMC_STATUS_RUNTIME_ERROR` marks failures during a computation that
// started with valid inputs.
typedef enum PlmcStatus {
  PLMC_STATUS_OK = 0,
  PLMC_STATUS_RUNTIME_ERROR = 1,
  PLMC_STATUS_INVALID_ARGUMENT = 2,
} PlmcStatus;

// Opaque convex body handle.
typedef struct PlmcBody PlmcBody;

// Opaque potential handle.
typedef struct PlmcPotential PlmcPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or an empty string.
// The pointer stays valid until the next failing call on the same thread.
const char *plmc_last_error(void);

// Library version as a static string.
const char *plmc_version(void);

// Identifier of the random number stream layout, for reproducibility
// records. Static string.
const char *plmc_generator_id(void);

// Creates the unconstrained body of the given dimension.
//
// # Safety
// `out` must be a valid pointer to a `PlmcBody*`.
enum PlmcStatus plmc_body_whole_space(size_t dim, struct PlmcBody **out);

// Creates a Euclidean ball.
//
// # Safety
// `center` must point to `dim` doubles; `out` must be a valid pointer.
enum PlmcStatus plmc_body_ball(const double *center,
                               size_t dim,
                               double radius,
                               struct PlmcBody **out);

// Creates an axis-aligned box with the given corner bounds.
//
// # Safety
// `lower` and `upper` must point to `dim` doubles; `out` must be valid.
enum PlmcStatus plmc_body_box(const double *lower,
                              const double *upper,
                              size_t dim,
                              struct PlmcBody **out);

// Creates an intersection of halfspaces `normals[i] . x <= offsets[i]`.
// `normals` is row-major `count x dim`; `interior` must satisfy every
// constraint strictly.
//
// # Safety
// `normals` must point to `count * dim` doubles, `offsets` to `count`,
// `interior` to `dim`; `out` must be valid.
enum PlmcStatus plmc_body_halfspaces(const double *normals,
                                     const double *offsets,
                                     size_t count,
                                     size_t dim,
                                     const double *interior,
                                     struct PlmcBody **out);

// Frees a body handle. Null is a no-op.
//
// # Safety
// `body` must be null or a pointer returned by a `plmc_body_*` constructor,
// not freed before.
void plmc_body_free(struct PlmcBody *body);

// Writes the body's dimension.
//
// # Safety
// `body` must be a live handle; `out` must be valid.
enum PlmcStatus plmc_body_dim(const struct PlmcBody *body, size_t *out);

// Projects `x` onto the body, writing the `dim` coordinates to `out`.
//
// # Safety
// `x` and `out` must point to `dim` doubles; `body` must be a live handle.
enum PlmcStatus plmc_body_project(const struct PlmcBody *body,
                                  const double *x,
                                  size_t dim,
                                  double *out);

// Writes 1 to `out` when `x` lies in the body within `tol`, else 0.
//
// # Safety
// `x` must point to `dim` doubles; `body` must be live; `out` valid.
enum PlmcStatus plmc_body_contains(const struct PlmcBody *body,
                                   const double *x,
                                   size_t dim,
                                   double tol,
                                   int *out);

// Writes the distance from `x` to the body's boundary (infinity for the
// unconstrained body). Fails when `x` is outside.
//
// # Safety
// `x` must point to `dim` doubles; `body` must be live; `out` valid.
enum PlmcStatus plmc_body_boundary_distance(const struct PlmcBody *body,
                                            const double *x,
                                            size_t dim,
                                            double *out);

// Creates the zero potential.
//
// # Safety
// `out` must be a valid pointer.
enum PlmcStatus plmc_potential_zero(size_t dim, struct PlmcPotential **out);

// Creates the linear potential `c . x`.
//
// # Safety
// `c` must point to `dim` doubles; `out` must be valid.
enum PlmcStatus plmc_potential_linear(const double *c, size_t dim, struct PlmcPotential **out);

// Creates `max_i (a_i . x + b_i)`. `pieces` is row-major `count x (dim+1)`,
// each row the slope `a_i` followed by the intercept `b_i`.
//
// # Safety
// `pieces` must point to `count * (dim + 1)` doubles; `out` must be valid.
enum PlmcStatus plmc_potential_affine_max(const double *pieces,
                                          size_t count,
                                          size_t dim,
                                          struct PlmcPotential **out);

// Creates `slope * |x - center|`.
//
// # Safety
// `center` must point to `dim` doubles; `out` must be valid.
enum PlmcStatus plmc_potential_scaled_norm(const double *center,
                                           size_t dim,
                                           double slope,
                                           struct PlmcPotential **out);

// Creates `(alpha/2) |x|^2`.
//
// # Safety
// `out` must be a valid pointer.
enum PlmcStatus plmc_potential_quadratic(size_t dim, double alpha, struct PlmcPotential **out);

// Pins the potential's infimum over the intended body, making downstream
// normalizations exact.
//
// # Safety
// `potential` must be a live handle.
enum PlmcStatus plmc_potential_set_known_infimum(struct PlmcPotential *potential, double value);

// Frees a potential handle. Null is a no-op.
//
// # Safety
// `potential` must be null or a pointer returned by a `plmc_potential_*`
// constructor, not freed before.
void plmc_potential_free(struct PlmcPotential *potential);

// Evaluates the potential at `x`.
//
// # Safety
// `x` must point to `dim` doubles; `potential` must be live; `out` valid.
enum PlmcStatus plmc_potential_value(const struct PlmcPotential *potential,
                                     const double *x,
                                     size_t dim,
                                     double *out);

// Writes the minimum-norm subgradient of the potential at `x` into `out`
// (`dim` doubles).
//
// # Safety
// `x` and `out` must point to `dim` doubles; `potential` must be live.
enum PlmcStatus plmc_potential_subgradient(const struct PlmcPotential *potential,
                                           const double *x,
                                           size_t dim,
                                           double *out);

// Writes the potential's Lipschitz constant over the body.
//
// # Safety
// `potential` and `body` must be live handles; `out` must be valid.
enum PlmcStatus plmc_potential_lipschitz(const struct PlmcPotential *potential,
                                         const struct PlmcBody *body,
                                         double *out);

// Runs the projected sampler for `steps` steps from `x0` and writes the
// final point to `out_final` (`dim` doubles). Deterministic in
// `(seed, replica_id)`. Fails with `PLMC_STATUS_INVALID_ARGUMENT` when the
// start is outside the body or `eta >= n / L^2`.
//
// # Safety
// `x0` and `out_final` must point to `dim` doubles; handles must be live.
enum PlmcStatus plmc_run(const struct PlmcBody *body,
                         const struct PlmcPotential *potential,
                         const double *x0,
                         size_t dim,
                         double eta,
                         uint64_t steps,
                         uint64_t seed,
                         uint64_t replica_id,
                         double *out_final);

// Writes the per-step discretization bound on `(1/n) W2^2` between the
// sampler after `k` steps of size `eta` and the reflected diffusion at time
// `k eta`.
//
// # Safety
// `out` must be a valid pointer.
enum PlmcStatus plmc_discretization_bound(size_t n,
                                          uint64_t k,
                                          double eta,
                                          double l,
                                          double sigma0,
                                          double r0,
                                          double *out);

// Writes the `(1/n) W2^2` mixing bound after `k` steps of size `eta` for a
// target with log-Sobolev constant `c_ls`.
//
// # Safety
// `out` must be a valid pointer.
enum PlmcStatus plmc_logsob_bound(size_t n,
                                  uint64_t k,
                                  double eta,
                                  double c_ls,
                                  double r0,
                                  double sigma0,
                                  double l,
                                  double *out);

// Computes the step size and iteration count reaching `(1/n) W2^2 <= eps`
// under a log-Sobolev constant, writing them to `out_eta` and `out_k`.
// Fails when more than `max_steps` iterations would be needed.
//
// # Safety
// `out_eta` and `out_k` must be valid pointers.
enum PlmcStatus plmc_schedule(size_t n,
                              double l,
                              double r0,
                              double sigma0,
                              double c_ls,
                              double eps,
                              uint64_t max_steps,
                              double *out_eta,
                              uint64_t *out_k);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PLMC_H */
