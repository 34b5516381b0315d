#ifndef FILMGRP_H
#define FILMGRP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FG_SCHEME_GRP 0

#define FG_SCHEME_GODUNOV 1

#define FG_SCHEME_MUSCL 2

typedef enum FgStatus {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_ARGUMENT = 2,
  FG_STATUS_DEGENERATE_STATE = 3,
  FG_STATUS_OUTSIDE_DOMAIN = 4,
  FG_STATUS_NO_ROOT = 5,
  FG_STATUS_CONFIG_MISMATCH = 6,
  FG_STATUS_SINGULAR_SYSTEM = 7,
  FG_STATUS_STATE_SPACE_VIOLATION = 8,
  FG_STATUS_SONIC = 9,
  FG_STATUS_INTERNAL = 10,
} FgStatus;

/**
 * Solved Riemann problem.
 */
typedef struct FgFan FgFan;

/**
 * Grid, scheme settings and current time of a running simulation.
 */
typedef struct FgSimulation FgSimulation;

/**
 * Conserved variables (f, b, g, q).
 */
typedef struct FgState {
  double f;
  double b;
  double g;
  double q;
} FgState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never NULL.
 */
const char *fg_status_message(enum FgStatus status);

/**
 * Writes the physical flux of `state` to `out[0..4]`.
 *
 * # Safety
 * `state` must be readable and `out` must point to four writable doubles.
 */
enum FgStatus fg_flux(const struct FgState *state, double *out);

/**
 * Solves the Riemann problem and stores a new fan handle in `*out`.
 *
 * # Safety
 * `left` and `right` must be readable; `out` must be writable.
 */
enum FgStatus fg_riemann_solve(const struct FgState *left,
                               const struct FgState *right,
                               struct FgFan **out);

/**
 * Exact solution on the ray x/t = `s`.
 *
 * # Safety
 * `fan` must come from [`fg_riemann_solve`] and not be freed; `out` must be writable.
 */
enum FgStatus fg_fan_sample(const struct FgFan *fan, double s, struct FgState *out);

/**
 * Left, middle and right star states, written to `out[0..3]`.
 *
 * # Safety
 * `fan` must be a live handle; `out` must point to three writable states.
 */
enum FgStatus fg_fan_star_states(const struct FgFan *fan, struct FgState *out);

/**
 * Releases a fan handle. NULL is ignored.
 *
 * # Safety
 * `fan` must be NULL or a live handle from [`fg_riemann_solve`].
 */
void fg_fan_free(struct FgFan *fan);

/**
 * Interface state and its time derivative from piecewise-linear data with
 * slopes `dul[0..4]` and `dur[0..4]`.
 *
 * # Safety
 * All pointers must be valid: states readable, slopes four readable doubles,
 * `state_out` writable, `dudt_out` four writable doubles.
 */
enum FgStatus fg_grp_interface(const struct FgState *ul,
                               const double *dul,
                               const struct FgState *ur,
                               const double *dur,
                               struct FgState *state_out,
                               double *dudt_out);

/**
 * Creates a simulation of the built-in case `case_name` with `n` cells
 * (0 keeps the case default) and one of the `FG_SCHEME_*` schemes.
 *
 * # Safety
 * `case_name` must be a NUL-terminated string; `out` must be writable.
 */
enum FgStatus fg_simulation_new(const char *case_name,
                                uint32_t scheme,
                                size_t n,
                                struct FgSimulation **out);

/**
 * Advances to time `t_end`, which must not lie before the current time.
 *
 * # Safety
 * `sim` must be a live handle from [`fg_simulation_new`].
 */
enum FgStatus fg_simulation_advance(struct FgSimulation *sim, double t_end);

/**
 * Number of cells and current time.
 *
 * # Safety
 * `sim` must be a live handle; `n_out` and `t_out` must be writable.
 */
enum FgStatus fg_simulation_info(const struct FgSimulation *sim, size_t *n_out, double *t_out);

/**
 * Copies the cell averages into `buf`, which holds `len` states; `len` must
 * equal the number of cells.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must point to `len` writable states.
 */
enum FgStatus fg_simulation_copy_averages(const struct FgSimulation *sim,
                                          struct FgState *buf,
                                          size_t len);

/**
 * Releases a simulation handle. NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or a live handle from [`fg_simulation_new`].
 */
void fg_simulation_free(struct FgSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FILMGRP_H */
