#ifndef ISODIST_H
#define ISODIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum IsodistStatus {
  ISODIST_STATUS_OK = 0,
  ISODIST_STATUS_DOMAIN = 1,
  ISODIST_STATUS_NON_CONVERGENCE = 2,
  ISODIST_STATUS_BUDGET_EXCEEDED = 3,
  ISODIST_STATUS_DIMENSION_MISMATCH = 4,
  ISODIST_STATUS_EMPTY_SET = 5,
  ISODIST_STATUS_RANGE = 6,
  ISODIST_STATUS_PARSE = 7,
  ISODIST_STATUS_NULL_POINTER = 8,
  ISODIST_STATUS_INVALID_UTF8 = 9,
  ISODIST_STATUS_PANIC = 10,
} IsodistStatus;

/**
 * Body family selector; `p` is read only for [`IsodistFamily::Lp`].
 */
typedef enum IsodistFamily {
  ISODIST_FAMILY_BALL = 0,
  ISODIST_FAMILY_CUBE = 1,
  ISODIST_FAMILY_SIMPLEX = 2,
  ISODIST_FAMILY_LP = 3,
} IsodistFamily;

/**
 * Opaque set of placeholder constants.
 */
typedef struct IsodistConstants IsodistConstants;

/**
 * Opaque batch of uniformly distributed points, stored row-major.
 */
typedef struct IsodistSampleBatch IsodistSampleBatch;

/**
 * Bounds for one family at one `eps`. The `has_*` flags mark which optional
 * fields carry a value.
 */
typedef struct IsodistBoundReport {
  double epsilon;
  double lower;
  double upper;
  double upper_tight;
  bool parametric;
  bool has_exact_limit;
  double exact_limit;
  bool has_witness_distance;
  double witness_distance;
  bool has_manhattan_limit;
  double manhattan_limit;
} IsodistBoundReport;

/**
 * Result of an exhaustive extremal-pair search. Counts saturate at
 * `UINT64_MAX`.
 */
typedef struct IsodistExtremalCheck {
  size_t k;
  size_t n;
  size_t r;
  size_t s;
  size_t brute_max;
  size_t segment_distance;
  bool agree;
  uint64_t search_space;
  uint64_t work;
} IsodistExtremalCheck;

typedef struct IsodistScalingReport {
  size_t n;
  size_t m;
  double eps;
  size_t lower_sum;
  double lattice_value;
  double continuous_target;
} IsodistScalingReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *isodist_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *isodist_version(void);

/**
 * `Φ(a) = ∫_{-∞}^a e^{-πx²} dx`. Total on finite input.
 */
double isodist_phi(double a);

enum IsodistStatus isodist_phi_inv(double eps, double *out);

enum IsodistStatus isodist_psi_p_inv(double eps, double p, double *out);

/**
 * Radius `ω_n` giving the family unit volume in dimension `n` (1 for the cube).
 */
enum IsodistStatus isodist_unit_volume_radius(enum IsodistFamily f,
                                              double p,
                                              size_t n,
                                              double *out);

/**
 * New handle holding the default constants (all 1).
 */
struct IsodistConstants *isodist_constants_new(void);

/**
 * Parses `key=value` lines into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be NULL or a NUL-terminated string; `out` must be NULL or
 * valid for writes.
 */
enum IsodistStatus isodist_constants_parse(const char *text, struct IsodistConstants **out);

/**
 * Sets one constant by key. The handle is left unchanged on failure.
 *
 * # Safety
 * `handle` must come from this library and not be freed; `key` must be a
 * NUL-terminated string.
 */
enum IsodistStatus isodist_constants_set(struct IsodistConstants *handle,
                                         const char *key,
                                         double value);

/**
 * # Safety
 * `handle` must be NULL or a pointer from this library not yet freed.
 */
void isodist_constants_free(struct IsodistConstants *handle);

/**
 * Bounds for `family` at `eps`. `n = 0` skips the witness; `constants` may be
 * NULL for the defaults.
 *
 * # Safety
 * `constants` must be NULL or a live handle; `out` must be valid for writes.
 */
enum IsodistStatus isodist_bound_report(enum IsodistFamily f,
                                        double p,
                                        double eps,
                                        size_t n,
                                        const struct IsodistConstants *constants,
                                        struct IsodistBoundReport *out);

/**
 * Exhaustive extremal-pair check on the lattice `[k]^n`.
 */
enum IsodistStatus isodist_verify_extremal_pairs(size_t k,
                                                 size_t n,
                                                 size_t r,
                                                 size_t s,
                                                 uint64_t budget,
                                                 struct IsodistExtremalCheck *out);

enum IsodistStatus isodist_scaled_max_distance(size_t n,
                                               size_t m,
                                               double eps,
                                               uint64_t budget,
                                               struct IsodistScalingReport *out);

/**
 * Draws `count` uniform points from the unit-volume body into a new batch.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum IsodistStatus isodist_sample_uniform(enum IsodistFamily f,
                                          double p,
                                          size_t n,
                                          size_t count,
                                          uint64_t seed,
                                          struct IsodistSampleBatch **out);

/**
 * Dimension of each point, or 0 for NULL.
 *
 * # Safety
 * `batch` must be NULL or a live handle.
 */
size_t isodist_sample_batch_dim(const struct IsodistSampleBatch *batch);

/**
 * Number of points, or 0 for NULL.
 *
 * # Safety
 * `batch` must be NULL or a live handle.
 */
size_t isodist_sample_batch_len(const struct IsodistSampleBatch *batch);

/**
 * Row-major coordinates, `len * dim` doubles, borrowed from the batch.
 *
 * # Safety
 * `batch` must be NULL or a live handle; the pointer dies with the batch.
 */
const double *isodist_sample_batch_points(const struct IsodistSampleBatch *batch);

/**
 * # Safety
 * `batch` must be NULL or a pointer from this library not yet freed.
 */
void isodist_sample_batch_free(struct IsodistSampleBatch *batch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISODIST_H */
