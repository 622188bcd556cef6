#ifndef RECTNERVE_H
#define RECTNERVE_H

/* Generated by cbindgen from src/lib.rs; edits are overwritten. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RnSolveStatus {
  RN_SOLVE_STATUS_SAT = 0,
  RN_SOLVE_STATUS_UNSAT = 1,
  RN_SOLVE_STATUS_TIMEOUT = 2,
} RnSolveStatus;

/**
 * Result code of every fallible call.
 */
typedef enum RnStatus {
  RN_STATUS_OK = 0,
  RN_STATUS_NULL_POINTER = 1,
  RN_STATUS_INVALID_UTF8 = 2,
  RN_STATUS_PARSE = 3,
  RN_STATUS_INVALID_PARTITION = 4,
  RN_STATUS_INVALID_PROJECTION = 5,
  RN_STATUS_UNSUPPORTED = 6,
  RN_STATUS_INVALID_ARGUMENT = 7,
  RN_STATUS_INTERNAL = 99,
} RnStatus;

typedef enum RnVerdict {
  RN_VERDICT_EMBEDDING = 0,
  RN_VERDICT_NOT_EMBEDDING = 1,
  RN_VERDICT_UNSUPPORTED = 2,
} RnVerdict;

/**
 * The dual complex of a partition.
 */
typedef struct RnDual RnDual;

/**
 * A validated box partition.
 */
typedef struct RnPartition RnPartition;

/**
 * Vertex placement of a dual complex, coordinates doubled.
 */
typedef struct RnProjection RnProjection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *rn_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rn_string_free(char *s);

/**
 * Parse and validate a partition in the text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum RnStatus rn_partition_parse(const char *src, struct RnPartition **out);

/**
 * # Safety
 * `p` must come from `rn_partition_parse` and not have been freed.
 */
void rn_partition_free(struct RnPartition *p);

/**
 * Number of boxes, 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
uintptr_t rn_partition_len(const struct RnPartition *p);

/**
 * Dimension, 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
uintptr_t rn_partition_dim(const struct RnPartition *p);

/**
 * Serialize a partition; free the result with `rn_string_free`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum RnStatus rn_partition_to_text(const struct RnPartition *p, char **out);

/**
 * Build the dual complex.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum RnStatus rn_dual_build(const struct RnPartition *p, struct RnDual **out);

/**
 * # Safety
 * `d` must come from `rn_dual_build` and not have been freed.
 */
void rn_dual_free(struct RnDual *d);

/**
 * Number of `k`-simplices, 0 for NULL or `k` above the dimension.
 *
 * # Safety
 * `d` must be NULL or a live handle.
 */
uintptr_t rn_dual_count(const struct RnDual *d, uintptr_t k);

/**
 * Dump the dual complex in the text format.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum RnStatus rn_dual_to_text(const struct RnDual *d, char **out);

/**
 * Parse a projection of `dim`-dimensional points.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum RnStatus rn_projection_parse(const char *src, uintptr_t dim, struct RnProjection **out);

/**
 * Every box to its center.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum RnStatus rn_projection_center(const struct RnPartition *p, struct RnProjection **out);

/**
 * # Safety
 * `pr` must be a live handle; `out` must be writable.
 */
enum RnStatus rn_projection_to_text(const struct RnProjection *pr, char **out);

/**
 * # Safety
 * `pr` must come from this library and not have been freed.
 */
void rn_projection_free(struct RnProjection *pr);

/**
 * Orientation test of a projection against the dual of `p`.
 *
 * # Safety
 * All handles must be live; `verdict` must be writable.
 */
enum RnStatus rn_check(const struct RnPartition *p,
                       const struct RnDual *d,
                       const struct RnProjection *pr,
                       enum RnVerdict *verdict);

/**
 * Search for a half-integral embedding. `node_limit` 0 keeps the default.
 * On `Sat`, `*certificate` receives a projection the caller frees;
 * otherwise it is set to NULL.
 *
 * # Safety
 * `p` must be a live handle; `status` and `certificate` must be writable.
 */
enum RnStatus rn_solve(const struct RnPartition *p,
                       uint64_t node_limit,
                       enum RnSolveStatus *status,
                       struct RnProjection **certificate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECTNERVE_H */
