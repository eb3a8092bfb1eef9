#ifndef ULRICH_H
#define ULRICH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Matrix family for [`ulrich_kernel_new`].
 */
typedef enum UlrichKernelFamily {
  ULRICH_KERNEL_FAMILY_STAIRCASE = 0,
  ULRICH_KERNEL_FAMILY_SYM_EULER = 1,
  /**
   * Staircase shape with seeded random coefficients.
   */
  ULRICH_KERNEL_FAMILY_RANDOM = 2,
} UlrichKernelFamily;

/**
 * Result code of every fallible call.
 */
typedef enum UlrichStatus {
  ULRICH_STATUS_OK = 0,
  ULRICH_STATUS_NULL_ARGUMENT = 1,
  ULRICH_STATUS_INVALID_UTF8 = 2,
  ULRICH_STATUS_PARSE_ERROR = 3,
  ULRICH_STATUS_UNSUPPORTED_VARIETY = 4,
  ULRICH_STATUS_UNSUPPORTED_POLARISATION = 5,
  ULRICH_STATUS_NOT_AMPLE = 6,
  ULRICH_STATUS_NOT_VERY_AMPLE = 7,
  ULRICH_STATUS_GENERIC_MODE_UNSUPPORTED = 8,
  ULRICH_STATUS_BAD_TWIST = 9,
  ULRICH_STATUS_BOX_TOO_LARGE = 10,
  ULRICH_STATUS_SCAN_BOX_TOO_SMALL = 11,
  ULRICH_STATUS_NOT_SURJECTIVE = 12,
  ULRICH_STATUS_MISMATCH = 13,
  ULRICH_STATUS_INTERNAL_INCONSISTENCY = 14,
} UlrichStatus;

/**
 * Opaque kernel bundle presentation on `P^n`.
 */
typedef struct UlrichKernel UlrichKernel;

/**
 * Opaque parsed variety.
 */
typedef struct UlrichVariety UlrichVariety;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a variety such as `"F2"` or `"PB(P1;[0],[1])"`. Returns null on
 * failure and stores the reason in `status` (if non-null).
 *
 * # Safety
 * `text` must be null or a valid NUL-terminated string; `status` must be
 * null or writable.
 */
struct UlrichVariety *ulrich_variety_parse(const char *text, enum UlrichStatus *status);

/**
 * # Safety
 * `v` must be null or a handle from [`ulrich_variety_parse`] not yet freed.
 */
void ulrich_variety_free(struct UlrichVariety *v);

/**
 * Dimension of the variety, or -1 for a null handle.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
int32_t ulrich_variety_dim(const struct UlrichVariety *v);

/**
 * Picard rank of the variety, or -1 for a null handle.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
int32_t ulrich_variety_picard_rank(const struct UlrichVariety *v);

/**
 * Canonical text form of the variety; free with [`ulrich_string_free`].
 *
 * # Safety
 * `v` must be null or a live handle.
 */
char *ulrich_variety_to_string(const struct UlrichVariety *v);

/**
 * Cohomology table of a split bundle such as `"{[1,0],[0,-1]}"` as JSON.
 *
 * # Safety
 * `v` must be a live handle, `bundle` a NUL-terminated string, `out` null
 * or writable.
 */
enum UlrichStatus ulrich_cohomology(const struct UlrichVariety *v, const char *bundle, char **out);

/**
 * Ulrich test by definition with respect to the polarisation `pol`; writes
 * the full report as JSON.
 *
 * # Safety
 * `v` must be a live handle, `bundle` and `pol` NUL-terminated strings,
 * `out` null or writable.
 */
enum UlrichStatus ulrich_is_ulrich(const struct UlrichVariety *v,
                                   const char *bundle,
                                   const char *pol,
                                   char **out);

/**
 * Builds a certified kernel presentation on `P^n`. `seed` is used only by
 * the random family. Returns null on failure.
 *
 * # Safety
 * `status` must be null or writable.
 */
struct UlrichKernel *ulrich_kernel_new(enum UlrichKernelFamily family,
                                       uint32_t n,
                                       uint32_t d,
                                       uint64_t seed,
                                       enum UlrichStatus *status);

/**
 * # Safety
 * `k` must be null or a handle from [`ulrich_kernel_new`] not yet freed.
 */
void ulrich_kernel_free(struct UlrichKernel *k);

/**
 * Rank of the kernel bundle, or -1 for a null handle.
 *
 * # Safety
 * `k` must be null or a live handle.
 */
int64_t ulrich_kernel_rank(const struct UlrichKernel *k);

/**
 * Cohomology table of `F(twist)` as JSON.
 *
 * # Safety
 * `k` must be a live handle and `out` null or writable.
 */
enum UlrichStatus ulrich_kernel_cohomology(const struct UlrichKernel *k, int64_t twist, char **out);

/**
 * The presentation (matrix and certificates) as JSON.
 *
 * # Safety
 * `k` must be a live handle and `out` null or writable.
 */
enum UlrichStatus ulrich_kernel_to_json(const struct UlrichKernel *k, char **out);

/**
 * Runs the command line with `argc` arguments (without the program name)
 * and `--json` implied. Standard output goes to `out`; the process-style
 * exit code goes to `exit_code`.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` and
 * `exit_code` must be null or writable.
 */
enum UlrichStatus ulrich_run(const char *const *argv, size_t argc, char **out, int32_t *exit_code);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ulrich_string_free(char *s);

/**
 * Static name of a status code.
 */
const char *ulrich_status_name(enum UlrichStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ULRICH_H */
