#ifndef QCOH_H
#define QCOH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcohStatus {
  QCOH_STATUS_OK = 0,
  QCOH_STATUS_NULL_ARGUMENT = 1,
  QCOH_STATUS_INVALID_UTF8 = 2,
  // Command line arguments were rejected.
  QCOH_STATUS_USAGE = 3,
  QCOH_STATUS_INVALID_INPUT = 4,
  // A division or inversion hit a zero or non-invertible leading term.
  QCOH_STATUS_NUMERIC = 5,
  // The truncation box, window or order is too small for the request.
  QCOH_STATUS_TRUNCATION = 6,
  QCOH_STATUS_NOT_CONVERGED = 7,
  // Internal consistency check failed.
  QCOH_STATUS_INCONSISTENT = 8,
  // A `verify` command ran but at least one check failed.
  QCOH_STATUS_VERIFY_FAILED = 9,
  QCOH_STATUS_PANIC = 10,
} QcohStatus;

// Result of [`qcoh_run`].
typedef struct QcohOutput {
  uint8_t _private[0];
} QcohOutput;

// Rational coefficients produced by [`qcoh_localize`].
typedef struct QcohCoefficients {
  uint8_t _private[0];
} QcohCoefficients;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Runs a command exactly as the `qcoh` binary would, given its arguments
// without the program name (e.g. `{"localize", "--k", "2"}`).
//
// On success, and also when a `verify` command ran but failed, `*out`
// receives a handle to release with [`qcoh_output_free`].
//
// # Safety
// `argv` must point to `argc` valid NUL-terminated strings and `out` must be
// a valid pointer.
enum QcohStatus qcoh_run(size_t argc, const char *const *argv, struct QcohOutput **out);

// Canonical compact JSON of the result, or NULL for a NULL handle.
//
// # Safety
// `o` must be NULL or a live handle from [`qcoh_run`].
const char *qcoh_output_json(const struct QcohOutput *o);

// Human-readable rendering of the result, or NULL for a NULL handle.
//
// # Safety
// `o` must be NULL or a live handle from [`qcoh_run`].
const char *qcoh_output_text(const struct QcohOutput *o);

// False when a verification in the result failed.
//
// # Safety
// `o` must be NULL or a live handle from [`qcoh_run`].
bool qcoh_output_ok(const struct QcohOutput *o);

// # Safety
// `o` must be NULL or a handle from [`qcoh_run`] not yet freed.
void qcoh_output_free(struct QcohOutput *o);

// Localization graph sum for `O(k) + O(-2-k)` over P1 with weight ratio
// `z` (a string such as `"-1/2"`): the `q^1 .. q^d_max` coefficients.
//
// # Safety
// `z` must be a valid NUL-terminated string and `out` a valid pointer.
enum QcohStatus qcoh_localize(uint32_t k,
                              const char *z,
                              uint32_t d_max,
                              struct QcohCoefficients **out);

// # Safety
// `c` must be NULL or a live handle from [`qcoh_localize`].
size_t qcoh_coefficients_len(const struct QcohCoefficients *c);

// The coefficient of `q^(i+1)` as `"num/den"`, or NULL when out of range.
//
// # Safety
// `c` must be NULL or a live handle from [`qcoh_localize`].
const char *qcoh_coefficients_get(const struct QcohCoefficients *c, size_t i);

// # Safety
// `c` must be NULL or a handle from [`qcoh_localize`] not yet freed.
void qcoh_coefficients_free(struct QcohCoefficients *c);

// Message of the last failure on this thread, or NULL.
const char *qcoh_last_error_message(void);

// Engine error kind of the last failure on this thread (e.g.
// `"WindowTooSmall"`), or NULL.
const char *qcoh_last_error_kind(void);

const char *qcoh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCOH_H */
