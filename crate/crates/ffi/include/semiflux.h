#ifndef SEMIFLUX_H
#define SEMIFLUX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfStatus {
  SfStatus_Ok = 0,
  SfStatus_NullPointer = 1,
  SfStatus_InvalidArgument = 2,
  SfStatus_Numerical = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  SfStatus_Panic = 4,
  /**
   * The caller's buffer is too small; the needed length was written.
   */
  SfStatus_BufferTooSmall = 5,
} SfStatus;

typedef enum SfOrientation {
  SfOrientation_Left = 0,
  SfOrientation_Right = 1,
  SfOrientation_Standard = 2,
} SfOrientation;

/**
 * Opaque discretized operator.
 */
typedef struct SfHamiltonian SfHamiltonian;

/**
 * Opaque piecewise function.
 */
typedef struct SfPiecewise SfPiecewise;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t sf_last_error(char *buf, uintptr_t len);

/**
 * `H_L` or `H_R`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SfStatus sf_piecewise_heaviside(enum SfOrientation o, struct SfPiecewise **out);

/**
 * `sgn_L` or `sgn_R`; `Standard` gives the two-sided sign.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SfStatus sf_piecewise_sgn(enum SfOrientation o, struct SfPiecewise **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_piecewise_from_json(const char *json, struct SfPiecewise **out);

/**
 * Value at `x`; `*assigned` is false (and `*value` NaN) at an unassigned
 * breakpoint.
 *
 * # Safety
 * All pointers must be valid; `f` must come from this library.
 */
enum SfStatus sf_piecewise_eval(const struct SfPiecewise *f,
                                double x,
                                double *value,
                                bool *assigned);

/**
 * # Safety
 * `f` must come from this library and `out` be valid.
 */
enum SfStatus sf_piecewise_reflect(const struct SfPiecewise *f, struct SfPiecewise **out);

/**
 * # Safety
 * `f` must come from this library and `out` be valid.
 */
enum SfStatus sf_piecewise_extend(const struct SfPiecewise *f,
                                  enum SfOrientation o,
                                  struct SfPiecewise **out);

/**
 * # Safety
 * `f` must be null or come from this library, and not be used afterwards.
 */
void sf_piecewise_free(struct SfPiecewise *f);

/**
 * `⟨f, φ'⟩` for a named test function (`gaussian`, `x-gaussian`,
 * `hermite-gaussian-k`).
 *
 * # Safety
 * `f` must come from this library; `phi` must be NUL-terminated.
 */
enum SfStatus sf_pair_test_derivative(const struct SfPiecewise *f,
                                      const char *phi,
                                      enum SfOrientation o,
                                      double *out);

/**
 * # Safety
 * `f` must come from this library and `out` be valid.
 */
enum SfStatus sf_euler_character(const struct SfPiecewise *f, enum SfOrientation o, int64_t *out);

/**
 * Elliptic operator `(a² - ¼α sgn_o) (i d/dx)²` on `grid_n` nodes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SfStatus sf_hamiltonian_build(double a,
                                   double alpha,
                                   enum SfOrientation o,
                                   uintptr_t grid_n,
                                   double circumference,
                                   struct SfHamiltonian **out);

/**
 * Sorted eigenvalues into `buf`. `*written` receives the count; when
 * `len` is too small nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `h` must come from this library; `buf` must be valid for `len` doubles.
 */
enum SfStatus sf_hamiltonian_spectrum(const struct SfHamiltonian *h,
                                      double *buf,
                                      uintptr_t len,
                                      uintptr_t *written);

/**
 * # Safety
 * `h` must be null or come from this library, and not be used afterwards.
 */
void sf_hamiltonian_free(struct SfHamiltonian *h);

/**
 * `∫ (1/π) ε/(x²+ε²) φ(x) dx` for a named test function.
 *
 * # Safety
 * `phi` must be NUL-terminated and `out` valid.
 */
enum SfStatus sf_regularized_pair(double epsilon, const char *phi, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMIFLUX_H */
