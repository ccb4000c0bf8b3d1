#ifndef SPINWRITHE_H
#define SPINWRITHE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwStatus {
  SW_STATUS_OK = 0,
  SW_STATUS_NULL_POINTER = 1,
  SW_STATUS_INVALID_ARGUMENT = 2,
  SW_STATUS_VALIDATION = 3,
  SW_STATUS_IO = 4,
  SW_STATUS_NUMERICAL = 5,
  SW_STATUS_PANIC = 6,
} SwStatus;

/**
 * Opaque space curve.
 */
typedef struct SwCurve SwCurve;

/**
 * Opaque spin field.
 */
typedef struct SwField SwField;

typedef struct SwObservables {
  double energy;
  double momentum;
  double magnetization;
  double writhe;
} SwObservables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sw_last_error_message(void);

/**
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
enum SwStatus sw_field_from_json(const char *json, struct SwField **out);

/**
 * Serializes a field; release the string with [`sw_string_free`].
 *
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_field_to_json(const struct SwField *field, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void sw_string_free(char *s);

/**
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_field_ground(double s_min, double s_max, size_t n, struct SwField **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_field_twist(double s_min,
                             double s_max,
                             size_t n,
                             double theta0,
                             double w,
                             double dphi,
                             double w_phi,
                             double s0,
                             struct SwField **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_field_random(double s_min,
                              double s_max,
                              size_t n,
                              uint64_t seed,
                              size_t modes,
                              double amplitude,
                              struct SwField **out);

/**
 * # Safety
 * `field` must be null or a handle from this library, freed once.
 */
void sw_field_free(struct SwField *field);

/**
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_field_len(const struct SwField *field, size_t *out);

/**
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_field_observables(const struct SwField *field,
                                   double coupling,
                                   struct SwObservables *out);

/**
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_writhe_angular(const struct SwField *field, double *out);

/**
 * Local writhe relative to the ground state on the same grid.
 *
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_writhe_fuller(const struct SwField *field, double *out);

/**
 * # Safety
 * `field` must come from this library; `out` must be writable.
 */
enum SwStatus sw_curve_from_field(const struct SwField *field, struct SwCurve **out);

/**
 * Closes an open curve at infinity into a new handle.
 *
 * # Safety
 * `curve` must come from this library; `out` must be writable.
 */
enum SwStatus sw_curve_close(const struct SwCurve *curve,
                             double radius_factor,
                             struct SwCurve **out);

/**
 * # Safety
 * `curve` must come from this library; `out` must be writable.
 */
enum SwStatus sw_curve_len(const struct SwCurve *curve, size_t *out);

/**
 * # Safety
 * `curve` must come from this library; `out` must be writable.
 */
enum SwStatus sw_curve_is_closed(const struct SwCurve *curve, bool *out);

/**
 * Copies vertex coordinates as `x0 y0 z0 x1 ...` into `buf`, which must
 * hold `3 * len` doubles.
 *
 * # Safety
 * `curve` must come from this library; `buf` must hold `cap` doubles.
 */
enum SwStatus sw_curve_points(const struct SwCurve *curve, double *buf, size_t cap);

/**
 * Gauss writhe of a closed curve (single-threaded).
 *
 * # Safety
 * `curve` must come from this library; `out` must be writable.
 */
enum SwStatus sw_curve_writhe(const struct SwCurve *curve, double *out);

/**
 * # Safety
 * `curve` must be null or a handle from this library, freed once.
 */
void sw_curve_free(struct SwCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINWRITHE_H */
