#ifndef LATMOD_H
#define LATMOD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmLatticeKind {
  /**
   * Integer lattice (square / hypercube fold), any dimension.
   */
  LM_LATTICE_KIND_ZN = 0,
  /**
   * Hexagonal lattice, dimension 2.
   */
  LM_LATTICE_KIND_A2 = 1,
  /**
   * Checkerboard lattice, dimension ≥ 2.
   */
  LM_LATTICE_KIND_DN = 2,
  /**
   * Gosset lattice, dimension 8.
   */
  LM_LATTICE_KIND_E8 = 3,
} LmLatticeKind;

/**
 * Result of every `lm_*` call.
 */
typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  LM_STATUS_INVALID_ARGUMENT = 2,
  LM_STATUS_UNSUPPORTED = 3,
  LM_STATUS_NUMERICAL = 4,
  /**
   * A Rust panic was caught at the boundary; the message says where.
   */
  LM_STATUS_PANIC = 5,
} LmStatus;

/**
 * Opaque lattice handle.
 */
typedef struct LmLattice LmLattice;

/**
 * Geometry of a scaled lattice.
 */
typedef struct LmLatticeInfo {
  size_t dim;
  /**
   * Packing radius; the minimum distance is `2·lambda`.
   */
  double lambda;
  double d_min;
  /**
   * Volume of the Voronoi cell.
   */
  double volume;
  double covering_radius;
  /**
   * Largest coordinate magnitude inside the cell.
   */
  double coordinate_extent;
} LmLatticeInfo;

/**
 * What B²R² needs to know about a record besides its samples.
 */
typedef struct LmRecordInfo {
  /**
   * Sampling rate.
   */
  double fs;
  /**
   * Highest signal frequency.
   */
  double omega_max;
  /**
   * Peak amplitude bound of the unfolded signal.
   */
  double dynamic_range;
  /**
   * Per-coordinate variance of any distortion on the samples; 0 if clean.
   */
  double noise_var;
  /**
   * Relative guard band above `omega_max` left out of the residual (e.g. 0.1).
   */
  double guard;
  /**
   * Fraction of samples at each end assumed fold-free (e.g. 0.04).
   */
  double tail_fraction;
} LmRecordInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next `lm_*` call on the same thread.
 */
const char *lm_last_error(void);

/**
 * Creates a lattice of the given family and dimension with packing radius
 * `lambda`, storing the handle in `*out`.
 *
 * # Safety
 * `kind` must be one of the `LmLatticeKind` values, and `out` null or valid
 * for a pointer write.
 */
enum LmStatus lm_lattice_new(enum LmLatticeKind kind,
                             size_t n,
                             double lambda,
                             struct LmLattice **out);

/**
 * Releases a handle from `lm_lattice_new`. Null is ignored.
 *
 * # Safety
 * `lattice` must be null or a handle not yet freed.
 */
void lm_lattice_free(struct LmLattice *lattice);

/**
 * # Safety
 * `lattice` must be a live handle and `out` valid for a write.
 */
enum LmStatus lm_lattice_info(const struct LmLattice *lattice, struct LmLatticeInfo *out);

/**
 * Writes the lattice point closest to `x` into `out`; both hold `len`
 * values, which must equal the lattice dimension.
 *
 * # Safety
 * `x` must be readable and `out` writable for `len` doubles.
 */
enum LmStatus lm_nearest_point(const struct LmLattice *lattice,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * Splits `x` into `residue + offset` with `offset` the nearest lattice point.
 * Either output may be null if not wanted.
 *
 * # Safety
 * `x` must be readable for `len` doubles; non-null outputs writable for `len`.
 */
enum LmStatus lm_fold(const struct LmLattice *lattice,
                      const double *x,
                      size_t len,
                      double *residue,
                      double *offset);

/**
 * Relevant vectors (facet normals of the Voronoi cell). `*count` receives
 * their number; if `out` is non-null and `capacity` rows suffice, they are
 * written row-major as `count × dim` doubles.
 *
 * # Safety
 * `count` must be writable; `out`, if non-null, writable for
 * `capacity · dim` doubles.
 */
enum LmStatus lm_relevant_vectors(const struct LmLattice *lattice,
                                  double *out,
                                  size_t capacity,
                                  size_t *count);

/**
 * Unfolds a `k × dim` record with sequential B²R². `f_hat` receives the
 * unfolded samples and `p_hat` the lattice offsets; either may be null.
 *
 * # Safety
 * `y` must be readable for `k · dim` doubles, `info` readable, and non-null
 * outputs writable for `k · dim` doubles.
 */
enum LmStatus lm_recover_b2r2(const struct LmLattice *lattice,
                              const double *y,
                              size_t k,
                              const struct LmRecordInfo *info,
                              double *f_hat,
                              double *p_hat);

/**
 * Unfolds a `k × dim` record by `order`-th order differences.
 *
 * # Safety
 * As for `lm_recover_b2r2`.
 */
enum LmStatus lm_recover_hod(const struct LmLattice *lattice,
                             const double *y,
                             size_t k,
                             size_t order,
                             double *f_hat,
                             double *p_hat);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATMOD_H */
