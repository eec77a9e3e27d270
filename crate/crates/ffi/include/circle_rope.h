#ifndef CIRCLE_ROPE_H
#define CIRCLE_ROPE_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stddef.h>
#include <stdint.h>

typedef enum CrConvention {
  CR_CONVENTION_SCALAR = 0,
  CR_CONVENTION_PLANAR = 1,
  CR_CONVENTION_EUCLIDEAN = 2,
} CrConvention;

typedef enum CrModality {
  CR_MODALITY_TEXT = 0,
  CR_MODALITY_IMAGE = 1,
} CrModality;

typedef enum CrRadiusKind {
  CR_RADIUS_KIND_FIXED = 0,
  CR_RADIUS_KIND_AUTO = 1,
} CrRadiusKind;

typedef enum CrScheme {
  CR_SCHEME_HARD = 0,
  CR_SCHEME_UNORDERED = 1,
  CR_SCHEME_SPATIAL = 2,
  CR_SCHEME_CIRCLE = 3,
} CrScheme;

typedef enum CrStage {
  CR_STAGE_CENTERED = 0,
  CR_STAGE_CIRCLE2D = 1,
  CR_STAGE_PROJECTED = 2,
  CR_STAGE_FUSED = 3,
} CrStage;

typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_ARGUMENT = 2,
  CR_STATUS_LAYOUT = 3,
  CR_STATUS_MISSING_MODALITY = 4,
  CR_STATUS_DEGENERATE_RADIUS = 5,
  CR_STATUS_BUFFER_TOO_SMALL = 6,
  CR_STATUS_OUT_OF_RANGE = 7,
  CR_STATUS_PANIC = 8,
} CrStatus;

/*
 Opaque handle to an indexed sequence.
 */
typedef struct CrSequence CrSequence;

/*
 Projection and fusion parameters. `radius_value` is R for a fixed
 radius and k for an automatic one.
 */
typedef struct CrCipConfig {
  double alpha;
  enum CrRadiusKind radius_kind;
  double radius_value;
  double beta;
  double text_direction[3];
} CrCipConfig;

typedef struct CrToken {
  enum CrModality modality;
  size_t segment_id;
  double coords[3];
} CrToken;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *cr_last_error_message(void);

/*
 NUL-terminated crate version. Static storage.
 */
const char *cr_version(void);

/*
 Writes the default configuration (alpha 0.5, fixed radius 10, beta 0.1,
 text direction (1,1,1)).

 # Safety
 `out` must be NULL or valid for writes.
 */
enum CrStatus cr_config_default(struct CrCipConfig *out);

/*
 Builds the indices of a layout such as `"i3x3,t5"`. Only the circle
 scheme reads `config`; NULL selects the default configuration.

 # Safety
 `layout` must be a NUL-terminated string, `config` NULL or a valid
 pointer, `out` valid for writes. Release the handle with
 [`cr_sequence_free`].
 */
enum CrStatus cr_sequence_new(const char *layout,
                              enum CrScheme scheme,
                              const struct CrCipConfig *config,
                              struct CrSequence **out);

/*
 # Safety
 `seq` must be NULL or a handle from [`cr_sequence_new`] not yet freed.
 */
void cr_sequence_free(struct CrSequence *seq);

/*
 Number of tokens, or 0 for a NULL handle.

 # Safety
 `seq` must be NULL or a live handle.
 */
size_t cr_sequence_len(const struct CrSequence *seq);

/*
 # Safety
 `seq` must be a live handle and `out` valid for writes.
 */
enum CrStatus cr_sequence_token(const struct CrSequence *seq, size_t index, struct CrToken *out);

/*
 PTD of the sequence under its scheme's default distance convention.
 `out_convention` may be NULL.

 # Safety
 `seq` must be a live handle, `out_ptd` valid for writes and
 `out_convention` NULL or valid for writes.
 */
enum CrStatus cr_sequence_ptd(const struct CrSequence *seq,
                              double *out_ptd,
                              enum CrConvention *out_convention);

/*
 Writes one projection stage of a `width x height` grid as packed
 `x, y, z` triples in raster order. `*out_points` always receives the
 number of points; when `capacity` (in points) is too small nothing is
 written to `out_xyz` and `CR_STATUS_BUFFER_TOO_SMALL` is returned.

 # Safety
 `config` must be NULL (defaults) or valid, `out_points` valid for
 writes, and `out_xyz` valid for `3 * capacity` doubles when
 `capacity > 0`.
 */
enum CrStatus cr_cip_project(size_t width,
                             size_t height,
                             const struct CrCipConfig *config,
                             enum CrStage stage,
                             double *out_xyz,
                             size_t capacity,
                             size_t *out_points);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLE_ROPE_H */
