/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef GASURF_H
#define GASURF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Let the library pick the vertex opposite a longest side.
#define GAS_VERTEX_AUTO -1

#define GAS_VERTEX_A 0

#define GAS_VERTEX_B 1

#define GAS_VERTEX_C 2

typedef enum GasStatus {
  GAS_STATUS_OK = 0,
  GAS_STATUS_NULL_POINTER = 1,
  GAS_STATUS_INVALID_ARGUMENT = 2,
  GAS_STATUS_PARSE = 3,
  GAS_STATUS_DEGENERATE = 4,
  GAS_STATUS_UNBALANCED = 5,
  GAS_STATUS_DOMAIN = 6,
  GAS_STATUS_NUMERICAL = 7,
  GAS_STATUS_BUFFER_TOO_SMALL = 8,
  GAS_STATUS_PANIC = 9,
} GasStatus;

typedef struct GasPartition GasPartition;

typedef struct GasSurface GasSurface;

typedef struct GasTransform GasTransform;

typedef struct GasPoint {
  double x;
  double y;
} GasPoint;

typedef struct GasTriangle {
  struct GasPoint a;
  struct GasPoint b;
  struct GasPoint c;
} GasTriangle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into this library on the same thread.
const char *gas_last_error(void);

// Static NUL-terminated version string.
const char *gas_version(void);

// Builds a surface from a spec such as `cylinder(rho=1)`, `flat`,
// `graph(u^2+v^2)` or `custom(u, v, u*v)`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum GasStatus gas_surface_new(const char *spec, struct GasSurface **out);

// # Safety
// `s` must be NULL or a handle from [`gas_surface_new`] not yet freed.
void gas_surface_free(struct GasSurface *s);

// # Safety
// `s` must be a live handle; `out` must be writable.
enum GasStatus gas_surface_dim(const struct GasSurface *s, size_t *out);

// `∂_1 s(x) ∧ ∂_2 s(x)`. `written` (optional) receives the component count
// even when the buffer is too small.
//
// # Safety
// `out` must hold `len` doubles.
enum GasStatus gas_surface_tangent_bivector(const struct GasSurface *s,
                                            struct GasPoint x,
                                            double *out,
                                            size_t len,
                                            size_t *written);

// Inscribed mean bivector `<s(a);s(b);s(c)> / (<a;b;c>·I_2)`.
//
// # Safety
// Pointers must be valid; `out` must hold `len` doubles.
enum GasStatus gas_mean_bivector_naive(const struct GasSurface *s,
                                       const struct GasTriangle *t,
                                       double *out,
                                       size_t len,
                                       size_t *written);

// Balanced mean bivector at `vertex_index` (`GAS_VERTEX_*`). A positive
// `relaxed_kappa` accepts unbalanced vertices up to that ratio.
//
// # Safety
// Pointers must be valid; `out` must hold `len` doubles.
enum GasStatus gas_balanced_mean_bivector(const struct GasSurface *s,
                                          const struct GasTriangle *t,
                                          int32_t vertex_index,
                                          double relaxed_kappa,
                                          double *out,
                                          size_t len,
                                          size_t *written);

// Builds a plane map from `identity` or `custom(<expr>, <expr>)`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum GasStatus gas_transform_new(const char *spec, struct GasTransform **out);

// # Safety
// `f` must be NULL or a handle from [`gas_transform_new`] not yet freed.
void gas_transform_free(struct GasTransform *f);

// Jacobian determinant estimate on triangle `t`.
//
// # Safety
// Pointers must be valid.
enum GasStatus gas_jacobian_estimate(const struct GasTransform *f,
                                     const struct GasTriangle *t,
                                     int32_t vertex_index,
                                     double relaxed_kappa,
                                     double *out);

// Triangulated rectangle refined `levels` times.
//
// # Safety
// `out` must be writable.
enum GasStatus gas_partition_rect(double x0,
                                  double y0,
                                  double x1,
                                  double y1,
                                  size_t levels,
                                  struct GasPartition **out);

// Triangulated simple polygon refined `levels` times.
//
// # Safety
// `pts` must hold `n` points; `out` must be writable.
enum GasStatus gas_partition_polygon(const struct GasPoint *pts,
                                     size_t n,
                                     size_t levels,
                                     struct GasPartition **out);

// Schwarz lantern over `[0, 2π] × [0, height]`.
//
// # Safety
// `out` must be writable.
enum GasStatus gas_partition_lantern(uint64_t m,
                                     uint64_t n,
                                     double height,
                                     struct GasPartition **out);

// One midpoint refinement of `p` as a new handle.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum GasStatus gas_partition_refine(const struct GasPartition *p, struct GasPartition **out);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum GasStatus gas_partition_len(const struct GasPartition *p, size_t *out);

// Largest triangle diameter.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum GasStatus gas_partition_mesh_norm(const struct GasPartition *p, double *out);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum GasStatus gas_partition_triangle(const struct GasPartition *p,
                                      size_t index,
                                      struct GasTriangle *out);

// # Safety
// `p` must be NULL or a live partition handle.
void gas_partition_free(struct GasPartition *p);

// Balanced area sum over `p`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum GasStatus gas_area_balanced(const struct GasSurface *s,
                                 const struct GasPartition *p,
                                 double relaxed_kappa,
                                 double *out);

// Inscribed-polyhedron area over `p`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum GasStatus gas_area_naive(const struct GasSurface *s,
                              const struct GasPartition *p,
                              double *out);

// Adaptive quadrature of `|∂_1 s ∧ ∂_2 s|` over a polygon. On
// non-convergence `out` still receives the best estimate.
//
// # Safety
// `pts` must hold `n` points; `out` must be writable.
enum GasStatus gas_area_oracle(const struct GasSurface *s,
                               const struct GasPoint *pts,
                               size_t n,
                               double rtol,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GASURF_H */
