#ifndef PCOND_H
#define PCOND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum PcondStatus {
  PCOND_STATUS_OK = 0,
  PCOND_STATUS_NULL_POINTER = 1,
  PCOND_STATUS_INVALID_ARGUMENT = 2,
  PCOND_STATUS_INVALID_EXPONENT = 3,
  PCOND_STATUS_INVALID_MESH = 4,
  PCOND_STATUS_INVALID_FIELD = 5,
  PCOND_STATUS_SOLVER_FAILURE = 6,
  PCOND_STATUS_NOT_CONVERGED = 7,
  PCOND_STATUS_UNRESOLVED_PROBE = 8,
  PCOND_STATUS_RECONSTRUCTION = 9,
  PCOND_STATUS_SCENARIO = 10,
  PCOND_STATUS_IO = 11,
  PCOND_STATUS_PANIC = 12,
} PcondStatus;

// Kind of a conductivity value.
typedef enum PcondConductivityKind {
  PCOND_CONDUCTIVITY_KIND_FINITE = 0,
  PCOND_CONDUCTIVITY_KIND_ZERO = 1,
  PCOND_CONDUCTIVITY_KIND_INFINITE = 2,
} PcondConductivityKind;

// Outcome of a support estimate.
typedef enum PcondEstimateStatus {
  PCOND_ESTIMATE_STATUS_CONCLUSIVE = 0,
  PCOND_ESTIMATE_STATUS_BELOW_NOISE_FLOOR = 1,
  PCOND_ESTIMATE_STATUS_MIXED_SIGNS = 2,
  PCOND_ESTIMATE_STATUS_NON_MONOTONE = 3,
} PcondEstimateStatus;

// Per-triangle conductivity bound to the mesh it was created on.
typedef struct PcondField PcondField;

// Triangulated domain.
typedef struct PcondMesh PcondMesh;

// Periodic Wolff profile for a fixed `p`.
typedef struct PcondWave PcondWave;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or NULL. The
// pointer stays valid until the next call into the library on this thread.
const char *pcond_last_error(void);

// Library version as a static NUL-terminated string.
const char *pcond_version(void);

// Uniform `nx × ny` grid on `[x0, x0 + width] × [y0, y0 + height]`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PcondStatus pcond_mesh_rect(double x0,
                                 double y0,
                                 size_t nx,
                                 size_t ny,
                                 double width,
                                 double height,
                                 struct PcondMesh **out);

// # Safety
// `mesh` must be NULL or a handle from `pcond_mesh_rect` not yet freed.
void pcond_mesh_free(struct PcondMesh *mesh);

// Writes the vertex, triangle and boundary-vertex counts.
//
// # Safety
// `mesh` must be a live handle; output pointers must be writable.
enum PcondStatus pcond_mesh_sizes(const struct PcondMesh *mesh,
                                  size_t *num_vertices,
                                  size_t *num_triangles,
                                  size_t *num_boundary);

// Copies vertex coordinates as interleaved `x, y` pairs into `xy`, which
// must hold `2 * num_vertices` doubles.
//
// # Safety
// `mesh` must be a live handle and `xy` must point to `len` writable doubles.
enum PcondStatus pcond_mesh_vertices(const struct PcondMesh *mesh, double *xy, size_t len);

// Copies boundary vertex indices (the order boundary data must follow).
//
// # Safety
// `mesh` must be a live handle and `idx` must point to `len` writable slots.
enum PcondStatus pcond_mesh_boundary_vertices(const struct PcondMesh *mesh,
                                              size_t *idx,
                                              size_t len);

// Constant finite conductivity on every triangle of `mesh`.
//
// # Safety
// `mesh` must be a live handle and `out` writable.
enum PcondStatus pcond_field_uniform(const struct PcondMesh *mesh,
                                     double value,
                                     struct PcondField **out);

// Sets every triangle whose centroid lies in the open disk to the value.
//
// # Safety
// `mesh` and `field` must be live handles, `field` created from `mesh`.
enum PcondStatus pcond_field_set_disk(struct PcondField *field,
                                      const struct PcondMesh *mesh,
                                      double cx,
                                      double cy,
                                      double radius,
                                      enum PcondConductivityKind kind,
                                      double value);

// Sets every triangle whose centroid lies in the open box to the value.
//
// # Safety
// `mesh` and `field` must be live handles, `field` created from `mesh`.
enum PcondStatus pcond_field_set_box(struct PcondField *field,
                                     const struct PcondMesh *mesh,
                                     double xmin,
                                     double ymin,
                                     double xmax,
                                     double ymax,
                                     enum PcondConductivityKind kind,
                                     double value);

// # Safety
// `field` must be NULL or a live handle.
void pcond_field_free(struct PcondField *field);

// Solves the Dirichlet problem with boundary values `f` (one per boundary
// vertex). Writes all vertex values and the energy.
//
// # Safety
// Handles must be live; `f` must hold `num_boundary` doubles and `u`
// `num_vertices` writable doubles; `energy` may be NULL.
enum PcondStatus pcond_solve(const struct PcondMesh *mesh,
                             const struct PcondField *field,
                             double p,
                             const double *f,
                             size_t num_boundary,
                             double *u,
                             size_t num_vertices,
                             double *energy);

// Weak Dirichlet-to-Neumann pairing `⟨Λ f, g⟩`.
//
// # Safety
// Handles must be live; `f` and `g` must each hold `num_boundary` doubles.
enum PcondStatus pcond_dn_pairing(const struct PcondMesh *mesh,
                                  const struct PcondField *field,
                                  double p,
                                  const double *f,
                                  const double *g,
                                  size_t num_boundary,
                                  double *out);

// Integrates the Wolff profile through `(w, w') = (a0, b0)`.
//
// # Safety
// `out` must be writable.
enum PcondStatus pcond_wave_new(double p, double a0, double b0, struct PcondWave **out);

// # Safety
// `wave` must be a live handle; `period` writable.
enum PcondStatus pcond_wave_period(const struct PcondWave *wave, double *period);

// `(w(s), w'(s))`.
//
// # Safety
// `wave` must be a live handle; `w` and `dw` writable.
enum PcondStatus pcond_wave_eval(const struct PcondWave *wave, double s, double *w, double *dw);

// # Safety
// `wave` must be NULL or a live handle.
void pcond_wave_free(struct PcondWave *wave);

// Indicator value for direction `(rho_x, rho_y)` (normalised internally),
// offset `t` and decay `tau`.
//
// # Safety
// Handles must be live; `out` writable.
enum PcondStatus pcond_indicator(const struct PcondMesh *mesh,
                                 const struct PcondField *field,
                                 const struct PcondWave *wave,
                                 double rho_x,
                                 double rho_y,
                                 double t,
                                 double tau,
                                 double *out);

// Support estimate along `(rho_x, rho_y)` from the increasing `tau` grid.
// `h` and `h_outer` are NaN unless `status` is conclusive.
//
// # Safety
// Handles must be live; `taus` must hold `num_tau` doubles; outputs writable.
enum PcondStatus pcond_support_estimate(const struct PcondMesh *mesh,
                                        const struct PcondField *field,
                                        const struct PcondWave *wave,
                                        double rho_x,
                                        double rho_y,
                                        const double *taus,
                                        size_t num_tau,
                                        enum PcondEstimateStatus *status,
                                        double *h,
                                        double *h_outer);

// Runs a scenario file as the command-line tool does and writes its exit
// code. A nonzero exit code still returns `Ok`; `error.json` or
// `summary.json` in `out_dir` holds the details.
//
// # Safety
// `scenario` and `out_dir` must be NUL-terminated UTF-8 strings; `exit_code`
// writable.
enum PcondStatus pcond_run_scenario(const char *scenario, const char *out_dir, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCOND_H */
