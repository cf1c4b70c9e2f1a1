#ifndef VICSEK_H
#define VICSEK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum VicsekStatus {
  VICSEK_STATUS_OK = 0,
  VICSEK_STATUS_INVALID_ARGUMENT = 1,
  VICSEK_STATUS_BUDGET = 2,
  VICSEK_STATUS_NO_CONVERGENCE = 3,
  VICSEK_STATUS_SINGULAR = 4,
  VICSEK_STATUS_NULL_POINTER = 5,
  VICSEK_STATUS_PANIC = 6,
} VicsekStatus;

// Distinct eigenvalues through some depth, ascending.
typedef struct VicsekSpectrum VicsekSpectrum;

// Decimation data for one arm parameter `n`.
typedef struct VicsekSystem VicsekSystem;

// One row of a spectrum. `series` is 0 for the 0-series and 1 for the
// 4/3-series.
typedef struct VicsekRecord {
  uint32_t series;
  uint32_t birth_level;
  uint32_t word_len;
  uint64_t multiplicity;
  double value;
} VicsekRecord;

typedef struct VicsekClustering {
  double t;
  double rprime;
  double rho;
  bool certified;
} VicsekClustering;

// A point described by the arm (0..4) and distance `s` of its attachment
// to the main cross, and its distance `offset` from there. Two points in
// the same attached tree cannot be evaluated through this struct.
typedef struct VicsekSkeletonPoint {
  uint32_t arm;
  double s;
  double offset;
} VicsekSkeletonPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *vicsek_last_error(void);

// # Safety
// `out_sys` must be null or point to writable storage for a handle.
enum VicsekStatus vicsek_system_new(uint32_t n, struct VicsekSystem **out_sys);

// # Safety
// `sys` must be null or a handle from [`vicsek_system_new`] not yet freed.
void vicsek_system_free(struct VicsekSystem *sys);

// `ρ = (4n − 3)(2n − 1)` and `α = ln(4n − 3)/ln ρ`.
//
// # Safety
// `sys` must be a live handle; the out-pointers may be null.
enum VicsekStatus vicsek_system_scales(const struct VicsekSystem *sys, double *rho, double *alpha);

// `ψ_n(t)` for `t ∈ [0, 4/3]`.
//
// # Safety
// `sys` must be a live handle and `value` writable.
enum VicsekStatus vicsek_psi(const struct VicsekSystem *sys, double t, double *value);

// # Safety
// `sys` must be a live handle and `out_spec` writable.
enum VicsekStatus vicsek_spectrum_new(const struct VicsekSystem *sys,
                                      uint32_t depth,
                                      struct VicsekSpectrum **out_spec);

// # Safety
// `table` must be null or a handle from [`vicsek_spectrum_new`] not yet
// freed.
void vicsek_spectrum_free(struct VicsekSpectrum *table);

// Number of distinct eigenvalues; 0 for a null handle.
//
// # Safety
// `table` must be null or a live handle.
uintptr_t vicsek_spectrum_len(const struct VicsekSpectrum *table);

// # Safety
// `table` must be a live handle and `record` writable.
enum VicsekStatus vicsek_spectrum_get(const struct VicsekSpectrum *table,
                                      uintptr_t index,
                                      struct VicsekRecord *record);

// Copies up to `cap` letters of the record's word into `letters` and
// stores the full length in `len`.
//
// # Safety
// `table` must be a live handle, `letters` must hold `cap` values (or be
// null with `cap == 0`), and `len` must be writable.
enum VicsekStatus vicsek_spectrum_word(const struct VicsekSpectrum *table,
                                       uintptr_t index,
                                       uint16_t *letters,
                                       uintptr_t cap,
                                       uintptr_t *len);

// Eigenvalue counting function with multiplicities.
//
// # Safety
// `table` must be a live handle and `count` writable.
enum VicsekStatus vicsek_spectrum_counting(const struct VicsekSpectrum *table,
                                           double x,
                                           uint64_t *count);

// `Σ m(λ) e^{−tλ}` at `len` times; `t^α` times the trace goes to `scaled`
// when it is not null.
//
// # Safety
// `ts` and `trace` must hold `len` values; `scaled` must be null or hold
// `len` values.
enum VicsekStatus vicsek_heat_trace(const struct VicsekSpectrum *table,
                                    double alpha,
                                    const double *ts,
                                    uintptr_t len,
                                    double *trace,
                                    double *scaled);

// Looks for a certified gap of word length `ell` around a ratio in
// `[1, ρ]`. `found` is set to false when the point is covered.
//
// # Safety
// `sys` must be a live handle; `found`, `lo` and `hi` writable.
enum VicsekStatus vicsek_gap_containing(const struct VicsekSystem *sys,
                                        uint32_t ell,
                                        double point,
                                        bool *found,
                                        double *lo,
                                        double *hi);

// # Safety
// `sys` must be a live handle and `cert` writable.
enum VicsekStatus vicsek_clustering(const struct VicsekSystem *sys, struct VicsekClustering *cert);

// Green's function of the Dirichlet problem at the four corners.
//
// # Safety
// `x` and `y` must be readable and `value` writable.
enum VicsekStatus vicsek_green(const struct VicsekSkeletonPoint *x,
                               const struct VicsekSkeletonPoint *y,
                               double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VICSEK_H */
