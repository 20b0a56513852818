#ifndef SPINRING_H
#define SPINRING_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpinringStatus {
  SPINRING_STATUS_OK = 0,
  SPINRING_STATUS_NULL_POINTER = 1,
  SPINRING_STATUS_INVALID_CONFIG = 2,
  SPINRING_STATUS_INVALID_ARGUMENT = 3,
  SPINRING_STATUS_SIZE_GUARD = 4,
  SPINRING_STATUS_TRUNCATION = 5,
  SPINRING_STATUS_UNPHYSICAL = 6,
  SPINRING_STATUS_EMPTY_WINDOW = 7,
  SPINRING_STATUS_PANIC = 8,
} SpinringStatus;

typedef enum SpinringMethod {
  SPINRING_METHOD_SPECTRAL = 0,
  SPINRING_METHOD_BESSEL = 1,
  SPINRING_METHOD_ORACLE = 2,
} SpinringMethod;

// Opaque ring configuration.
typedef struct SpinringRing SpinringRing;

// Real and imaginary parts of an amplitude plus its magnitude.
typedef struct SpinringAmplitude {
  double re;
  double im;
  double xi;
} SpinringAmplitude;

// Optimal twist, scaled time and quality for one offset.
typedef struct SpinringOptimum {
  double f;
  double beta;
  double xi;
  double fidelity;
} SpinringOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a ring of `n` sites with coupling, field and twist.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SpinringStatus spinring_ring_new(size_t n,
                                      double coupling,
                                      double field,
                                      double twist,
                                      struct SpinringRing **out);

// Release a ring. Null is accepted and ignored.
//
// # Safety
// `ring` must come from [`spinring_ring_new`] and not be freed twice.
void spinring_ring_free(struct SpinringRing *ring);

// Number of sites of a ring.
//
// # Safety
// `ring` must be a live handle and `out` writable.
enum SpinringStatus spinring_ring_sites(const struct SpinringRing *ring, size_t *out);

// Transfer magnitude for receiver offset `d` at scaled time `beta`.
//
// # Safety
// `ring` must be a live handle and `out` writable.
enum SpinringStatus spinring_xi(const struct SpinringRing *ring,
                                int64_t d,
                                double beta,
                                double *out);

// Amplitude from 1-based `sender` to `receiver` with a chosen method.
//
// # Safety
// `ring` must be a live handle and `out` writable.
enum SpinringStatus spinring_amplitude(const struct SpinringRing *ring,
                                       size_t receiver,
                                       size_t sender,
                                       double beta,
                                       enum SpinringMethod method,
                                       struct SpinringAmplitude *out);

// Bessel function of the first kind `J_n(x)` for `n >= 0`.
//
// # Safety
// `out` must be writable.
enum SpinringStatus spinring_bessel_j(int64_t n, double x, double *out);

// Best twist and time for offset `d` on an `n`-site ring over
// `[beta_min, beta_max]` with grid spacing `beta_step`.
//
// # Safety
// `out` must be writable.
enum SpinringStatus spinring_optimize(size_t n,
                                      size_t d,
                                      double beta_min,
                                      double beta_max,
                                      double beta_step,
                                      struct SpinringOptimum *out);

// Largest diametric transfer magnitude of the `4 nn`-site ring at half
// flux over `count` scaled times. `holds` is set to 1 when blocked.
//
// # Safety
// `betas` must point to `count` readable doubles; outputs must be writable.
enum SpinringStatus spinring_blockage(size_t nn,
                                      const double *betas,
                                      size_t count,
                                      double *max_xi,
                                      int32_t *holds);

// Flux/ring entanglement in ebits and branch overlap for an excitation
// started on `site` (1-based) of an `n`-site ring.
//
// # Safety
// Outputs must be writable.
enum SpinringStatus spinring_entanglement(size_t n,
                                          size_t site,
                                          double beta,
                                          double *entropy,
                                          double *overlap);

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next call on the same thread.
const char *spinring_last_error(void);

// Library version as a nul-terminated string.
const char *spinring_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINRING_H */
