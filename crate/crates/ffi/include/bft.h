#ifndef BFT_H
#define BFT_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BftGadget {
  BFT_GADGET_MEAS_ZL = 0,
  BFT_GADGET_ERROR_CORRECT = 1,
  BFT_GADGET_CNOT = 2,
  BFT_GADGET_BELL_PREP = 3,
  BFT_GADGET_BELL_MEAS = 4,
} BftGadget;

/**
 * Result code of every call. Numeric values match the `bft` CLI exit codes
 * where they overlap.
 */
typedef enum BftStatus {
  BFT_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BFT_STATUS_NULL_POINTER = 1,
  BFT_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Infeasible request or tractability guard tripped.
   */
  BFT_STATUS_INFEASIBLE = 3,
  BFT_STATUS_INTERNAL = 4,
} BftStatus;

/**
 * Opaque gadget circuit.
 */
typedef struct BftCircuit BftCircuit;

typedef struct BftNoise {
  double epsilon;
  double epsilon_prime;
} BftNoise;

typedef struct BftBoundReport {
  double eps_nd;
  double eps_mzz;
  double eps_mzzz;
  double eps_mx1;
  double eps_mx2;
  double eps_d;
  double eps_total;
} BftBoundReport;

typedef struct BftThreshold {
  double eps_max;
  uint32_t n;
} BftThreshold;

typedef struct BftInjectionReport {
  double eps_bm;
  double eps_inject;
  bool pass;
} BftInjectionReport;

typedef struct BftFlaggedBounds {
  double eps_flag;
  double eps_noflag;
  double eps_cond_accept;
  double denominator;
} BftFlaggedBounds;

/**
 * Gadget parameters. Fields a gadget does not use are ignored.
 */
typedef struct BftGadgetParams {
  enum BftGadget kind;
  uint32_t n;
  uint32_t r;
  uint32_t r1;
  uint32_t r2;
  uint32_t t;
} BftGadgetParams;

typedef struct BftCircuitStats {
  uint64_t qubits;
  uint64_t cphase_count;
  uint64_t prep_count;
  uint64_t meas_count;
  uint64_t idle_data_steps;
  uint64_t depth;
} BftCircuitStats;

typedef struct BftSimResult {
  uint64_t trials;
  uint64_t failures;
  uint64_t flag_raised;
  uint64_t accepted;
  uint64_t accepted_failures;
  double failure_rate;
  double ci_lo;
  double ci_hi;
} BftSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the calling thread's last error message, or null if none.
 * Release with `bft_string_free`.
 */
char *bft_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void bft_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bft_version(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BftStatus bft_cnot_failure_bound(uint32_t n,
                                      uint32_t r1,
                                      uint32_t r2,
                                      uint32_t r,
                                      struct BftNoise p,
                                      struct BftBoundReport *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BftStatus bft_effective_noise(uint32_t n, struct BftNoise p, double *out);

/**
 * Searches odd n in `[n_min, n_max]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BftStatus bft_optimize_threshold(double bias,
                                      double target,
                                      uint32_t n_min,
                                      uint32_t n_max,
                                      struct BftThreshold *out);

/**
 * Uses the default external constants.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BftStatus bft_injection_bound(uint32_t n,
                                   uint32_t r,
                                   struct BftNoise p,
                                   struct BftInjectionReport *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BftStatus bft_flagged_bounds(uint32_t n,
                                  uint32_t r1,
                                  uint32_t t,
                                  struct BftNoise p,
                                  struct BftFlaggedBounds *out);

/**
 * Builds a gadget circuit. With `preceding_r > 0` the inputs are fed by
 * noisy CNOT gadgets of that repetition count.
 *
 * # Safety
 * `params` must be readable and `out` valid for writes. On success `*out`
 * owns a circuit to be released with `bft_circuit_free`.
 */
enum BftStatus bft_circuit_new(const struct BftGadgetParams *params,
                               uint32_t preceding_r,
                               struct BftCircuit **out);

/**
 * # Safety
 * `c` must be null or a circuit from `bft_circuit_new` not yet freed.
 */
void bft_circuit_free(struct BftCircuit *c);

/**
 * # Safety
 * `c` must be a live circuit and `out` valid for writes.
 */
enum BftStatus bft_circuit_stats(const struct BftCircuit *c, struct BftCircuitStats *out);

/**
 * Schedule as text, one operation per line. Release with `bft_string_free`.
 *
 * # Safety
 * `c` must be a live circuit and `out` valid for writes.
 */
enum BftStatus bft_circuit_to_text(const struct BftCircuit *c, char **out);

/**
 * Monte Carlo failure rate with clean inputs. Deterministic in `seed`.
 *
 * # Safety
 * `c` must be a live circuit and `out` valid for writes.
 */
enum BftStatus bft_circuit_simulate(const struct BftCircuit *c,
                                    struct BftNoise p,
                                    uint64_t trials,
                                    uint64_t seed,
                                    struct BftSimResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BFT_H */
