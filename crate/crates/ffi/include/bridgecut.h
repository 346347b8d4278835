#ifndef BRIDGECUT_H
#define BRIDGECUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_NULL_POINTER = 1,
  BC_STATUS_INVALID_ARGUMENT = 2,
  BC_STATUS_NUMERICAL = 3,
  BC_STATUS_BUFFER_TOO_SMALL = 4,
  BC_STATUS_IO = 5,
  BC_STATUS_PANIC = 6,
} BcStatus;

typedef enum BcPartitionKind {
  BC_PARTITION_KIND_D = 0,
  BC_PARTITION_KIND_T = 1,
} BcPartitionKind;

/**
 * A simulated path on `[0, duration]` with its local time at zero.
 */
typedef struct BcBridge BcBridge;

/**
 * Seeded random stream.
 */
typedef struct BcRng BcRng;

/**
 * Runs acceptance criteria with shared cached batches.
 */
typedef struct BcVerifier BcVerifier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bc_version(void);

/**
 * Length in bytes of the last error message on this thread, excluding the
 * terminating NUL; 0 when there is none.
 */
size_t bc_last_error_length(void);

/**
 * Copies the last error message, truncated and NUL-terminated, into `buf`.
 * Returns the full message length.
 *
 * # Safety
 * `buf` must point to `capacity` writable bytes or be null.
 */
size_t bc_last_error_message(char *buf, size_t capacity);

/**
 * Opens stream `stream` of `seed`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcStatus bc_rng_new(uint64_t seed, uint64_t stream, struct BcRng **out);

/**
 * # Safety
 * `rng` must come from [`bc_rng_new`] and not be used afterwards.
 */
void bc_rng_free(struct BcRng *rng);

/**
 * Uniform on `[0,1)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_rng_uniform(struct BcRng *rng, double *out);

/**
 * Stable subordinator at local-time level `level`, with
 * `E exp(-ξ τ) = exp(-level c ξ^alpha)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_sample_stable(struct BcRng *rng,
                               double alpha,
                               double c,
                               double level,
                               double *out);

/**
 * GEM(theta) sticks until the residual mass drops below `tolerance`.
 *
 * # Safety
 * `buf` must hold `capacity` doubles; other pointers must be valid.
 */
enum BcStatus bc_sample_gem(struct BcRng *rng,
                            double theta,
                            double tolerance,
                            double *buf,
                            size_t capacity,
                            size_t *len,
                            double *residual);

/**
 * Simulates a Brownian bridge on `m` uniform steps, or with `pseudo` a
 * pseudo-bridge on `m` steps of a geometric grid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_bridge_simulate(struct BcRng *rng, size_t m, bool pseudo, struct BcBridge **out);

/**
 * # Safety
 * `bridge` must come from [`bc_bridge_simulate`] and not be used afterwards.
 */
void bc_bridge_free(struct BcBridge *bridge);

/**
 * Number of grid steps; the path has one more value.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_bridge_steps(const struct BcBridge *bridge, size_t *out);

/**
 * Total local time at zero.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_bridge_local_time(const struct BcBridge *bridge, double *out);

/**
 * Path values at the grid times.
 *
 * # Safety
 * `buf` must hold `capacity` doubles; other pointers must be valid.
 */
enum BcStatus bc_bridge_values(const struct BcBridge *bridge,
                               double *buf,
                               size_t capacity,
                               size_t *len);

/**
 * Grid times, from 0 to the path duration.
 *
 * # Safety
 * `buf` must hold `capacity` doubles; other pointers must be valid.
 */
enum BcStatus bc_bridge_times(const struct BcBridge *bridge,
                              double *buf,
                              size_t capacity,
                              size_t *len);

/**
 * Interval lengths of a D- or T-partition of the path, in order.
 *
 * # Safety
 * `buf` must hold `capacity` doubles; other pointers must be valid.
 */
enum BcStatus bc_bridge_partition(const struct BcBridge *bridge,
                                  struct BcRng *rng,
                                  enum BcPartitionKind kind,
                                  double *buf,
                                  size_t capacity,
                                  size_t *len);

/**
 * `P(K_n = k)` for `k = 1..=n`, where `K_n` counts the blocks of the
 * discrete T-partition of `n` exchangeable intervals.
 *
 * # Safety
 * `buf` must hold `capacity` doubles; `len` must be valid.
 */
enum BcStatus bc_t_count_probabilities(size_t n, double *buf, size_t capacity, size_t *len);

/**
 * Verifier with `reps` bridge replicates on a grid of `grid` steps.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BcStatus bc_verifier_new(uint64_t seed, size_t reps, size_t grid, struct BcVerifier **out);

/**
 * # Safety
 * `verifier` must come from [`bc_verifier_new`] and not be used afterwards.
 */
void bc_verifier_free(struct BcVerifier *verifier);

/**
 * Runs criterion `id` (1 to 12) at the overall suite level.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BcStatus bc_verifier_criterion(const struct BcVerifier *verifier, uint8_t id, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRIDGECUT_H */
