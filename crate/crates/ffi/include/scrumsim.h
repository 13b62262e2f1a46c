#ifndef SCRUMSIM_H
#define SCRUMSIM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScrumsimStatus {
  SCRUMSIM_STATUS_OK = 0,
  SCRUMSIM_STATUS_NULL_POINTER = 1,
  SCRUMSIM_STATUS_INVALID_ARGUMENT = 2,
  SCRUMSIM_STATUS_CONFIG_ERROR = 3,
  SCRUMSIM_STATUS_TERMINATED = 4,
  SCRUMSIM_STATUS_IO_ERROR = 5,
  SCRUMSIM_STATUS_RUN_ERROR = 6,
  SCRUMSIM_STATUS_PANIC = 7,
} ScrumsimStatus;

/**
 * Opaque model configuration.
 */
typedef struct ScrumsimConfig ScrumsimConfig;

/**
 * Opaque simulation world.
 */
typedef struct ScrumsimWorld ScrumsimWorld;

/**
 * Counters for a world's current state.
 */
typedef struct ScrumsimSummary {
  uint32_t tick;
  uint32_t ticks_elapsed;
  uint32_t solved;
  uint32_t open;
  double velocity;
  uint32_t solved_senior;
  uint32_t solved_mid;
  uint32_t solved_junior;
  uint64_t member_reads;
} ScrumsimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *scrumsim_last_error(void);

/**
 * Library version as a static string.
 */
const char *scrumsim_version(void);

/**
 * New config holding the built-in defaults. Free with
 * [`scrumsim_config_free`].
 */
struct ScrumsimConfig *scrumsim_config_new(void);

/**
 * Loads a `key = value` config file into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScrumsimStatus scrumsim_config_load(const char *path, struct ScrumsimConfig **out);

/**
 * Sets one parameter by name, e.g. `("sociable", "true")`.
 *
 * # Safety
 * `config` must come from this library; `key` and `value` must be
 * NUL-terminated strings.
 */
enum ScrumsimStatus scrumsim_config_set(struct ScrumsimConfig *config,
                                        const char *key,
                                        const char *value);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards. NULL is
 * ignored.
 */
void scrumsim_config_free(struct ScrumsimConfig *config);

/**
 * Samples the initial world for `config` into `*out`.
 *
 * # Safety
 * `config` must come from this library and `out` must be valid.
 */
enum ScrumsimStatus scrumsim_world_new(const struct ScrumsimConfig *config,
                                       struct ScrumsimWorld **out);

/**
 * Advances one tick. Returns `Terminated` once the run is over.
 *
 * # Safety
 * `world` must come from this library.
 */
enum ScrumsimStatus scrumsim_world_step(struct ScrumsimWorld *world);

/**
 * Steps until the run terminates.
 *
 * # Safety
 * `world` must come from this library.
 */
enum ScrumsimStatus scrumsim_world_run(struct ScrumsimWorld *world);

/**
 * 1 if the world has terminated, 0 if not, -1 for NULL.
 *
 * # Safety
 * `world` must come from this library or be NULL.
 */
int32_t scrumsim_world_is_terminated(const struct ScrumsimWorld *world);

/**
 * # Safety
 * `world` must come from this library and `out` must be valid.
 */
enum ScrumsimStatus scrumsim_world_summary(const struct ScrumsimWorld *world,
                                           struct ScrumsimSummary *out);

/**
 * # Safety
 * `world` must come from this library and not be used afterwards. NULL is
 * ignored.
 */
void scrumsim_world_free(struct ScrumsimWorld *world);

/**
 * Runs the four sociable/curious scenarios over `config` and writes the
 * results CSV to `path`.
 *
 * # Safety
 * `config` must come from this library and `path` must be a NUL-terminated
 * string.
 */
enum ScrumsimStatus scrumsim_scenarios_csv(const struct ScrumsimConfig *config,
                                           uint32_t repetitions,
                                           uint64_t master_seed,
                                           uint32_t workers,
                                           const char *path);

/**
 * `c_lead + sum(sosd[j] * c[j])`. NaN if an array is NULL with `n > 0`.
 *
 * # Safety
 * `sosd` and `c` must each point to `n` doubles.
 */
double scrumsim_combine_linear(double c_lead, const double *sosd, const double *c, size_t n);

/**
 * Non-linear combination with the default caps. NaN if an array is NULL
 * with `n > 0`.
 *
 * # Safety
 * `sosd` and `c` must each point to `n` doubles.
 */
double scrumsim_combine_nonlinear(double c_lead,
                                  double sosd_lead,
                                  const double *sosd,
                                  const double *c,
                                  size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCRUMSIM_H */
