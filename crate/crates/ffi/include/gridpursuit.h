#ifndef GRIDPURSUIT_H
#define GRIDPURSUIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_POINTER = 1,
  GP_STATUS_INVALID_ARGUMENT = 2,
  GP_STATUS_CONFIG = 3,
  GP_STATUS_CONTRACT = 4,
  // The episode has ended; call `gp_env_reset` before stepping again.
  GP_STATUS_EPISODE_OVER = 5,
  GP_STATUS_BUFFER_TOO_SMALL = 6,
  GP_STATUS_PANIC = 7,
} GpStatus;

// An environment instance with its own placement stream.
typedef struct GpEnv GpEnv;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` as a
// NUL-terminated string. `*needed` receives the size including the NUL.
//
// # Safety
// `buf` must be valid for `len` bytes or null with `len == 0`; `needed` may be null.
enum GpStatus gp_last_error(char *buf, size_t len, size_t *needed);

// Creates an environment from an experiment document (TOML; empty for all
// defaults). `regime` is 0 for equal speeds, 1 for faster predators and 2 for
// faster prey.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum GpStatus gp_env_new(const char *toml, uint32_t regime, uint64_t seed, struct GpEnv **out);

// # Safety
// `env` must come from `gp_env_new` and not be used afterwards. Null is a no-op.
void gp_env_free(struct GpEnv *env);

// Number of agents; predators come first, then prey.
//
// # Safety
// `env` must be a live handle and `out` writable.
enum GpStatus gp_env_agent_count(const struct GpEnv *env, size_t *out);

// Starts a new episode from a fresh random placement.
//
// # Safety
// `env` must be a live handle.
enum GpStatus gp_env_reset(struct GpEnv *env);

// Advances one step. `actions[i]` is 0..4 (up, down, left, right, stay) for
// agent `i`. `rewards` receives base plus shaping reward per agent.
//
// # Safety
// `actions` and `rewards` must hold `n` elements, `done` must be writable.
enum GpStatus gp_env_step(struct GpEnv *env,
                          const uint8_t *actions,
                          size_t n,
                          double *rewards,
                          bool *done);

// Per-agent observation: x, y, stamina and alive flag, in four arrays of `n`.
//
// # Safety
// Each output array must hold `n` elements.
enum GpStatus gp_env_agents(const struct GpEnv *env,
                            size_t n,
                            uint16_t *x,
                            uint16_t *y,
                            uint32_t *stamina,
                            bool *alive);

// The tabular state key of the current state.
//
// # Safety
// `env` must be a live handle and `out` writable.
enum GpStatus gp_env_state_key(const struct GpEnv *env, uint64_t *out);

// Exact two-sided Wilcoxon signed-rank p-value for paired samples.
//
// # Safety
// `x` and `y` must hold `n` elements; `p` must be writable.
enum GpStatus gp_wilcoxon_exact(const double *x, const double *y, size_t n, double *p);

// Cliff's delta of `x` against `y`.
//
// # Safety
// `x` must hold `nx` and `y` `ny` elements; `delta` must be writable.
enum GpStatus gp_cliffs_delta(const double *x,
                              size_t nx,
                              const double *y,
                              size_t ny,
                              double *delta);

// Holm step-down adjusted p-values, written in input order.
//
// # Safety
// `p` and `adjusted` must hold `n` elements.
enum GpStatus gp_holm(const double *p, size_t n, double *adjusted);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDPURSUIT_H */
