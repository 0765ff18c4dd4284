/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef EQUILEARN_H
#define EQUILEARN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum EqlStatus {
  EQL_STATUS_OK = 0,
  EQL_STATUS_INVALID_ARGUMENT = 1,
  EQL_STATUS_NULL_POINTER = 2,
  EQL_STATUS_DIMENSION_MISMATCH = 3,
  EQL_STATUS_INFORMATION_MODEL = 4,
  EQL_STATUS_CAPACITY = 5,
  EQL_STATUS_NOT_FOUND = 6,
  EQL_STATUS_EMPTY_HISTORY = 7,
  EQL_STATUS_UNINITIALIZED = 8,
  EQL_STATUS_CONFIG = 9,
  EQL_STATUS_PARSE = 10,
  /**
   * The caller's buffer is too small; the required size was reported.
   */
  EQL_STATUS_BUFFER_TOO_SMALL = 11,
  EQL_STATUS_PANIC = 12,
} EqlStatus;

/**
 * Which equilibrium a report refers to.
 */
typedef enum EqlKind {
  EQL_KIND_PNE = 0,
  EQL_KIND_EPS_NE = 1,
  EQL_KIND_CE = 2,
  EQL_KIND_CCE = 3,
} EqlKind;

/**
 * Long-run behaviour of a run.
 */
typedef enum EqlSteadyState {
  EQL_STEADY_STATE_CONVERGED = 0,
  EQL_STEADY_STATE_CYCLE = 1,
  EQL_STEADY_STATE_NONE = 2,
} EqlSteadyState;

/**
 * Opaque game handle.
 */
typedef struct EqlGame EqlGame;

/**
 * Opaque handle to a finished learning run.
 */
typedef struct EqlRun EqlRun;

/**
 * Outcome of an equilibrium check. `witness_player` is -1 when the
 * condition holds; `witness_from` is -1 for unconditional deviations.
 */
typedef struct EqlReport {
  enum EqlKind kind;
  bool holds;
  double worst_violation;
  int64_t witness_player;
  int64_t witness_from;
  int64_t witness_to;
} EqlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *eql_last_error(void);

/**
 * Builds a game from per-player utility tables.
 *
 * `utilities` holds `num_players * prod(action_counts)` values: player 0's
 * table first, each table indexed row-major with player 0 as the slowest
 * digit.
 */
enum EqlStatus eql_game_new(size_t num_players,
                            const size_t *action_counts,
                            const double *utilities,
                            size_t utilities_len,
                            struct EqlGame **out);

/**
 * Parses a game document (`{"players", "action_counts", "utilities"}`).
 */
enum EqlStatus eql_game_from_json(const char *json, struct EqlGame **out);

/**
 * Channel-selection game of a parallel interference channel with `k`
 * pairs and `s` bands. `gains[(j * k + i) * s + band]` is the gain from
 * transmitter `j` to receiver `i`.
 */
enum EqlStatus eql_ic_game_new(size_t k,
                               size_t s,
                               double snr_db,
                               const double *gains,
                               size_t gains_len,
                               struct EqlGame **out);

/**
 * Same as [`eql_ic_game_new`] with unit-mean exponential gains drawn from
 * `seed`.
 */
enum EqlStatus eql_ic_game_random(size_t k,
                                  size_t s,
                                  double snr_db,
                                  uint64_t seed,
                                  struct EqlGame **out);

void eql_game_free(struct EqlGame *game);

enum EqlStatus eql_game_num_players(const struct EqlGame *game, size_t *out);

enum EqlStatus eql_game_num_actions(const struct EqlGame *game, size_t player, size_t *out);

/**
 * Utility of `player` at the action profile `profile[0..len]`.
 */
enum EqlStatus eql_game_utility(const struct EqlGame *game,
                                const size_t *profile,
                                size_t len,
                                size_t player,
                                double *out);

/**
 * Checks whether the joint distribution `probs` (row-major over profiles)
 * is a coarse correlated (`kind == CCE`) or correlated (`kind == CE`)
 * equilibrium within `tol`.
 */
enum EqlStatus eql_check_correlated(const struct EqlGame *game,
                                    enum EqlKind kind,
                                    const double *probs,
                                    size_t len,
                                    double tol,
                                    struct EqlReport *out);

enum EqlStatus eql_check_pure_ne(const struct EqlGame *game,
                                 const size_t *profile,
                                 size_t len,
                                 double tol,
                                 struct EqlReport *out);

/**
 * ε-Nash check of independent mixed strategies, concatenated player by
 * player in `strategies`.
 */
enum EqlStatus eql_check_epsilon_ne(const struct EqlGame *game,
                                    const double *strategies,
                                    size_t len,
                                    double epsilon,
                                    struct EqlReport *out);

/**
 * Writes every pure Nash equilibrium into `profiles`, `num_players`
 * entries per equilibrium, in row-major order. `count` always receives the
 * number of equilibria; when `capacity` (in equilibria) is too small
 * nothing is written to `profiles` and `BufferTooSmall` is returned.
 */
enum EqlStatus eql_enumerate_pure_ne(const struct EqlGame *game,
                                     double tol,
                                     size_t *profiles,
                                     size_t capacity,
                                     size_t *count);

/**
 * Plays `iterations` stages of learning. `algorithms` is a comma-separated
 * list of learner specs (`"rm"`, `"brd:seq"`, `"juste:kappa=0.1,pmin=0.01"`,
 * ...), one per player, or a single spec used by every player.
 */
enum EqlStatus eql_run_dynamics(const struct EqlGame *game,
                                const char *algorithms,
                                size_t iterations,
                                uint64_t seed,
                                struct EqlRun **out);

void eql_run_free(struct EqlRun *run);

enum EqlStatus eql_run_len(const struct EqlRun *run, size_t *out);

/**
 * Action of `player` at zero-based `stage`.
 */
enum EqlStatus eql_run_action(const struct EqlRun *run, size_t stage, size_t player, size_t *out);

enum EqlStatus eql_run_utility(const struct EqlRun *run, size_t stage, size_t player, double *out);

/**
 * Steady-state verdict over the last `window` stages; `period` receives 0
 * unless the verdict is a cycle.
 */
enum EqlStatus eql_run_steady_state(const struct EqlRun *run,
                                    size_t window,
                                    double tol,
                                    enum EqlSteadyState *state,
                                    size_t *period);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUILEARN_H */
