#ifndef MZAK_H
#define MZAK_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum MzStatus {
  MZ_STATUS_OK = 0,
  MZ_STATUS_NULL_POINTER = 1,
  MZ_STATUS_INVALID_UTF8 = 2,
  MZ_STATUS_INVALID_GRID = 3,
  MZ_STATUS_REPRESENTATION = 4,
  MZ_STATUS_GRID_MISMATCH = 5,
  MZ_STATUS_DIMENSION = 6,
  MZ_STATUS_ZERO_MODE = 7,
  MZ_STATUS_CONJUGACY = 8,
  MZ_STATUS_REALNESS = 9,
  MZ_STATUS_BLOW_UP = 10,
  MZ_STATUS_INADMISSIBLE = 11,
  MZ_STATUS_LATTICE_CAP = 12,
  MZ_STATUS_INVALID_ARGUMENT = 13,
  MZ_STATUS_FORMAT = 14,
  MZ_STATUS_CONFIG = 15,
  MZ_STATUS_IO = 16,
  MZ_STATUS_PANIC = 17,
} MzStatus;

// Parsed and validated run configuration.
typedef struct MzConfig MzConfig;

// A state together with the stepper advancing it.
typedef struct MzSimulation MzSimulation;

// Invariants of a simulation state.
typedef struct MzInvariants {
  double t;
  double i1;
  double i2;
  double m;
  double e_tilde;
} MzInvariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mz_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`) and returns the length needed
// including the terminator. The message is empty after a successful call.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t mz_last_error_message(char *buf, size_t len);

// Parses a TOML config document.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum MzStatus mz_config_parse(const char *text, struct MzConfig **out);

// Reads and parses a config file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum MzStatus mz_config_load(const char *path, struct MzConfig **out);

// # Safety
// `config` must be null or a live handle; it is invalid afterwards.
void mz_config_free(struct MzConfig *config);

// # Safety
// `config` must be a live handle.
enum MzStatus mz_config_set_seed(struct MzConfig *config, uint64_t seed);

// # Safety
// `config` must be a live handle and `dir` a NUL-terminated string.
enum MzStatus mz_config_set_output_dir(struct MzConfig *config, const char *dir);

// Reproducibility hash of the config (output directory excluded).
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum MzStatus mz_config_hash(const struct MzConfig *config, uint64_t *out);

// Runs the configured mode, writing artifacts to the output directory.
// `exit_status` receives 0 when every check passed and 4 otherwise.
//
// # Safety
// `config` must be a live handle and `exit_status` a valid pointer.
enum MzStatus mz_run(const struct MzConfig *config, int32_t *exit_status);

// Initial state of `config` (its checkpoint when `resume_from` is set).
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum MzStatus mz_simulation_new(const struct MzConfig *config, struct MzSimulation **out);

// # Safety
// `sim` must be null or a live handle; it is invalid afterwards.
void mz_simulation_free(struct MzSimulation *sim);

// Advances by `steps` steps. On failure the state holds the last step
// that was attempted.
//
// # Safety
// `sim` must be a live handle.
enum MzStatus mz_simulation_advance(struct MzSimulation *sim, uint64_t steps);

// # Safety
// `sim` must be a live handle; `t` and `step` must be null or valid.
enum MzStatus mz_simulation_time(const struct MzSimulation *sim, double *t, uint64_t *step);

// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum MzStatus mz_simulation_invariants(const struct MzSimulation *sim, struct MzInvariants *out);

// Relative distance between `χ₋` and the conjugate of `χ₊`.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum MzStatus mz_simulation_conjugacy_residual(const struct MzSimulation *sim, double *out);

// Writes the current state as a checkpoint file.
//
// # Safety
// `sim` must be a live handle and `path` a NUL-terminated string.
enum MzStatus mz_simulation_save(const struct MzSimulation *sim, const char *path);

// Empirical `c₀` on the config's grid, drawn with the config's seed.
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum MzStatus mz_estimate_c0(const struct MzConfig *config, size_t ensemble_size, double *out);

// Smaller root `m₁` of `Ẽ − m + c₀m²`; `MZ_STATUS_INVALID_ARGUMENT` when
// `Ẽ ≥ 1/(4c₀)`.
//
// # Safety
// `out` must be a valid pointer.
enum MzStatus mz_smaller_root(double c0, double e_tilde, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MZAK_H */
