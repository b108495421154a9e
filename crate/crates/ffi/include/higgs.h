#ifndef HIGGS_H
#define HIGGS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum HgStatus {
  HG_OK = 0,
  HG_ERR_NULL = 1,
  HG_ERR_INVALID = 2,
  HG_ERR_CONFIG = 3,
  HG_ERR_NON_FINITE = 4,
  HG_ERR_IO = 5,
  HG_ERR_BUFFER = 6,
  HG_ERR_PANIC = 7,
} HgStatus;

// Run state reported by `hg_sim_step`.
typedef enum HgStop {
  HG_RUNNING = 0,
  HG_COMPLETED = 1,
  HG_BLOW_UP = 2,
  HG_HALO_REACHED = 3,
} HgStop;

// Opaque simulation handle.
typedef struct HgSim HgSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a simulation from a preset name (`"example1"` … `"example7"`).
// `n = 0` keeps the default resolution; `radial != 0` selects the radial reduction.
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
enum HgStatus hg_sim_new_preset(const char *name, size_t n, int32_t radial, struct HgSim **out);

// Creates a simulation from TOML config text.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum HgStatus hg_sim_new_from_config(const char *text, struct HgSim **out);

// Advances by up to `steps` RK4 steps, stopping early at `t_end` or a stop condition.
// The run state is written to `stop` when it is non-null.
//
// # Safety
// `sim` must come from `hg_sim_new_*`; `stop` may be null.
enum HgStatus hg_sim_step(struct HgSim *sim, uint64_t steps, enum HgStop *stop);

// Current time, or NaN for a null handle.
//
// # Safety
// `sim` must come from `hg_sim_new_*` or be null.
double hg_sim_time(const struct HgSim *sim);

// Number of lattice values copied by `hg_sim_copy_phi`, or 0 for a null handle.
//
// # Safety
// `sim` must come from `hg_sim_new_*` or be null.
size_t hg_sim_len(const struct HgSim *sim);

// Writes `max |phi|` to `out`.
//
// # Safety
// `sim` must come from `hg_sim_new_*`; `out` must be valid.
enum HgStatus hg_sim_max_abs(const struct HgSim *sim, double *out);

// Copies `phi` (x fastest) into `buf`, which must hold `hg_sim_len` values.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum HgStatus hg_sim_copy_phi(const struct HgSim *sim, double *buf, size_t len);

// Writes a checkpoint of the current state.
//
// # Safety
// `sim` must come from `hg_sim_new_*`; `path` must be a NUL-terminated string.
enum HgStatus hg_sim_save_checkpoint(const struct HgSim *sim, const char *path);

// Releases a handle. Null is ignored.
//
// # Safety
// `sim` must come from `hg_sim_new_*` and not be used afterwards.
void hg_sim_free(struct HgSim *sim);

// `A exp(1/R² − 1/(R² − |x−c|²))` inside the ball, 0 outside.
double hg_bump_eval(double x,
                    double y,
                    double z,
                    double cx,
                    double cy,
                    double cz,
                    double radius,
                    double amplitude);

// Writes `(+√(μ²/λ), −√(μ²/λ), 0)` to `out[0..3]`.
//
// # Safety
// `out` must point to three writable doubles.
enum HgStatus hg_duffing_equilibria(double mu2, double lambda, double *out);

// CFL bound `δx / (√3 δt)`.
double hg_cfl_bound(double dx, double dt);

// Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
// `len`). Returns the full message length in bytes.
//
// # Safety
// `buf` must point to `len` writable bytes or be null.
size_t hg_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HIGGS_H */
