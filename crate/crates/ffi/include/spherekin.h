#ifndef SPHEREKIN_H
#define SPHEREKIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Number of values in one trajectory row.
#define SK_ROW_WIDTH 23

typedef enum SkRobotClass {
  SK_ROBOT_CLASS_THREE_R = 0,
  SK_ROBOT_CLASS_TWO_R = 1,
  SK_ROBOT_CLASS_RT = 2,
  SK_ROBOT_CLASS_RS = 3,
} SkRobotClass;

typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  // Scenario text or parameters rejected. Matches the CLI exit code.
  SK_STATUS_CONFIG = 2,
  // Simulation failed. Matches the CLI exit code.
  SK_STATUS_RUN = 3,
  SK_STATUS_INVALID_ARGUMENT = 4,
  SK_STATUS_IO = 5,
  SK_STATUS_OUT_OF_RANGE = 6,
  SK_STATUS_PANIC = 7,
} SkStatus;

typedef enum SkSurfaceKind {
  // `z = a (cos(omega x) + cos(omega y) - 2)`; `p1 = a`, `p2 = omega`.
  SK_SURFACE_KIND_SINUSOIDAL = 0,
  // `z = slope_x x + slope_y y`; `p1 = slope_x`, `p2 = slope_y`.
  SK_SURFACE_KIND_PLANE = 1,
} SkSurfaceKind;

// Opaque scenario handle.
typedef struct SkScenario SkScenario;

// Opaque trajectory handle.
typedef struct SkTrajectory SkTrajectory;

// One trajectory row, in the CSV column order (see [`sk_column_name`]).
typedef struct SkRow {
  double values[SK_ROW_WIDTH];
} SkRow;

typedef struct SkSurface {
  enum SkSurfaceKind kind;
  double p1;
  double p2;
} SkSurface;

// Contact quantities at one point of a surface.
typedef struct SkSample {
  double z;
  double fx;
  double fy;
  double s_n;
  double n_hat[3];
} SkSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL if none.
// The pointer stays valid until the next failing call on the same thread.
const char *sk_last_error(void);

// Number of trajectory columns (23).
size_t sk_column_count(void);

// Static, NUL-terminated column name, or NULL when `index` is out of range.
const char *sk_column_name(size_t index);

// Benchmark scenario for `class`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SkStatus sk_scenario_benchmark(enum SkRobotClass class_, struct SkScenario **out);

// Parses a TOML scenario. Unset fields take their defaults.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum SkStatus sk_scenario_from_toml(const char *toml, struct SkScenario **out);

// Switches the robot class, keeping every other setting.
//
// # Safety
// `scenario` must be a live handle or NULL.
enum SkStatus sk_scenario_set_class(struct SkScenario *scenario, enum SkRobotClass class_);

// Sets the step size and final time. Checked when the scenario runs.
//
// # Safety
// `scenario` must be a live handle or NULL.
enum SkStatus sk_scenario_set_timing(struct SkScenario *scenario, double dt, double t_end);

// Number of rows a run of this scenario produces.
//
// # Safety
// `scenario` must be a live handle or NULL (returns 0).
size_t sk_scenario_row_count(const struct SkScenario *scenario);

// # Safety
// `scenario` must be a handle from this library, not yet freed, or NULL.
void sk_scenario_free(struct SkScenario *scenario);

// Runs the closed-loop simulation.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum SkStatus sk_run(const struct SkScenario *scenario, struct SkTrajectory **out);

// Number of rows, or 0 for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
size_t sk_trajectory_len(const struct SkTrajectory *traj);

// Largest contact correction applied during the run, or NaN for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
double sk_trajectory_max_contact_drift(const struct SkTrajectory *traj);

// Copies row `index` into `out`.
//
// # Safety
// `traj` must be a live handle; `out` must be writable.
enum SkStatus sk_trajectory_row(const struct SkTrajectory *traj, size_t index, struct SkRow *out);

// Writes the trajectory as CSV, same format as the CLI.
//
// # Safety
// `traj` must be a live handle; `path` a NUL-terminated UTF-8 path.
enum SkStatus sk_trajectory_write_csv(const struct SkTrajectory *traj, const char *path);

// # Safety
// `traj` must be a handle from this library, not yet freed, or NULL.
void sk_trajectory_free(struct SkTrajectory *traj);

// Height, slopes and unit normal of `surface` at `(x, y)`.
//
// # Safety
// `surface` must be readable and `out` writable.
enum SkStatus sk_surface_sample(const struct SkSurface *surface,
                                double x,
                                double y,
                                struct SkSample *out);

// Row-major 4x4 local-to-world transform at the contact point above
// `(x, y)` with heading angle `psi`, written to `out[0..16]`.
//
// # Safety
// `surface` must be readable; `out` must point to 16 writable doubles.
enum SkStatus sk_frame_transform(const struct SkSurface *surface,
                                 double x,
                                 double y,
                                 double psi,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHEREKIN_H */
