//! C ABI over the `spherekin` core.
//!
//! Scenarios and trajectories are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`SkStatus`]; on failure [`sk_last_error`] describes the cause for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use spherekin::config::{ConfigError, ScenarioConfig};
use spherekin::frames::{sample_surface, transform_lw};
use spherekin::sim::{self, SimError, CSV_COLUMNS};
use spherekin::terrain::{make_plane, make_sinusoidal, SinusoidalParams, Surface, Terrain};
use spherekin::{RobotClass, Scenario, TrajectoryRecord};

/// Number of values in one trajectory row.
pub const SK_ROW_WIDTH: usize = 23;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    /// Scenario text or parameters rejected. Matches the CLI exit code.
    Config = 2,
    /// Simulation failed. Matches the CLI exit code.
    Run = 3,
    InvalidArgument = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkRobotClass {
    ThreeR = 0,
    TwoR = 1,
    Rt = 2,
    Rs = 3,
}

impl From<SkRobotClass> for RobotClass {
    fn from(c: SkRobotClass) -> Self {
        match c {
            SkRobotClass::ThreeR => RobotClass::ThreeR,
            SkRobotClass::TwoR => RobotClass::TwoR,
            SkRobotClass::Rt => RobotClass::RT,
            SkRobotClass::Rs => RobotClass::RS,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkSurfaceKind {
    /// `z = a (cos(omega x) + cos(omega y) - 2)`; `p1 = a`, `p2 = omega`.
    Sinusoidal = 0,
    /// `z = slope_x x + slope_y y`; `p1 = slope_x`, `p2 = slope_y`.
    Plane = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SkSurface {
    pub kind: SkSurfaceKind,
    pub p1: f64,
    pub p2: f64,
}

/// Contact quantities at one point of a surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SkSample {
    pub z: f64,
    pub fx: f64,
    pub fy: f64,
    pub s_n: f64,
    pub n_hat: [f64; 3],
}

/// One trajectory row, in the CSV column order (see [`sk_column_name`]).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SkRow {
    pub values: [f64; SK_ROW_WIDTH],
}

/// Opaque scenario handle.
pub struct SkScenario(Scenario);

/// Opaque trajectory handle.
pub struct SkTrajectory(TrajectoryRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SkStatus, msg: impl Into<String>) -> SkStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SkStatus) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SkStatus::Panic, "internal panic"),
    }
}

fn sim_status(e: &SimError) -> SkStatus {
    match e {
        SimError::Invalid { .. } => SkStatus::Config,
        _ => SkStatus::Run,
    }
}

fn config_status(e: &ConfigError) -> SkStatus {
    match e {
        ConfigError::Io { .. } => SkStatus::Io,
        _ => SkStatus::Config,
    }
}

fn build_surface(s: &SkSurface) -> Result<Surface, SkStatus> {
    match s.kind {
        SkSurfaceKind::Sinusoidal => make_sinusoidal(SinusoidalParams {
            a: s.p1,
            omega: s.p2,
        }),
        SkSurfaceKind::Plane => make_plane(s.p1, s.p2),
    }
    .map_err(|e| fail(SkStatus::InvalidArgument, e.to_string()))
}

/// Message for the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of trajectory columns (23).
#[no_mangle]
pub extern "C" fn sk_column_count() -> usize {
    SK_ROW_WIDTH
}

/// Static, NUL-terminated column name, or NULL when `index` is out of range.
#[no_mangle]
pub extern "C" fn sk_column_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        CSV_COLUMNS
            .iter()
            .map(|n| CString::new(*n).expect("column names have no NUL"))
            .collect()
    });
    names.get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Benchmark scenario for `class`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_benchmark(
    class: SkRobotClass,
    out: *mut *mut SkScenario,
) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return fail(SkStatus::NullPointer, "out is NULL");
        }
        let sc = Scenario::benchmark(class.into());
        *out = Box::into_raw(Box::new(SkScenario(sc)));
        SkStatus::Ok
    })
}

/// Parses a TOML scenario. Unset fields take their defaults.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_from_toml(
    toml: *const c_char,
    out: *mut *mut SkScenario,
) -> SkStatus {
    guard(|| {
        if toml.is_null() || out.is_null() {
            return fail(SkStatus::NullPointer, "toml or out is NULL");
        }
        let src = match CStr::from_ptr(toml).to_str() {
            Ok(s) => s,
            Err(_) => return fail(SkStatus::InvalidArgument, "scenario text is not UTF-8"),
        };
        let result = ScenarioConfig::from_toml_str(src).and_then(|c| c.to_scenario(Some(src)));
        match result {
            Ok(sc) => {
                *out = Box::into_raw(Box::new(SkScenario(sc)));
                SkStatus::Ok
            }
            Err(e) => fail(config_status(&e), e.to_string()),
        }
    })
}

/// Switches the robot class, keeping every other setting.
///
/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_set_class(
    scenario: *mut SkScenario,
    class: SkRobotClass,
) -> SkStatus {
    guard(|| match scenario.as_mut() {
        None => fail(SkStatus::NullPointer, "scenario is NULL"),
        Some(s) => {
            s.0 = s.0.with_class(class.into());
            SkStatus::Ok
        }
    })
}

/// Sets the step size and final time. Checked when the scenario runs.
///
/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_set_timing(
    scenario: *mut SkScenario,
    dt: f64,
    t_end: f64,
) -> SkStatus {
    guard(|| match scenario.as_mut() {
        None => fail(SkStatus::NullPointer, "scenario is NULL"),
        Some(s) => {
            s.0.dt = dt;
            s.0.t_end = t_end;
            SkStatus::Ok
        }
    })
}

/// Number of rows a run of this scenario produces.
///
/// # Safety
/// `scenario` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_row_count(scenario: *const SkScenario) -> usize {
    scenario.as_ref().map_or(0, |s| {
        if s.0.validate().is_ok() {
            s.0.row_count()
        } else {
            0
        }
    })
}

/// # Safety
/// `scenario` must be a handle from this library, not yet freed, or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_scenario_free(scenario: *mut SkScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the closed-loop simulation.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_run(
    scenario: *const SkScenario,
    out: *mut *mut SkTrajectory,
) -> SkStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else {
            return fail(SkStatus::NullPointer, "scenario is NULL");
        };
        if out.is_null() {
            return fail(SkStatus::NullPointer, "out is NULL");
        }
        match sim::run(&s.0) {
            Ok(rec) => {
                *out = Box::into_raw(Box::new(SkTrajectory(rec)));
                SkStatus::Ok
            }
            Err(e) => fail(sim_status(&e), e.to_string()),
        }
    })
}

/// Number of rows, or 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_trajectory_len(traj: *const SkTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.rows.len())
}

/// Largest contact correction applied during the run, or NaN for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_trajectory_max_contact_drift(traj: *const SkTrajectory) -> f64 {
    traj.as_ref().map_or(f64::NAN, |t| t.0.max_contact_drift)
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_trajectory_row(
    traj: *const SkTrajectory,
    index: usize,
    out: *mut SkRow,
) -> SkStatus {
    guard(|| {
        let Some(t) = traj.as_ref() else {
            return fail(SkStatus::NullPointer, "trajectory is NULL");
        };
        if out.is_null() {
            return fail(SkStatus::NullPointer, "out is NULL");
        }
        match t.0.rows.get(index) {
            Some(row) => {
                *out = SkRow {
                    values: row.values(),
                };
                SkStatus::Ok
            }
            None => fail(
                SkStatus::OutOfRange,
                format!("row {index} out of range (len {})", t.0.rows.len()),
            ),
        }
    })
}

/// Writes the trajectory as CSV, same format as the CLI.
///
/// # Safety
/// `traj` must be a live handle; `path` a NUL-terminated UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn sk_trajectory_write_csv(
    traj: *const SkTrajectory,
    path: *const c_char,
) -> SkStatus {
    guard(|| {
        let Some(t) = traj.as_ref() else {
            return fail(SkStatus::NullPointer, "trajectory is NULL");
        };
        if path.is_null() {
            return fail(SkStatus::NullPointer, "path is NULL");
        }
        let Ok(p) = CStr::from_ptr(path).to_str() else {
            return fail(SkStatus::InvalidArgument, "path is not UTF-8");
        };
        let file = match std::fs::File::create(Path::new(p)) {
            Ok(f) => f,
            Err(e) => return fail(SkStatus::Io, format!("cannot create {p}: {e}")),
        };
        match t.0.write_csv(std::io::BufWriter::new(file)) {
            Ok(()) => SkStatus::Ok,
            Err(e) => fail(SkStatus::Io, format!("cannot write {p}: {e}")),
        }
    })
}

/// # Safety
/// `traj` must be a handle from this library, not yet freed, or NULL.
#[no_mangle]
pub unsafe extern "C" fn sk_trajectory_free(traj: *mut SkTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Height, slopes and unit normal of `surface` at `(x, y)`.
///
/// # Safety
/// `surface` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_surface_sample(
    surface: *const SkSurface,
    x: f64,
    y: f64,
    out: *mut SkSample,
) -> SkStatus {
    guard(|| {
        let Some(spec) = surface.as_ref() else {
            return fail(SkStatus::NullPointer, "surface is NULL");
        };
        if out.is_null() {
            return fail(SkStatus::NullPointer, "out is NULL");
        }
        let surf = match build_surface(spec) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let s = sample_surface(&surf, x, y);
        *out = SkSample {
            z: surf.height(x, y),
            fx: s.fx,
            fy: s.fy,
            s_n: s.s_n,
            n_hat: s.n_hat,
        };
        SkStatus::Ok
    })
}

/// Row-major 4x4 local-to-world transform at the contact point above
/// `(x, y)` with heading angle `psi`, written to `out[0..16]`.
///
/// # Safety
/// `surface` must be readable; `out` must point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sk_frame_transform(
    surface: *const SkSurface,
    x: f64,
    y: f64,
    psi: f64,
    out: *mut f64,
) -> SkStatus {
    guard(|| {
        let Some(spec) = surface.as_ref() else {
            return fail(SkStatus::NullPointer, "surface is NULL");
        };
        if out.is_null() {
            return fail(SkStatus::NullPointer, "out is NULL");
        }
        if !(x.is_finite() && y.is_finite() && psi.is_finite()) {
            return fail(SkStatus::InvalidArgument, "x, y and psi must be finite");
        }
        let surf = match build_surface(spec) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let t = transform_lw([x, y, surf.height(x, y)], &sample_surface(&surf, x, y), psi);
        ptr::copy_nonoverlapping(t.a.as_ptr(), out, 16);
        SkStatus::Ok
    })
}
