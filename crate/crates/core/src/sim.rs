//! Closed-loop simulation: controller, kinematics and a fixed-step RK4
//! integrator with contact projection.

use std::io::{self, Write};

use thiserror::Error;

use crate::control::{self, Gains, TrackingSnapshot};
use crate::frames::{sample_surface, transform_lw, velocity_to_world, SurfaceSample, TransformLW};
use crate::path::{make_benchmark_path, DesiredPath, PathVariant};
use crate::robots::{
    body_velocity, center_point, effective_psi, heading_rate, ActuationRates, RobotClass,
    RobotError, RobotState,
};
use crate::terrain::{make_sinusoidal, SinusoidalParams, Surface, Terrain};
use crate::vecmath::{wrap_angle, Vec3};

/// Maximum number of times a step may be bisected before the run fails.
pub const MAX_HALVINGS: u32 = 10;

pub const BENCHMARK_RADIUS: f64 = 0.2;
pub const BENCHMARK_SURFACE: SinusoidalParams = SinusoidalParams { a: 0.2, omega: 2.0 };
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_Z_TOL: f64 = 1e-6;
pub const DEFAULT_PHI_MAX: f64 = std::f64::consts::FRAC_PI_4;
pub const DEFAULT_START: [f64; 2] = [0.5, -0.5];

pub const CSV_COLUMNS: [&str; 23] = [
    "t",
    "x0",
    "y0",
    "z0",
    "xd",
    "yd",
    "zd",
    "theta",
    "phi",
    "psi",
    "alpha",
    "theta_dot",
    "phi_dot",
    "psi_dot",
    "alpha_dot",
    "ex",
    "ey",
    "ez",
    "e_norm",
    "zeta",
    "ox",
    "oy",
    "oz",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Robot(#[from] RobotError),
    #[error("step at t = {t} rejected after {MAX_HALVINGS} halvings (contact drift {drift:e} > z_tol {z_tol:e})")]
    StepRejected { t: f64, drift: f64, z_tol: f64 },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> SimError {
    SimError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub surface: Surface,
    pub robot_class: RobotClass,
    pub radius: f64,
    pub gains: Gains,
    pub path: DesiredPath,
    pub t_end: f64,
    pub dt: f64,
    pub initial_state: RobotState,
    /// Tilt limit, RS only.
    pub phi_max: f64,
    pub z_tol: f64,
}

/// Resting state at `(x, y)` on the surface with all angles zero.
pub fn state_at(surface: &Surface, x: f64, y: f64) -> RobotState {
    RobotState {
        p0: [x, y, surface.height(x, y)],
        ..Default::default()
    }
}

impl Scenario {
    /// The sinusoidal-terrain benchmark with default gains and integration settings.
    pub fn benchmark(class: RobotClass) -> Scenario {
        let surface = make_sinusoidal(BENCHMARK_SURFACE).expect("valid constants");
        Scenario {
            surface,
            robot_class: class,
            radius: BENCHMARK_RADIUS,
            gains: Gains::default(),
            path: make_benchmark_path(PathVariant::SineCorrected, surface),
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            initial_state: state_at(&surface, DEFAULT_START[0], DEFAULT_START[1]),
            phi_max: DEFAULT_PHI_MAX,
            z_tol: DEFAULT_Z_TOL,
        }
    }

    pub fn with_class(mut self, class: RobotClass) -> Scenario {
        self.robot_class = class;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.surface
            .validate()
            .map_err(|e| invalid("surface", e.to_string()))?;
        self.path
            .kind
            .validate()
            .map_err(|e| invalid("path", e.to_string()))?;
        self.gains
            .validate()
            .map_err(|e| invalid("gains", e.to_string()))?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(invalid("t_end", format!("must be > 0, got {}", self.t_end)));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(invalid(
                "radius",
                format!("must be > 0, got {}", self.radius),
            ));
        }
        if !(self.z_tol.is_finite() && self.z_tol > 0.0) {
            return Err(invalid("z_tol", format!("must be > 0, got {}", self.z_tol)));
        }
        if !(self.phi_max.is_finite() && self.phi_max > 0.0) {
            return Err(invalid(
                "phi_max",
                format!("must be > 0, got {}", self.phi_max),
            ));
        }
        let s = &self.initial_state;
        let fields = [
            s.p0[0], s.p0[1], s.p0[2], s.theta, s.phi, s.psi, s.alpha, s.t,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(invalid("initial_state", "all components must be finite"));
        }
        let gap = (s.p0[2] - self.surface.height(s.p0[0], s.p0[1])).abs();
        if gap > self.z_tol {
            return Err(invalid(
                "initial_state",
                format!(
                    "contact point is {gap:e} off the surface (z_tol {:e})",
                    self.z_tol
                ),
            ));
        }
        if self.robot_class == RobotClass::TwoR && s.psi != 0.0 {
            return Err(invalid(
                "initial_state.psi",
                format!("2R robots cannot turn; psi must be 0, got {}", s.psi),
            ));
        }
        if self.robot_class == RobotClass::RS && s.phi.abs() > self.phi_max {
            return Err(invalid(
                "initial_state.phi",
                format!("|phi| = {} exceeds phi_max = {}", s.phi.abs(), self.phi_max),
            ));
        }
        Ok(())
    }

    /// Number of rows a run records: one per grid time `i * dt <= t_end`.
    pub fn row_count(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize + 1
    }
}

/// Time derivative of the integrated state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub p0_dot: Vec3,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub psi_dot: f64,
    pub alpha_dot: f64,
}

/// Everything computed on the way to a derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub target: Vec3,
    pub desired_velocity: Vec3,
    pub sample: SurfaceSample,
    pub frame: TransformLW,
    pub snapshot: TrackingSnapshot,
    /// Actuation after class filtering and the tilt clamp.
    pub rates: ActuationRates,
    pub derivative: StateDerivative,
}

pub fn evaluate(scenario: &Scenario, state: &RobotState, t: f64) -> Result<Evaluation, SimError> {
    let class = scenario.robot_class;
    let target = scenario.path.position(t);
    let desired_velocity = scenario.path.velocity(t);
    let sample = sample_surface(&scenario.surface, state.p0[0], state.p0[1]);
    let frame = transform_lw(state.p0, &sample, effective_psi(class, state));
    let snapshot = control::snapshot(target, &frame);
    let mut rates = control::control(
        class,
        &snapshot,
        desired_velocity,
        &scenario.gains,
        scenario.radius,
    );
    if class == RobotClass::RS {
        let at_limit = state.phi.abs() >= scenario.phi_max;
        if at_limit && rates.phi_dot * state.phi > 0.0 {
            rates.phi_dot = 0.0;
        }
    }
    let v_local = body_velocity(class, state, &rates, scenario.radius)?;
    let p0_dot = velocity_to_world(&frame, v_local).expect("body velocity is tangent");
    let derivative = StateDerivative {
        p0_dot,
        theta_dot: rates.theta_dot,
        phi_dot: rates.phi_dot,
        psi_dot: heading_rate(class, state, &rates),
        alpha_dot: rates.alpha_dot,
    };
    Ok(Evaluation {
        target,
        desired_velocity,
        sample,
        frame,
        snapshot,
        rates,
        derivative,
    })
}

pub fn derivative(
    scenario: &Scenario,
    state: &RobotState,
    t: f64,
) -> Result<StateDerivative, SimError> {
    evaluate(scenario, state, t).map(|e| e.derivative)
}

/// One classical Runge-Kutta step of `y' = f(t, y)`.
pub fn rk4<const N: usize, E>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t: f64,
    y: &[f64; N],
    dt: f64,
) -> Result<[f64; N], E> {
    let offset = |y: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        std::array::from_fn(|i| y[i] + h * k[i])
    };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &offset(y, &k1, 0.5 * dt))?;
    let k3 = f(t + 0.5 * dt, &offset(y, &k2, 0.5 * dt))?;
    let k4 = f(t + dt, &offset(y, &k3, dt))?;
    Ok(std::array::from_fn(|i| {
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

fn pack(s: &RobotState) -> [f64; 7] {
    [s.p0[0], s.p0[1], s.p0[2], s.theta, s.phi, s.psi, s.alpha]
}

fn unpack(y: &[f64; 7], t: f64) -> RobotState {
    RobotState {
        p0: [y[0], y[1], y[2]],
        theta: y[3],
        phi: y[4],
        psi: y[5],
        alpha: y[6],
        t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: RobotState,
    /// Largest `|z0 - f(x0, y0)|` seen before projection over the accepted substeps.
    pub contact_drift: f64,
    /// Number of accepted substeps (1 unless the step was bisected).
    pub substeps: u32,
}

/// Advances `state` from `t` to `t + dt`, projecting the contact point back
/// onto the surface. Steps whose pre-projection drift exceeds `z_tol` are
/// bisected, up to [`MAX_HALVINGS`] levels deep.
pub fn rk4_step(
    scenario: &Scenario,
    state: &RobotState,
    t: f64,
    dt: f64,
) -> Result<StepOutcome, SimError> {
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("step must be > 0, got {dt}")));
    }
    step_with_halving(scenario, state, t, dt, 0)
}

fn step_with_halving(
    scenario: &Scenario,
    state: &RobotState,
    t: f64,
    dt: f64,
    depth: u32,
) -> Result<StepOutcome, SimError> {
    let rhs = |tau: f64, y: &[f64; 7]| -> Result<[f64; 7], SimError> {
        let d = derivative(scenario, &unpack(y, tau), tau)?;
        Ok([
            d.p0_dot[0],
            d.p0_dot[1],
            d.p0_dot[2],
            d.theta_dot,
            d.phi_dot,
            d.psi_dot,
            d.alpha_dot,
        ])
    };
    let y = rk4(rhs, t, &pack(state), dt)?;
    let mut next = unpack(&y, t + dt);
    let ground = scenario.surface.height(next.p0[0], next.p0[1]);
    let drift = (next.p0[2] - ground).abs();

    if drift > scenario.z_tol {
        if depth >= MAX_HALVINGS {
            return Err(SimError::StepRejected {
                t,
                drift,
                z_tol: scenario.z_tol,
            });
        }
        let half = 0.5 * dt;
        let first = step_with_halving(scenario, state, t, half, depth + 1)?;
        let second = step_with_halving(scenario, &first.state, t + half, half, depth + 1)?;
        return Ok(StepOutcome {
            state: second.state,
            contact_drift: first.contact_drift.max(second.contact_drift),
            substeps: first.substeps + second.substeps,
        });
    }

    next.p0[2] = ground;
    if scenario.robot_class == RobotClass::RS {
        next.phi = next.phi.clamp(-scenario.phi_max, scenario.phi_max);
    }
    Ok(StepOutcome {
        state: next,
        contact_drift: drift,
        substeps: 1,
    })
}

/// One recorded sample of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub p0: Vec3,
    pub target: Vec3,
    pub theta: f64,
    pub phi: f64,
    /// Wrapped to (-pi, pi].
    pub psi: f64,
    pub alpha: f64,
    /// Applied actuation; `psi_dot` is the rate of the recorded `psi`.
    pub rates: ActuationRates,
    pub e: Vec3,
    pub e_norm: f64,
    pub zeta: f64,
    pub center: Vec3,
}

impl TrajectoryRow {
    pub fn values(&self) -> [f64; 23] {
        [
            self.t,
            self.p0[0],
            self.p0[1],
            self.p0[2],
            self.target[0],
            self.target[1],
            self.target[2],
            self.theta,
            self.phi,
            self.psi,
            self.alpha,
            self.rates.theta_dot,
            self.rates.phi_dot,
            self.rates.psi_dot,
            self.rates.alpha_dot,
            self.e[0],
            self.e[1],
            self.e[2],
            self.e_norm,
            self.zeta,
            self.center[0],
            self.center[1],
            self.center[2],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub final_e: f64,
    /// Mean `|e|` over the last 20% of rows.
    pub mean_e_tail: f64,
    pub max_e: f64,
    pub max_contact_drift: f64,
    /// First time after which `|e|` stays below the bound, if it does.
    pub settle_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub class: RobotClass,
    pub rows: Vec<TrajectoryRow>,
    pub max_contact_drift: f64,
    /// Steps that needed bisection.
    pub bisected_steps: usize,
}

/// Formats a float with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

impl TrajectoryRecord {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        let mut line = String::with_capacity(23 * 25);
        for row in &self.rows {
            line.clear();
            for (i, v) in row.values().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format_value(*v));
            }
            writeln!(out, "{line}")?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn summary(&self, bound: f64) -> RunSummary {
        let n = self.rows.len();
        let tail_start = n - (n / 5).max(1);
        let tail = &self.rows[tail_start..];
        let mean_e_tail = tail.iter().map(|r| r.e_norm).sum::<f64>() / tail.len() as f64;
        let settle_time = match self.rows.iter().rposition(|r| r.e_norm >= bound) {
            None => self.rows.first().map(|r| r.t),
            Some(i) if i + 1 < n => Some(self.rows[i + 1].t),
            Some(_) => None,
        };
        RunSummary {
            final_e: self.rows.last().map_or(f64::NAN, |r| r.e_norm),
            mean_e_tail,
            max_e: self.rows.iter().map(|r| r.e_norm).fold(0.0, f64::max),
            max_contact_drift: self.max_contact_drift,
            settle_time,
        }
    }
}

fn record_row(scenario: &Scenario, state: &RobotState, t: f64) -> Result<TrajectoryRow, SimError> {
    let ev = evaluate(scenario, state, t)?;
    let rates = ActuationRates {
        psi_dot: ev.derivative.psi_dot,
        ..ev.rates
    };
    Ok(TrajectoryRow {
        t,
        p0: state.p0,
        target: ev.target,
        theta: state.theta,
        phi: state.phi,
        psi: wrap_angle(state.psi),
        alpha: state.alpha,
        rates,
        e: ev.snapshot.e,
        e_norm: ev.snapshot.e_norm,
        zeta: ev.snapshot.zeta,
        center: center_point(state, &ev.sample, scenario.radius),
    })
}

/// Integrates the scenario from `t = 0` to `t_end` on the fixed `dt` grid.
pub fn run(scenario: &Scenario) -> Result<TrajectoryRecord, SimError> {
    scenario.validate()?;
    let n = scenario.row_count();
    let mut rows = Vec::with_capacity(n);
    let mut state = RobotState {
        t: 0.0,
        ..scenario.initial_state
    };
    let mut max_contact_drift: f64 = 0.0;
    let mut bisected_steps = 0;
    for i in 0..n {
        let t = i as f64 * scenario.dt;
        rows.push(record_row(scenario, &state, t)?);
        if i + 1 < n {
            let out = rk4_step(scenario, &state, t, scenario.dt)?;
            max_contact_drift = max_contact_drift.max(out.contact_drift);
            if out.substeps > 1 {
                bisected_steps += 1;
            }
            state = out.state;
            state.t = (i + 1) as f64 * scenario.dt;
        }
    }
    Ok(TrajectoryRecord {
        class: scenario.robot_class,
        rows,
        max_contact_drift,
        bisected_steps,
    })
}

/// Runs the scenario once per robot class, in parallel. Results are returned
/// in [`RobotClass::ALL`] order.
pub fn run_compare(scenario: &Scenario) -> Vec<(RobotClass, Result<TrajectoryRecord, SimError>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = RobotClass::ALL
            .iter()
            .map(|&class| {
                let sc = scenario.with_class(class);
                (class, scope.spawn(move || run(&sc)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(class, h)| (class, h.join().expect("simulation thread panicked")))
            .collect()
    })
}
