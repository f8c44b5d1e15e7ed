//! Command implementations behind the `spherekin` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 run failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::frames::{
    euler_rotation, rotation_quaternion, rotation_rodrigues, sample_surface, tangent_lateral_axis,
    tilt_quaternion, transform_lw,
};
use crate::path::PathVariant;
use crate::sim::{self, Scenario, SimError, TrajectoryRecord};
use crate::terrain::{Surface, Terrain};
use crate::vecmath::{max_abs_diff, Mat3};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUN: i32 = 3;

/// `|e|` bound used for the settle-time column of summaries (meters).
pub const SETTLE_BOUND: f64 = 0.3;

pub const OUT_ENV: &str = "SPHEREKIN_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("run failed ({class}): {source}")]
    Run {
        class: String,
        #[source]
        source: SimError,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Argument(_) => EXIT_CONFIG,
            CliError::Run { .. } | CliError::Io { .. } => EXIT_RUN,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Options shared by `run`, `compare` and `validate`.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub path_variant: Option<PathVariant>,
}

pub struct Loaded {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub out_dir: PathBuf,
}

pub fn load(opts: &ScenarioOptions) -> Result<Loaded, CliError> {
    let (mut config, source) = match &opts.config {
        Some(p) => {
            let src = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })?;
            (ScenarioConfig::from_toml_str(&src)?, Some(src))
        }
        None => (ScenarioConfig::default(), None),
    };
    if let Some(dt) = opts.dt {
        config.sim.dt = dt;
    }
    if let Some(t_end) = opts.t_end {
        config.sim.t_end = t_end;
    }
    if let Some(v) = opts.path_variant {
        config.path = config.path.with_benchmark_variant(v);
    }
    let scenario = config.to_scenario(source.as_deref())?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| config.output.directory.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Loaded {
        config,
        scenario,
        out_dir,
    })
}

pub fn cmd_validate(opts: &ScenarioOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(opts)?;
    let _ = write!(out, "{}", loaded.config.to_canonical_string());
    Ok(())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn write_record(record: &TrajectoryRecord, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    record
        .write_csv(io::BufWriter::new(file))
        .map_err(io_err(path))
}

fn run_class(scenario: &Scenario) -> Result<TrajectoryRecord, CliError> {
    sim::run(scenario).map_err(|source| CliError::Run {
        class: scenario.robot_class.to_string(),
        source,
    })
}

pub fn cmd_run(opts: &ScenarioOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let Loaded {
        config,
        scenario,
        out_dir,
    } = load(opts)?;
    let record = run_class(&scenario)?;
    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    write_record(&record, &out_dir.join("trajectory.csv"))?;
    if config.output.emit_plot_script {
        let script = plot_script(
            &scenario.surface,
            &[("trajectory.csv", scenario.robot_class.as_str())],
        );
        write_file(&out_dir.join("plot.gp"), script.as_bytes())?;
    }

    let s = record.summary(SETTLE_BOUND);
    let mut text = String::new();
    let _ = writeln!(text, "class: {}", scenario.robot_class);
    let _ = writeln!(text, "rows: {}", record.rows.len());
    let _ = writeln!(text, "final |e|: {:.6e} m", s.final_e);
    let _ = writeln!(text, "mean |e| over last 20%: {:.6e} m", s.mean_e_tail);
    let _ = writeln!(
        text,
        "max contact correction: {:.6e} m",
        s.max_contact_drift
    );
    let _ = write!(out, "{text}");

    let mut meta = format!(
        "config: {}\noutput: trajectory.csv\n",
        opts.config
            .as_ref()
            .map_or_else(|| "<defaults>".to_string(), |p| p.display().to_string())
    );
    meta.push_str(&text);
    write_file(&out_dir.join("run_meta.txt"), meta.as_bytes())?;
    Ok(())
}

/// Per-class comparison table.
pub fn compare_table(records: &[TrajectoryRecord]) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<5} {:>14} {:>14} {:>14} {:>16}",
        "class", "final |e|", "max |e|", "tail mean |e|", "t(|e|<0.3)"
    );
    for rec in records {
        let s = rec.summary(SETTLE_BOUND);
        let settle = s
            .settle_time
            .map_or_else(|| "not converged".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(
            t,
            "{:<5} {:>14.6e} {:>14.6e} {:>14.6e} {:>16}",
            rec.class.as_str(),
            s.final_e,
            s.max_e,
            s.mean_e_tail,
            settle
        );
    }
    t
}

pub fn cmd_compare(opts: &ScenarioOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let Loaded {
        config,
        scenario,
        out_dir,
    } = load(opts)?;
    // validate every class up front so config problems exit with the config code
    for class in crate::robots::RobotClass::ALL {
        let sc = scenario.with_class(class);
        sc.validate().map_err(|e| ConfigError::Invalid {
            field: format!("robot.class = {class}"),
            reason: e.to_string(),
            line: None,
        })?;
    }
    let results = sim::run_compare(&scenario);
    let mut records = Vec::with_capacity(results.len());
    for (class, result) in results {
        records.push(result.map_err(|source| CliError::Run {
            class: class.to_string(),
            source,
        })?);
    }

    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    let mut files = Vec::new();
    for rec in &records {
        let name = format!("trajectory_{}.csv", rec.class);
        write_record(rec, &out_dir.join(&name))?;
        files.push((name, rec.class.as_str()));
    }
    if config.output.emit_plot_script {
        let refs: Vec<(&str, &str)> = files.iter().map(|(f, c)| (f.as_str(), *c)).collect();
        write_file(
            &out_dir.join("plot.gp"),
            plot_script(&scenario.surface, &refs).as_bytes(),
        )?;
    }
    let table = compare_table(&records);
    write_file(&out_dir.join("summary.txt"), table.as_bytes())?;
    let _ = write!(out, "{table}");
    Ok(())
}

/// A gnuplot script drawing the 3D trajectories over the terrain and the
/// actual/desired x, y, z against time. Reads only the given CSV files.
pub fn plot_script(surface: &Surface, runs: &[(&str, &str)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# spherekin trajectories; run with `gnuplot plot.gp`");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 1200,900");
    match surface {
        Surface::Sinusoidal(p) => {
            let _ = writeln!(
                s,
                "f(x,y) = {:?}*(cos({:?}*x) + cos({:?}*y) - 2)",
                p.a, p.omega, p.omega
            );
        }
        Surface::Plane { slope_x, slope_y } => {
            let _ = writeln!(s, "f(x,y) = {slope_x:?}*x + {slope_y:?}*y");
        }
    }
    let _ = writeln!(s, "\nset output 'trajectory_3d.png'");
    let _ = writeln!(
        s,
        "set xlabel 'x [m]'\nset ylabel 'y [m]'\nset zlabel 'z [m]'"
    );
    let _ = writeln!(s, "set isosamples 60\nset hidden3d\nset view 55, 35");
    let mut parts = vec!["f(x,y) with lines lc rgb '#cccccc' title 'terrain'".to_string()];
    if let Some((first, _)) = runs.first() {
        parts.push(format!(
            "'{first}' every ::1 using 5:6:7 with lines lw 2 dt 2 lc rgb 'black' title 'desired'"
        ));
    }
    for (file, label) in runs {
        parts.push(format!(
            "'{file}' every ::1 using 2:3:4 with lines lw 2 title '{label}'"
        ));
    }
    let _ = writeln!(s, "splot {}", parts.join(", \\\n      "));

    let _ = writeln!(s, "\nset output 'trajectory_xyz.png'");
    let _ = writeln!(s, "set multiplot layout 3,1");
    for (axis, (actual, desired)) in ["x", "y", "z"].iter().zip([(2, 5), (3, 6), (4, 7)]) {
        let _ = writeln!(s, "set xlabel 't [s]'\nset ylabel '{axis} [m]'");
        let mut p = Vec::new();
        if let Some((first, _)) = runs.first() {
            p.push(format!("'{first}' every ::1 using 1:{desired} with lines dt 2 lc rgb 'black' title '{axis}_d'"));
        }
        for (file, label) in runs {
            p.push(format!(
                "'{file}' every ::1 using 1:{actual} with lines title '{label}'"
            ));
        }
        let _ = writeln!(s, "plot {}", p.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+.12e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_mat(name: &str, m: &Mat3) -> String {
    let mut s = format!("{name}:\n");
    for row in m {
        let _ = writeln!(s, "  {}", fmt_vec(row));
    }
    s
}

/// Prints the contact-frame quantities at `(x, y)` with turning angle `psi`.
pub fn cmd_frames_check(
    surface: &Surface,
    x: f64,
    y: f64,
    psi: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    surface
        .validate()
        .map_err(|e| CliError::Argument(e.to_string()))?;
    if ![x, y, psi].iter().all(|v| v.is_finite()) {
        return Err(CliError::Argument("x, y and psi must be finite".into()));
    }
    let sample = sample_surface(surface, x, y);
    let euler = euler_rotation(&sample);
    let q = tilt_quaternion(&sample);
    let r_rod = rotation_rodrigues(&sample);
    let r_quat = rotation_quaternion(&sample);
    let p0 = [x, y, surface.height(x, y)];
    let t = transform_lw(p0, &sample, psi);

    let mut s = String::new();
    let _ = writeln!(s, "surface: {surface}");
    let _ = writeln!(
        s,
        "point: x = {x}, y = {y}, z = {:+.12e}, psi = {psi}",
        p0[2]
    );
    let _ = writeln!(s, "fx: {:+.12e}", sample.fx);
    let _ = writeln!(s, "fy: {:+.12e}", sample.fy);
    let _ = writeln!(s, "s_n: {:.12e}", sample.s_n);
    let _ = writeln!(s, "q_c: {:.12e}", sample.q_c);
    let _ = writeln!(s, "n_hat: {}", fmt_vec(&sample.n_hat));
    let _ = writeln!(
        s,
        "e_hat: {}{}",
        fmt_vec(&euler.e_hat),
        if euler.degenerate {
            " (degenerate)"
        } else {
            ""
        }
    );
    let _ = writeln!(s, "gamma: {:.12e}", euler.gamma);
    let _ = writeln!(s, "j_T: {}", fmt_vec(&tangent_lateral_axis(&sample)));
    let _ = writeln!(s, "quaternion: {}", fmt_vec(&[q.w, q.i, q.j, q.k]));
    s.push_str(&fmt_mat("R_Tr (closed form)", &r_rod));
    s.push_str(&fmt_mat("R_Tr (quaternion)", &r_quat));
    let _ = writeln!(s, "T_LW:");
    for row in t.a.chunks(4) {
        let _ = writeln!(s, "  {}", fmt_vec(row));
    }
    let _ = writeln!(
        s,
        "max |R_closed - R_quat|: {:.3e}",
        max_abs_diff(&r_rod, &r_quat)
    );
    out.write_all(s.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}
