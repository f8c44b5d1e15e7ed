use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spherekin::cli::{self, CliError, ScenarioOptions};
use spherekin::terrain::{make_plane, make_sinusoidal, SinusoidalParams};
use spherekin::PathVariant;

#[derive(Parser)]
#[command(
    name = "spherekin",
    version,
    about = "Spherical robots rolling over 3D terrain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv.
    Run(ScenarioArgs),
    /// Run all four robot classes on the same scenario.
    Compare(ScenarioArgs),
    /// Parse and validate a config, printing its canonical form.
    Validate(ScenarioArgs),
    /// Print contact-frame quantities at a point.
    FramesCheck(FramesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Literal,
    SineCorrected,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML). Defaults describe the sinusoidal benchmark.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config and $SPHEREKIN_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long = "path-variant", value_enum)]
    path_variant: Option<VariantArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceKind {
    Sinusoidal,
    Plane,
}

#[derive(Args)]
struct FramesArgs {
    #[arg(long, value_enum, default_value = "sinusoidal")]
    surface: SurfaceKind,
    #[arg(long, default_value_t = 0.2)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    omega: f64,
    #[arg(long = "slope-x", default_value_t = 0.0, allow_hyphen_values = true)]
    slope_x: f64,
    #[arg(long = "slope-y", default_value_t = 0.0, allow_hyphen_values = true)]
    slope_y: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    psi: f64,
}

impl From<ScenarioArgs> for ScenarioOptions {
    fn from(a: ScenarioArgs) -> Self {
        ScenarioOptions {
            config: a.config,
            out: a.out,
            dt: a.dt,
            t_end: a.t_end,
            path_variant: a.path_variant.map(|v| match v {
                VariantArg::Literal => PathVariant::Literal,
                VariantArg::SineCorrected => PathVariant::SineCorrected,
            }),
        }
    }
}

fn frames_check(args: &FramesArgs, out: &mut dyn io::Write) -> Result<(), CliError> {
    let surface = match args.surface {
        SurfaceKind::Sinusoidal => make_sinusoidal(SinusoidalParams {
            a: args.a,
            omega: args.omega,
        }),
        SurfaceKind::Plane => make_plane(args.slope_x, args.slope_y),
    }
    .map_err(|e| CliError::Argument(e.to_string()))?;
    cli::cmd_frames_check(&surface, args.x, args.y, args.psi, out)
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_CONFIG as u8
            } else {
                0
            });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match parsed.command {
        Command::Run(a) => cli::cmd_run(&a.into(), &mut out),
        Command::Compare(a) => cli::cmd_compare(&a.into(), &mut out),
        Command::Validate(a) => cli::cmd_validate(&a.into(), &mut out),
        Command::FramesCheck(a) => frames_check(&a, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
