//! Kinematics of spherical robots rolling without slip over analytic 3D
//! terrains, with pure-pursuit path tracking for four robot classes.
//!
//! - [`terrain`]: height fields `z = f(x, y)` with analytic slopes.
//! - [`frames`]: contact normal, tilt rotation and the local-to-world transform.
//! - [`robots`]: per-class rolling kinematics (3R, 2R, RT, RS).
//! - [`control`]: tracking error, deviation angle and the tracking laws.
//! - [`path`]: desired trajectories lifted onto the terrain.
//! - [`sim`]: closed-loop RK4 simulation and CSV trajectory records.
//! - [`config`] and [`cli`]: scenario files and the `spherekin` commands.

pub mod cli;
pub mod config;
pub mod control;
pub mod frames;
pub mod path;
pub mod robots;
pub mod sim;
pub mod terrain;
pub mod vecmath;

pub use control::Gains;
pub use frames::{SurfaceSample, TransformLW};
pub use path::{DesiredPath, PathVariant};
pub use robots::{ActuationRates, RobotClass, RobotState};
pub use sim::{Scenario, TrajectoryRecord};
pub use terrain::{Surface, Terrain};
