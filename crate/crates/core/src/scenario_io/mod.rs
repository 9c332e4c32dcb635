//! Scenario files, built-in presets, result files and the command line.

mod cli;
mod config;
mod output;
mod presets;

pub use cli::{run_cli, DEFAULT_OSC_TOL};
pub use config::{BoundaryValues, Domain, ObstacleSpec, OutputSpec, Profile, ScenarioConfig};
pub use output::{fmt_f64, to_json_string, write_outputs, OUTPUT_FILES};
pub use presets::{preset, PRESET_NAMES};
