use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::step_solver::SolverConfig;

use super::config::{BoundaryValues, Domain, ObstacleSpec, OutputSpec, Profile, ScenarioConfig};

pub const PRESET_NAMES: [&str; 4] = [
    "paper-fig1",
    "free-sine",
    "fractional-free",
    "double-obstacle-demo",
];

/// Built-in scenarios.
///
/// * `paper-fig1`: string `sin x + 1.2` on `(0, 2π)` pinned at 1.2, pushed
///   with velocity −2 onto the obstacle `g = 0`; `h = 2π/200`, `τ = 1/100`, `T = 10`.
/// * `free-sine`: standing wave `sin x` on `(0, π)`, zero data, one period.
/// * `fractional-free`: `free-sine` with `s = 1/2`.
/// * `double-obstacle-demo`: experimental two-sided obstacle `−0.8 <= u <= 0.8`.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let config = match name {
        "paper-fig1" => ScenarioConfig {
            n_cells: 200,
            s: 1.0,
            t_final: 10.0,
            n_steps: 1000,
            domain: Domain { a: 0.0, b: TAU },
            bc: BoundaryValues {
                left: 1.2,
                right: 1.2,
            },
            u0: Profile::sine(1.0, 1.2),
            v0: Profile::Constant { value: -2.0 },
            obstacle: ObstacleSpec {
                lower: Some(Profile::Constant { value: 0.0 }),
                upper: None,
            },
            solver: SolverConfig::default(),
            output: OutputSpec {
                stride: 10,
                dir: None,
            },
        },
        "free-sine" => free_sine(1.0),
        "fractional-free" => free_sine(0.5),
        "double-obstacle-demo" => ScenarioConfig {
            n_cells: 200,
            s: 1.0,
            t_final: 10.0,
            n_steps: 1000,
            domain: Domain { a: 0.0, b: TAU },
            bc: BoundaryValues {
                left: 0.0,
                right: 0.0,
            },
            u0: Profile::sine(0.5, 0.0),
            v0: Profile::sine(2.0, 0.0),
            obstacle: ObstacleSpec {
                lower: Some(Profile::Constant { value: -0.8 }),
                upper: Some(Profile::Constant { value: 0.8 }),
            },
            solver: SolverConfig::default(),
            output: OutputSpec {
                stride: 10,
                dir: None,
            },
        },
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(config)
}

fn free_sine(s: f64) -> ScenarioConfig {
    ScenarioConfig {
        n_cells: 100,
        s,
        t_final: 2.0 * PI,
        n_steps: 200,
        domain: Domain { a: 0.0, b: PI },
        bc: BoundaryValues {
            left: 0.0,
            right: 0.0,
        },
        u0: Profile::sine(1.0, 0.0),
        v0: Profile::Constant { value: 0.0 },
        obstacle: ObstacleSpec::default(),
        solver: SolverConfig::default(),
        output: OutputSpec::default(),
    }
}
