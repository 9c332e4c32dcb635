use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Scenario;
use crate::grid_fem::{interpolate_function, FieldP1, FractionalOrder, Grid1D};
use crate::step_solver::SolverConfig;

/// Named analytic profile for initial data and obstacles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · sin(frequency · x + phase)`.
    Sine {
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Piecewise-linear interpolation of `[x, y]` points, increasing in `x`.
    Table {
        points: Vec<[f64; 2]>,
    },
}

fn one() -> f64 {
    1.0
}

impl Profile {
    pub fn sine(amplitude: f64, offset: f64) -> Self {
        Profile::Sine {
            amplitude,
            frequency: 1.0,
            phase: 0.0,
            offset,
        }
    }

    /// Value at `x`; NaN outside the range of a table.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * (frequency * x + phase).sin(),
            Profile::Table { points } => {
                let Some(k) = points.windows(2).position(|w| x >= w[0][0] && x <= w[1][0]) else {
                    return f64::NAN;
                };
                let ([x0, y0], [x1, y1]) = (points[k], points[k + 1]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn check(&self, field: &str) -> Result<()> {
        match self {
            Profile::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::config(field, "a table needs at least two points"));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::config(
                        field,
                        "table abscissae must be strictly increasing",
                    ));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::config(field, "table values must be finite"));
                }
            }
            Profile::Constant { value } if !value.is_finite() => {
                return Err(Error::config(field, "value must be finite"));
            }
            _ => {}
        }
        Ok(())
    }

    fn interpolate(&self, field: &str, grid: Grid1D, left: f64, right: f64) -> Result<FieldP1> {
        self.check(field)?;
        interpolate_function(grid, |x| self.eval(x), left, right)
            .map_err(|e| Error::config(field, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryValues {
    pub left: f64,
    pub right: f64,
}

/// Lower obstacle, optionally with an (experimental) upper one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Profile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Keep every `stride`-th step in `snapshots.csv`.
    pub stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            stride: 1,
            dir: None,
        }
    }
}

/// External scenario description (TOML).
///
/// ```toml
/// n_cells = 200
/// s = 1.0
/// t_final = 10.0
/// n_steps = 1000
///
/// [domain]
/// a = 0.0
/// b = 6.283185307179586
///
/// [bc]
/// left = 1.2
/// right = 1.2
///
/// [u0]
/// kind = "sine"
/// amplitude = 1.0
/// offset = 1.2
///
/// [v0]
/// kind = "constant"
/// value = -2.0
///
/// [obstacle.lower]
/// kind = "constant"
/// value = 0.0
///
/// [solver]
/// grad_tol = 1e-10
/// max_iters = 100000
///
/// [output]
/// stride = 10
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_cells: usize,
    pub s: f64,
    pub t_final: f64,
    pub n_steps: usize,
    pub domain: Domain,
    pub bc: BoundaryValues,
    pub u0: Profile,
    pub v0: Profile,
    #[serde(default)]
    pub obstacle: ObstacleSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text)
            .map_err(|e| Error::config("<document>", e.message().to_string()))?;
        config.resolve()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is representable in TOML")
    }

    /// A double obstacle carries no variational-inequality guarantees.
    pub fn is_experimental(&self) -> bool {
        self.obstacle.upper.is_some()
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn resolve(&self) -> Result<Scenario> {
        self.resolve_at(self.n_cells, self.n_steps)
    }

    /// Builds the numerical scenario at another resolution.
    pub fn resolve_at(&self, n_cells: usize, n_steps: usize) -> Result<Scenario> {
        let order = FractionalOrder::new(self.s)
            .map_err(|_| Error::config("s", format!("must satisfy 0 < s <= 1, got {}", self.s)))?;
        let grid = Grid1D::new(self.domain.a, self.domain.b, n_cells).map_err(|e| match e {
            Error::InvalidDomain(m) if n_cells < 2 => Error::config("n_cells", m),
            other => Error::config("domain", other.to_string()),
        })?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("t_final", "must be positive"));
        }
        if n_steps < 1 {
            return Err(Error::config("n_steps", "must be at least 1"));
        }
        let BoundaryValues { left, right } = self.bc;
        if !(left.is_finite() && right.is_finite()) {
            return Err(Error::config("bc", "boundary values must be finite"));
        }
        if !order.is_local() && (left != 0.0 || right != 0.0) {
            return Err(Error::config(
                "bc",
                format!(
                    "s = {} < 1 requires zero exterior data (u = 0 outside the domain), got ({left}, {right})",
                    self.s
                ),
            ));
        }
        let u0 = self.u0.interpolate("u0", grid, left, right)?;
        let v0 = self.v0.interpolate("v0", grid, 0.0, 0.0)?;
        let obstacle = |field: &str, p: &Profile| {
            p.interpolate(field, grid, p.eval(grid.a()), p.eval(grid.b()))
        };
        let lower = match &self.obstacle.lower {
            Some(p) => Some(obstacle("obstacle.lower", p)?),
            None => None,
        };
        let upper = match &self.obstacle.upper {
            Some(p) => Some(obstacle("obstacle.upper", p)?),
            None => None,
        };
        if self.output.stride < 1 {
            return Err(Error::config("output.stride", "must be at least 1"));
        }
        let scenario = Scenario {
            grid,
            order,
            t_final: self.t_final,
            n_steps,
            u0,
            v0,
            lower,
            upper,
            solver: self.solver.clone(),
        };
        scenario.validate().map_err(|e| match e {
            Error::InvalidScenario(m) => Error::config("obstacle", m),
            other => other,
        })?;
        Ok(scenario)
    }
}
