use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_fem::{FieldP1, OperatorSet};

/// Data of one time step: minimize
/// `J(u) = ‖u − 2u_prev + u_prev2‖²/(2τ²) + [u]_s²/2`, optionally over
/// `lower <= u (<= upper)`.
#[derive(Debug, Clone, Copy)]
pub struct StepProblem<'a> {
    pub ops: &'a OperatorSet,
    pub tau: f64,
    pub u_prev: &'a FieldP1,
    pub u_prev2: &'a FieldP1,
    pub lower: Option<&'a FieldP1>,
    pub upper: Option<&'a FieldP1>,
}

/// Slack allowed when checking that the previous iterate is feasible.
const FEASIBILITY_SLACK: f64 = 1e-12;

impl<'a> StepProblem<'a> {
    pub fn new(
        ops: &'a OperatorSet,
        tau: f64,
        u_prev: &'a FieldP1,
        u_prev2: &'a FieldP1,
        lower: Option<&'a FieldP1>,
        upper: Option<&'a FieldP1>,
    ) -> Result<Self> {
        let problem = Self {
            ops,
            tau,
            u_prev,
            u_prev2,
            lower,
            upper,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Obstacle-free problem.
    pub fn free(
        ops: &'a OperatorSet,
        tau: f64,
        u_prev: &'a FieldP1,
        u_prev2: &'a FieldP1,
    ) -> Result<Self> {
        Self::new(ops, tau, u_prev, u_prev2, None, None)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "time step {} must be positive",
                self.tau
            )));
        }
        self.ops.check_compatible(self.u_prev)?;
        self.ops.check_compatible(self.u_prev2)?;
        if self.u_prev.bc_left() != self.u_prev2.bc_left()
            || self.u_prev.bc_right() != self.u_prev2.bc_right()
        {
            return Err(Error::InvalidProblem(
                "Dirichlet values must not change between time levels".into(),
            ));
        }
        if self.upper.is_some() && self.lower.is_none() {
            return Err(Error::InvalidProblem(
                "an upper obstacle requires a lower obstacle".into(),
            ));
        }
        if let Some(g) = self.lower {
            self.u_prev.ensure_same_grid(g)?;
            if !(g.bc_left() < self.u_prev.bc_left() && g.bc_right() < self.u_prev.bc_right()) {
                return Err(Error::InvalidProblem(format!(
                    "obstacle boundary values ({}, {}) must lie strictly below the Dirichlet data ({}, {})",
                    g.bc_left(),
                    g.bc_right(),
                    self.u_prev.bc_left(),
                    self.u_prev.bc_right()
                )));
            }
            for (j, (u, gj)) in self.u_prev.interior().iter().zip(g.interior()).enumerate() {
                if *u < gj - FEASIBILITY_SLACK * (1.0 + gj.abs()) {
                    return Err(Error::InvalidProblem(format!(
                        "previous state violates the obstacle at node {}: {u} < {gj}",
                        j + 1
                    )));
                }
            }
        }
        if let (Some(g), Some(f)) = (self.lower, self.upper) {
            self.u_prev.ensure_same_grid(f)?;
            for (j, (gj, fj)) in g.interior().iter().zip(f.interior()).enumerate() {
                if gj >= fj {
                    return Err(Error::InvalidProblem(format!(
                        "lower obstacle {gj} is not below upper obstacle {fj} at node {}",
                        j + 1
                    )));
                }
            }
            for (j, (u, fj)) in self.u_prev.interior().iter().zip(f.interior()).enumerate() {
                if *u > fj + FEASIBILITY_SLACK * (1.0 + fj.abs()) {
                    return Err(Error::InvalidProblem(format!(
                        "previous state violates the upper obstacle at node {}",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Inertial target `b = 2 u_prev − u_prev2`.
    pub fn target(&self) -> FieldP1 {
        self.u_prev
            .combine(2.0, self.u_prev2, -1.0)
            .expect("validated fields share a grid")
    }

    /// Lifts interior values to a field carrying this step's Dirichlet data.
    pub fn lift(&self, interior: Vec<f64>) -> FieldP1 {
        FieldP1::new(
            *self.u_prev.grid(),
            interior,
            self.u_prev.bc_left(),
            self.u_prev.bc_right(),
        )
        .expect("interior length matches grid")
    }

    /// `1/τ² + ‖A‖_∞`, the magnitude used for relative tolerances.
    pub fn scale(&self) -> f64 {
        use crate::grid_fem::SymmetricMatrix;
        1.0 / (self.tau * self.tau) + self.ops.stiffness().row_sum_norm()
    }
}

/// Projected-gradient parameters.
///
/// `grad_tol` is relative: iterations stop once the projected-gradient
/// ∞-norm is at most `grad_tol · (1/τ² + ‖A‖_∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Initial step; `None` uses `1 / (‖M‖_∞/τ² + ‖A‖_∞)`.
    pub step_init: Option<f64>,
    pub step_grow: f64,
    pub step_shrink: f64,
    /// Try an exact solve on the current active face when it stabilizes.
    pub refine: bool,
    /// Keep the objective value of every accepted iterate.
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 100_000,
            step_init: None,
            step_grow: 1.2,
            step_shrink: 0.5,
            refine: true,
            record_history: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::config("solver.grad_tol", "must be positive"));
        }
        if self.max_iters < 1 {
            return Err(Error::config("solver.max_iters", "must be at least 1"));
        }
        if let Some(a) = self.step_init {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::config("solver.step_init", "must be positive"));
            }
        }
        if !(self.step_grow > 1.0 && self.step_grow.is_finite()) {
            return Err(Error::config("solver.step_grow", "must exceed 1"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::config("solver.step_shrink", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub u_new: FieldP1,
    pub iterations: usize,
    pub final_residual: f64,
    /// Grid node indices where `u_new` touches the lower obstacle.
    pub active_set: Vec<usize>,
    /// Whether the answer came from the exact active-face solve.
    pub refined: bool,
    /// Objective per accepted iterate, when requested.
    pub objective_history: Vec<f64>,
}
