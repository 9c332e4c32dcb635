//! One time step of the minimizing-movement scheme.

mod oracle;
mod problem;
mod system;

pub use oracle::oracle_active_set_solve;
pub use problem::{SolverConfig, StepProblem, StepResult};
pub use system::StepSystem;

use crate::error::{Error, Result};
use crate::evolution::contact_set;
use crate::grid_fem::{FieldP1, SymmetricMatrix};
use crate::linalg::inf_norm;

/// Nodes within this relative distance of the obstacle count as active.
pub const ACTIVE_TOL: f64 = 1e-9;

/// Step objective `J(u) = ‖u − b‖²/(2τ²) + [u]_s²/2` with `b = 2u_prev − u_prev2`.
pub fn objective(problem: &StepProblem<'_>, u: &FieldP1) -> Result<f64> {
    let ops = problem.ops;
    ops.check_compatible(u)?;
    let diff = u.combine(1.0, &problem.target(), -1.0)?;
    let tau2 = problem.tau * problem.tau;
    Ok(ops.mass_form(&diff, &diff)? / (2.0 * tau2) + 0.5 * ops.stiffness_form(u, u)?)
}

/// Gradient of [`objective`] with respect to the interior values of `u`,
/// `M(u − b)/τ² + A u` on lifted fields.
pub fn residual_vector(problem: &StepProblem<'_>, u: &FieldP1) -> Result<Vec<f64>> {
    let ops = problem.ops;
    ops.check_compatible(u)?;
    let diff = u.combine(1.0, &problem.target(), -1.0)?;
    let inv_tau2 = 1.0 / (problem.tau * problem.tau);
    let m = ops.mass_apply_lifted(&diff)?;
    let a = ops.stiffness_apply_lifted(u)?;
    Ok(m.iter().zip(&a).map(|(m, a)| m * inv_tau2 + a).collect())
}

/// Solves the obstacle-free step, `(M/τ² + A) u = M b/τ²` with lifting.
pub fn solve_unconstrained(problem: &StepProblem<'_>) -> Result<StepResult> {
    let system = StepSystem::new(problem.ops, problem.tau)?;
    system.solve_unconstrained(problem)
}

/// Minimizes the step objective over `lower <= u (<= upper)` by projected
/// gradient descent with adaptive step length.
pub fn solve_constrained(problem: &StepProblem<'_>, config: &SolverConfig) -> Result<StepResult> {
    let system = StepSystem::new(problem.ops, problem.tau)?;
    system.solve_constrained(problem, config)
}

impl StepSystem<'_> {
    pub fn solve_unconstrained(&self, problem: &StepProblem<'_>) -> Result<StepResult> {
        if problem.lower.is_some() || problem.upper.is_some() {
            return Err(Error::InvalidProblem(
                "unconstrained solve called on an obstacle problem".into(),
            ));
        }
        let k = self.affine_term(problem);
        let rhs: Vec<f64> = k.iter().map(|v| -v).collect();
        let x = self.solve(&rhs)?;
        let residual = inf_norm(&self.gradient(&x, &k));
        if !residual.is_finite() || residual > 1e-6 * problem.scale() * (1.0 + inf_norm(&x)) {
            return Err(Error::Singular(format!(
                "linear solve residual {residual:e} is not small"
            )));
        }
        let u_new = problem.lift(x);
        let mut objective_history = Vec::new();
        if let Ok(j) = objective(problem, &u_new) {
            objective_history.push(j);
        }
        Ok(StepResult {
            u_new,
            iterations: 0,
            final_residual: residual,
            active_set: Vec::new(),
            refined: true,
            objective_history,
        })
    }

    /// Projected gradient warm-started at `u_prev`.
    pub fn solve_constrained(
        &self,
        problem: &StepProblem<'_>,
        config: &SolverConfig,
    ) -> Result<StepResult> {
        self.solve_constrained_from(problem, config, problem.u_prev.interior())
    }

    /// Projected gradient from an arbitrary start (projected onto the
    /// feasible box first).
    pub fn solve_constrained_from(
        &self,
        problem: &StepProblem<'_>,
        config: &SolverConfig,
        start: &[f64],
    ) -> Result<StepResult> {
        config.validate()?;
        if start.len() != self.dim() {
            return Err(Error::Incompatible(format!(
                "start has {} values, expected {}",
                start.len(),
                self.dim()
            )));
        }
        let lower = problem.lower.ok_or_else(|| {
            Error::InvalidProblem("constrained solve requires a lower obstacle".into())
        })?;
        let lo = lower.interior();
        let hi = problem.upper.map(|f| f.interior());
        let n = self.dim();
        let clamp = |j: usize, v: f64| {
            let v = v.max(lo[j]);
            match hi {
                Some(hi) => v.min(hi[j]),
                None => v,
            }
        };
        let pinned = |x: &[f64]| -> Vec<bool> {
            (0..n)
                .map(|j| x[j] <= lo[j] || hi.is_some_and(|hi| x[j] >= hi[j]))
                .collect()
        };
        let projected_norm = |x: &[f64], g: &[f64]| -> f64 {
            (0..n)
                .map(|j| {
                    let at_lo = x[j] <= lo[j] && g[j] > 0.0;
                    let at_hi = hi.is_some_and(|hi| x[j] >= hi[j]) && g[j] < 0.0;
                    if at_lo || at_hi {
                        0.0
                    } else {
                        g[j].abs()
                    }
                })
                .fold(0.0, f64::max)
        };

        let tol = config.grad_tol * problem.scale();
        let k = self.affine_term(problem);
        let mut x: Vec<f64> = start
            .iter()
            .enumerate()
            .map(|(j, v)| clamp(j, *v))
            .collect();
        let mut grad = self.gradient(&x, &k);
        let inv_tau2 = 1.0 / (self.tau() * self.tau());
        let mut alpha = config.step_init.unwrap_or_else(|| {
            1.0 / (self.ops().mass().row_sum_norm() * inv_tau2
                + self.ops().stiffness().row_sum_norm())
        });

        let mut history = Vec::new();
        let mut record = |x: &[f64]| {
            if config.record_history {
                let j = objective(problem, &problem.lift(x.to_vec()))
                    .expect("validated problem is compatible");
                history.push(j);
            }
        };
        record(&x);

        let mut iterations = 0usize;
        let mut refined = false;
        let mut face = pinned(&x);
        let mut face_age = usize::MAX;
        let mut face_tried = false;
        loop {
            let residual = projected_norm(&x, &grad);
            if residual <= tol {
                break;
            }
            if config.refine && face_age >= 2 && !face_tried {
                face_tried = true;
                if let Ok(candidate) = self.solve_on_face(&x, &face, &k) {
                    let feasible = (0..n).all(|j| clamp(j, candidate[j]) == candidate[j]);
                    if feasible {
                        let g_candidate = self.gradient(&candidate, &k);
                        if projected_norm(&candidate, &g_candidate) <= tol {
                            x = candidate;
                            grad = g_candidate;
                            refined = true;
                            record(&x);
                            continue;
                        }
                    }
                    // Projected Newton step towards the face minimizer.
                    if iterations < config.max_iters {
                        let trial: Vec<f64> = (0..n).map(|j| clamp(j, candidate[j])).collect();
                        let d: Vec<f64> = trial.iter().zip(&x).map(|(t, v)| t - v).collect();
                        let hd = self.apply(&d);
                        if self.objective_change(&grad, &d, &hd) < 0.0 {
                            x = trial;
                            grad = self.gradient(&x, &k);
                            iterations += 1;
                            record(&x);
                            let next_face = pinned(&x);
                            if next_face != face {
                                face = next_face;
                                face_tried = false;
                            }
                            continue;
                        }
                    }
                }
            }
            if iterations >= config.max_iters {
                return Err(Error::MaxIterations {
                    iterations,
                    residual,
                    best: Box::new(problem.lift(x)),
                });
            }
            loop {
                let trial: Vec<f64> = (0..n).map(|j| clamp(j, x[j] - alpha * grad[j])).collect();
                let d: Vec<f64> = trial.iter().zip(&x).map(|(t, v)| t - v).collect();
                let hd = self.apply(&d);
                if self.objective_change(&grad, &d, &hd) <= 0.0 {
                    x = trial;
                    for (g, h) in grad.iter_mut().zip(&hd) {
                        *g += h;
                    }
                    alpha *= config.step_grow;
                    break;
                }
                alpha *= config.step_shrink;
                if alpha < f64::MIN_POSITIVE {
                    return Err(Error::MaxIterations {
                        iterations,
                        residual,
                        best: Box::new(problem.lift(x)),
                    });
                }
            }
            iterations += 1;
            record(&x);
            let next_face = pinned(&x);
            if next_face == face {
                face_age = face_age.saturating_add(1);
            } else {
                face = next_face;
                face_age = 0;
                face_tried = false;
            }
        }

        let final_residual = projected_norm(&x, &grad);
        let u_new = problem.lift(x);
        let active_set = contact_set(&u_new, lower, ACTIVE_TOL)?;
        Ok(StepResult {
            u_new,
            iterations,
            final_residual,
            active_set,
            refined,
            objective_history: history,
        })
    }
}

/// Discrete KKT / variational-inequality residuals of a candidate step solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual {
    /// ∞-norm of the negative part of `r` (of all of `r` without an obstacle).
    pub stationarity: f64,
    /// ∞-norm of `max(g − u, 0)`.
    pub infeasibility: f64,
    /// `|rᵀ(u − g)| / max(1, ‖u − g‖₁)`.
    pub complementarity: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.infeasibility)
            .max(self.complementarity)
    }
}

/// Residuals of `r = M(u − b)/τ² + A u` against the lower-obstacle conditions
/// `r >= 0`, `u >= g`, `rᵀ(u − g) = 0`. An upper obstacle is ignored.
pub fn kkt_residual(problem: &StepProblem<'_>, u: &FieldP1) -> Result<KktResidual> {
    let r = residual_vector(problem, u)?;
    let Some(g) = problem.lower else {
        return Ok(KktResidual {
            stationarity: inf_norm(&r),
            infeasibility: 0.0,
            complementarity: 0.0,
        });
    };
    u.ensure_same_grid(g)?;
    let gap: Vec<f64> = u
        .interior()
        .iter()
        .zip(g.interior())
        .map(|(u, g)| u - g)
        .collect();
    let stationarity = r.iter().fold(0.0_f64, |m, v| m.max(-v));
    let infeasibility = gap.iter().fold(0.0_f64, |m, v| m.max(-v));
    let l1: f64 = gap.iter().map(|v| v.abs()).sum();
    let pairing: f64 = r.iter().zip(&gap).map(|(a, b)| a * b).sum();
    Ok(KktResidual {
        stationarity,
        infeasibility,
        complementarity: pairing.abs() / l1.max(1.0),
    })
}
