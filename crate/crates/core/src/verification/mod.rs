//! Discrete checks of the scheme's energy, variational and weak-form
//! properties, plus convergence studies and the stabilization detector.

mod convergence;
mod stabilization;
mod suite;

pub use convergence::{convergence_study, standing_wave, ConvergenceRow, ConvergenceTable};
pub use stabilization::{detect_stabilization, Impact, StabilizationReport};
pub use suite::{run_suite, CheckOutcome};

use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;
use crate::grid_fem::FieldP1;
use crate::step_solver::{kkt_residual, KktResidual, StepProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    pub passed: bool,
    pub first_violation: Option<usize>,
    /// Largest `E_i − E_{i−1}` over the run (negative when strictly decreasing).
    pub max_increase: f64,
}

/// `E_i <= E_{i−1} + tol` for every `i >= 1`.
pub fn check_energy_monotone(record: &TrajectoryRecord, tol: f64) -> MonotoneCheck {
    let e: Vec<f64> = record.energies().iter().map(|s| s.total()).collect();
    let mut first_violation = None;
    let mut max_increase = f64::NEG_INFINITY;
    for i in 1..e.len() {
        let inc = e[i] - e[i - 1];
        max_increase = max_increase.max(inc);
        if inc > tol && first_violation.is_none() {
            first_violation = Some(i);
        }
    }
    MonotoneCheck {
        passed: first_violation.is_none(),
        first_violation,
        max_increase: if e.len() > 1 { max_increase } else { 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyEstimateCheck {
    pub passed: bool,
    /// `E_0 = ‖v_0‖² + [u_0]_s²`.
    pub bound: f64,
    pub max_energy: f64,
}

/// `max_i E_i <= E_0 + tol`.
pub fn check_key_estimate(record: &TrajectoryRecord, tol: f64) -> KeyEstimateCheck {
    let bound = record.energy(0).total();
    let max_energy = record
        .energies()
        .iter()
        .map(|s| s.total())
        .fold(f64::NEG_INFINITY, f64::max);
    KeyEstimateCheck {
        passed: max_energy <= bound + tol,
        bound,
        max_energy,
    }
}

/// Smallest `u_i − g` over `i = 0..=n` and all nodes; `None` without an obstacle.
pub fn min_obstacle_gap(record: &TrajectoryRecord) -> Option<f64> {
    let g = record.scenario().lower.as_ref()?;
    let gap = (0..=record.n_steps() as isize)
        .flat_map(|i| {
            record
                .snapshot(i)
                .interior()
                .iter()
                .zip(g.interior())
                .map(|(u, g)| u - g)
                .collect::<Vec<_>>()
        })
        .fold(f64::INFINITY, f64::min);
    Some(gap)
}

/// KKT residuals of one recorded step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVi {
    pub step: usize,
    pub residual: KktResidual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViReport {
    pub passed: bool,
    pub tol: f64,
    pub steps: Vec<StepVi>,
    /// First step whose residuals exceed `tol`.
    pub first_failure: Option<usize>,
}

impl ViReport {
    pub fn worst(&self) -> KktResidual {
        self.steps.iter().fold(
            KktResidual {
                stationarity: 0.0,
                infeasibility: 0.0,
                complementarity: 0.0,
            },
            |acc, s| KktResidual {
                stationarity: acc.stationarity.max(s.residual.stationarity),
                infeasibility: acc.infeasibility.max(s.residual.infeasibility),
                complementarity: acc.complementarity.max(s.residual.complementarity),
            },
        )
    }
}

/// Per-step check of `r_i >= 0`, `u_i >= g` and `r_iᵀ(u_i − g) = 0` with
/// `r_i = M(u_i − 2u_{i−1} + u_{i−2})/τ² + A u_i`. Without an obstacle this
/// reduces to `‖r_i‖_∞ <= tol`.
pub fn check_variational_inequality(record: &TrajectoryRecord, tol: f64) -> Result<ViReport> {
    let sc = record.scenario();
    let mut steps = Vec::with_capacity(record.n_steps());
    let mut first_failure = None;
    for i in 1..=record.n_steps() {
        let problem = StepProblem {
            ops: record.ops(),
            tau: record.tau(),
            u_prev: record.snapshot(i as isize - 1),
            u_prev2: record.snapshot(i as isize - 2),
            lower: sc.lower.as_ref(),
            upper: None,
        };
        let residual = kkt_residual(&problem, record.snapshot(i as isize))?;
        if residual.max() > tol && first_failure.is_none() {
            first_failure = Some(i);
        }
        steps.push(StepVi { step: i, residual });
    }
    Ok(ViReport {
        passed: first_failure.is_none(),
        tol,
        steps,
        first_failure,
    })
}

/// Time factor of a separable test function: a smooth bump
/// `exp(1 − 1/(1 − ((t − center)/radius)²))` supported in `center ± radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBump {
    pub center: f64,
    pub radius: f64,
}

impl TimeBump {
    pub fn eval(&self, t: f64) -> f64 {
        let z = (t - self.center) / self.radius;
        if z.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - z * z)).exp()
        }
    }
}

/// Test function `φ(x) η(t)`; `space` must vanish on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTest {
    pub space: FieldP1,
    pub time: TimeBump,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakFormReport {
    /// `|R|` per test function.
    pub residuals: Vec<f64>,
    /// `Σ_i |η(t_i)| (‖v_i − v_{i−1}‖_M ‖φ‖_M + τ [u_i]_s [φ]_s)` per test function.
    pub scales: Vec<f64>,
}

impl WeakFormReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `|R| / scale` (zero when both vanish).
    pub fn max_relative(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.scales)
            .map(|(r, s)| if *r == 0.0 { 0.0 } else { r / s })
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residuals
            .iter()
            .zip(&self.scales)
            .all(|(r, s)| *r <= tol * s)
    }
}

/// Signed space-time residuals
/// `R = Σ_{i=1..n} η(t_i) [ (v_i − v_{i−1})ᵀ M φ + τ [u_i, φ]_s ]`.
pub fn weak_form_residuals(
    record: &TrajectoryRecord,
    tests: &[SeparableTest],
) -> Result<Vec<(f64, f64)>> {
    let ops = record.ops();
    let t_final = record.time(record.n_steps() as isize);
    let tau = record.tau();
    tests
        .iter()
        .map(|test| {
            ops.check_compatible(&test.space)?;
            if !test.space.has_zero_boundary() {
                return Err(Error::Incompatible(
                    "spatial test function must vanish on the boundary".into(),
                ));
            }
            let TimeBump { center, radius } = test.time;
            if !(radius > 0.0 && center - radius >= 0.0 && center + radius <= t_final) {
                return Err(Error::Incompatible(format!(
                    "time bump [{}, {}] not inside [0, {t_final}]",
                    center - radius,
                    center + radius
                )));
            }
            let phi_m = ops.mass_form(&test.space, &test.space)?.sqrt();
            let phi_a = ops.stiffness_form(&test.space, &test.space)?.sqrt();
            let mut sum = 0.0;
            let mut scale = 0.0;
            for i in 1..=record.n_steps() {
                let eta = test.time.eval(record.time(i as isize));
                if eta == 0.0 {
                    continue;
                }
                let dv = record
                    .velocity(i)
                    .combine(1.0, record.velocity(i - 1), -1.0)?;
                let u = record.snapshot(i as isize);
                let inertial = ops.mass_form(&dv, &test.space)?;
                let elastic = tau * ops.stiffness_form(u, &test.space)?;
                sum += eta * (inertial + elastic);
                scale += eta.abs()
                    * (ops.mass_form(&dv, &dv)?.sqrt() * phi_m
                        + tau * ops.stiffness_form(u, u)?.sqrt() * phi_a);
            }
            Ok((sum, scale))
        })
        .collect()
}

/// Discrete weak form of the free wave equation; exact up to solver
/// tolerance on obstacle-free runs.
pub fn check_weak_form_free(
    record: &TrajectoryRecord,
    tests: &[SeparableTest],
) -> Result<WeakFormReport> {
    let pairs = weak_form_residuals(record, tests)?;
    Ok(WeakFormReport {
        residuals: pairs.iter().map(|(r, _)| r.abs()).collect(),
        scales: pairs.iter().map(|(_, s)| *s).collect(),
    })
}

/// `F(t_i) = ∫ v_i φ` for `i = 0..=n`, recorded for inspection of its
/// jumps at impacts.
pub fn velocity_moment_series(record: &TrajectoryRecord, phi: &FieldP1) -> Result<Vec<(f64, f64)>> {
    (0..=record.n_steps())
        .map(|i| {
            let f = record.ops().mass_form(record.velocity(i), phi)?;
            Ok((record.time(i as isize), f))
        })
        .collect()
}
