//! Time stepping, trajectory records and their time interpolants.

use crate::error::{Error, Result};
use crate::grid_fem::{FieldP1, FractionalOrder, Grid1D, OperatorSet};
use crate::step_solver::{SolverConfig, StepProblem, StepSystem};

/// Everything needed to run one evolution.
///
/// Dirichlet data are the boundary values of `u0`; `v0` must vanish on the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub grid: Grid1D,
    pub order: FractionalOrder,
    pub t_final: f64,
    pub n_steps: usize,
    pub u0: FieldP1,
    pub v0: FieldP1,
    pub lower: Option<FieldP1>,
    pub upper: Option<FieldP1>,
    pub solver: SolverConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time {} must be positive", self.t_final));
        }
        if self.n_steps < 1 {
            return bad("need at least one time step".into());
        }
        for (name, f) in [("u0", &self.u0), ("v0", &self.v0)] {
            if *f.grid() != self.grid {
                return bad(format!("{name} lives on a different grid"));
            }
        }
        if !self.v0.has_zero_boundary() {
            return bad("v0 must vanish on the boundary".into());
        }
        if !self.order.is_local() && !self.u0.has_zero_boundary() {
            return bad(format!(
                "s = {} < 1 requires zero exterior data, got boundary values ({}, {})",
                self.order.value(),
                self.u0.bc_left(),
                self.u0.bc_right()
            ));
        }
        if self.upper.is_some() && self.lower.is_none() {
            return bad("an upper obstacle requires a lower obstacle".into());
        }
        if let Some(g) = &self.lower {
            if *g.grid() != self.grid {
                return bad("obstacle lives on a different grid".into());
            }
            if !(g.bc_left() < self.u0.bc_left() && g.bc_right() < self.u0.bc_right()) {
                return bad("obstacle must lie strictly below the boundary data".into());
            }
            if let Some(j) =
                (0..g.interior().len()).find(|&j| self.u0.interior()[j] < g.interior()[j])
            {
                return bad(format!("u0 lies below the obstacle at node {}", j + 1));
            }
        }
        if let (Some(g), Some(f)) = (&self.lower, &self.upper) {
            if *f.grid() != self.grid {
                return bad("upper obstacle lives on a different grid".into());
            }
            let n = g.interior().len();
            if let Some(j) = (0..n).find(|&j| g.interior()[j] >= f.interior()[j]) {
                return bad(format!("obstacles cross at node {}", j + 1));
            }
            if let Some(j) = (0..n).find(|&j| self.u0.interior()[j] > f.interior()[j]) {
                return bad(format!(
                    "u0 lies above the upper obstacle at node {}",
                    j + 1
                ));
            }
        }
        self.solver.validate()
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    /// `‖v‖²` in the mass-matrix norm.
    pub kinetic: f64,
    /// `[u]_s²`.
    pub seminorm_sq: f64,
}

impl EnergySample {
    pub fn total(&self) -> f64 {
        self.kinetic + self.seminorm_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub iterations: usize,
    pub final_residual: f64,
    pub refined: bool,
}

/// Discrete trajectory `u_{−1}, u_0, …, u_n` with derived velocities,
/// energies and contact sets.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    scenario: Scenario,
    ops: OperatorSet,
    snapshots: Vec<FieldP1>,
    velocities: Vec<FieldP1>,
    energies: Vec<EnergySample>,
    stats: Vec<StepStats>,
    contacts: Vec<Vec<usize>>,
}

impl TrajectoryRecord {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn ops(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn n_steps(&self) -> usize {
        self.scenario.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.scenario.tau()
    }

    /// `t_i = i τ`, for `i >= −1`.
    pub fn time(&self, i: isize) -> f64 {
        i as f64 * self.tau()
    }

    /// `u_i` for `i = −1..=n`.
    pub fn snapshot(&self, i: isize) -> &FieldP1 {
        &self.snapshots[(i + 1) as usize]
    }

    /// `v_i = (u_i − u_{i−1})/τ` for `i >= 1`; `v_0` is the initial datum.
    pub fn velocity(&self, i: usize) -> &FieldP1 {
        &self.velocities[i]
    }

    pub fn energy(&self, i: usize) -> &EnergySample {
        &self.energies[i]
    }

    pub fn energies(&self) -> &[EnergySample] {
        &self.energies
    }

    /// Solver statistics of step `i` (`1..=n`).
    pub fn stats(&self, i: usize) -> &StepStats {
        &self.stats[i - 1]
    }

    /// Grid nodes touching the lower obstacle at step `i` (`0..=n`).
    pub fn contacts(&self, i: usize) -> &[usize] {
        &self.contacts[i]
    }

    /// Replaces one energy sample; used to build synthetic negative fixtures.
    pub fn with_energy(mut self, i: usize, sample: EnergySample) -> Self {
        self.energies[i] = sample;
        self
    }

    /// Replaces snapshot `u_i` without recomputing derived data.
    pub fn with_snapshot(mut self, i: isize, u: FieldP1) -> Self {
        self.snapshots[(i + 1) as usize] = u;
        self
    }
}

/// Runs the scheme: `u_{−1} = u0 − τ v0`, `u_0 = u0`, then one step solve per
/// time level (projected gradient when an obstacle is present).
pub fn run_evolution(scenario: &Scenario) -> Result<TrajectoryRecord> {
    scenario.validate()?;
    let ops = OperatorSet::new(scenario.grid, scenario.order)?;
    let tau = scenario.tau();
    let n = scenario.n_steps;
    let system = StepSystem::new(&ops, tau)?;

    let u0 = scenario.u0.clone();
    let u_m1 = u0.combine(1.0, &scenario.v0, -tau)?;
    let mut snapshots = Vec::with_capacity(n + 2);
    snapshots.push(u_m1);
    snapshots.push(u0);
    let mut stats = Vec::with_capacity(n);
    for i in 1..=n {
        let result = {
            let problem = StepProblem::new(
                &ops,
                tau,
                &snapshots[i],
                &snapshots[i - 1],
                scenario.lower.as_ref(),
                scenario.upper.as_ref(),
            )
            .map_err(|e| step_error(i, e))?;
            if problem.lower.is_some() {
                system.solve_constrained(&problem, &scenario.solver)
            } else {
                system.solve_unconstrained(&problem)
            }
            .map_err(|e| step_error(i, e))?
        };
        stats.push(StepStats {
            iterations: result.iterations,
            final_residual: result.final_residual,
            refined: result.refined,
        });
        snapshots.push(result.u_new);
    }

    let mut velocities = Vec::with_capacity(n + 1);
    velocities.push(scenario.v0.clone());
    for i in 1..=n {
        velocities.push(snapshots[i + 1].combine(1.0 / tau, &snapshots[i], -1.0 / tau)?);
    }
    let energies = (0..=n)
        .map(|i| energy_sample(&snapshots[i + 1], &velocities[i], &ops))
        .collect::<Result<Vec<_>>>()?;
    let contacts = match &scenario.lower {
        Some(g) => (0..=n)
            .map(|i| contact_set(&snapshots[i + 1], g, crate::step_solver::ACTIVE_TOL))
            .collect::<Result<Vec<_>>>()?,
        None => vec![Vec::new(); n + 1],
    };
    Ok(TrajectoryRecord {
        scenario: scenario.clone(),
        ops,
        snapshots,
        velocities,
        energies,
        stats,
        contacts,
    })
}

fn step_error(step: usize, source: Error) -> Error {
    Error::Step {
        step,
        source: Box::new(source),
    }
}

pub fn energy_sample(u: &FieldP1, v: &FieldP1, ops: &OperatorSet) -> Result<EnergySample> {
    Ok(EnergySample {
        kinetic: ops.mass_form(v, v)?,
        seminorm_sq: ops.stiffness_form(u, u)?,
    })
}

/// `E = ‖v‖² + [u]_s²` on lifted fields.
pub fn energy(u: &FieldP1, v: &FieldP1, ops: &OperatorSet) -> Result<f64> {
    energy_sample(u, v, ops).map(|e| e.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolantKind {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// Evaluates the piecewise-constant (`u_i` on `(t_{i−1}, t_i]`) or
/// piecewise-linear interpolant of the trajectory at time `t ∈ [−τ, T]`.
pub fn interpolant_eval(
    record: &TrajectoryRecord,
    t: f64,
    kind: InterpolantKind,
) -> Result<FieldP1> {
    let tau = record.tau();
    let n = record.n_steps() as isize;
    let (lo, hi) = (-tau, record.time(n));
    let slack = 1e-12 * hi.abs().max(tau);
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(Error::TimeOutOfRange { t, lo, hi });
    }
    let x = t / tau;
    let nearest = x.round();
    let on_node = (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0);
    let i = if on_node {
        nearest as isize
    } else {
        x.ceil() as isize
    };
    let i = i.clamp(-1, n);
    if i == -1 || on_node {
        return Ok(record.snapshot(i).clone());
    }
    match kind {
        InterpolantKind::PiecewiseConstant => Ok(record.snapshot(i).clone()),
        InterpolantKind::PiecewiseLinear => {
            let w = ((t - record.time(i - 1)) / tau).clamp(0.0, 1.0);
            record
                .snapshot(i)
                .combine(w, record.snapshot(i - 1), 1.0 - w)
        }
    }
}

/// Grid nodes `j` with `u_j − g_j <= tol (1 + |g_j|)`.
pub fn contact_set(u: &FieldP1, g: &FieldP1, tol: f64) -> Result<Vec<usize>> {
    u.ensure_same_grid(g)?;
    Ok(u.interior()
        .iter()
        .zip(g.interior())
        .enumerate()
        .filter(|(_, (u, g))| *u - *g <= tol * (1.0 + g.abs()))
        .map(|(j, _)| j + 1)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fem::interpolate_function;
    use crate::step_solver::solve_unconstrained;
    use std::f64::consts::PI;

    fn free_sine(n_cells: usize, n_steps: usize, t_final: f64) -> Scenario {
        let grid = Grid1D::new(0.0, PI, n_cells).unwrap();
        Scenario {
            grid,
            order: FractionalOrder::LAPLACIAN,
            t_final,
            n_steps,
            u0: interpolate_function(grid, f64::sin, 0.0, 0.0).unwrap(),
            v0: FieldP1::zeros(grid),
            lower: None,
            upper: None,
            solver: SolverConfig::default(),
        }
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let mut sc = free_sine(10, 5, 1.0);
        sc.u0 = FieldP1::zeros(sc.grid);
        let rec = run_evolution(&sc).unwrap();
        for i in -1..=5 {
            assert!(rec.snapshot(i).max_abs() == 0.0);
        }
        assert!(rec.energies().iter().all(|e| e.total() == 0.0));
    }

    #[test]
    fn single_step_matches_direct_solve() {
        let sc = free_sine(6, 1, 0.3);
        let rec = run_evolution(&sc).unwrap();
        let ops = OperatorSet::new(sc.grid, sc.order).unwrap();
        let problem = StepProblem::free(&ops, 0.3, rec.snapshot(0), rec.snapshot(-1)).unwrap();
        let direct = solve_unconstrained(&problem).unwrap();
        assert_eq!(&direct.u_new, rec.snapshot(1));
    }

    #[test]
    fn initial_snapshots() {
        let mut sc = free_sine(8, 4, 1.0);
        sc.v0 = interpolate_function(sc.grid, |x| x * (PI - x), 0.0, 0.0).unwrap();
        let rec = run_evolution(&sc).unwrap();
        assert_eq!(rec.snapshot(0), &sc.u0);
        let back = rec
            .snapshot(0)
            .combine(1.0 / sc.tau(), rec.snapshot(-1), -1.0 / sc.tau())
            .unwrap();
        for (a, b) in back.interior().iter().zip(sc.v0.interior()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_energy() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let ops = OperatorSet::new(g, FractionalOrder::LAPLACIAN).unwrap();
        let e = energy(&FieldP1::hat(g, 4), &FieldP1::zeros(g), &ops).unwrap();
        assert!((e - 2.0 / g.h()).abs() < 1e-12);
        assert_eq!(
            energy(&FieldP1::zeros(g), &FieldP1::zeros(g), &ops).unwrap(),
            0.0
        );
    }

    #[test]
    fn interpolants_at_nodes_and_midpoints() {
        let rec = run_evolution(&free_sine(12, 10, 1.0)).unwrap();
        let tau = rec.tau();
        for i in [0isize, 3, 10] {
            let t = rec.time(i);
            let c = interpolant_eval(&rec, t, InterpolantKind::PiecewiseConstant).unwrap();
            let l = interpolant_eval(&rec, t, InterpolantKind::PiecewiseLinear).unwrap();
            assert_eq!(&c, rec.snapshot(i));
            for (a, b) in l.interior().iter().zip(rec.snapshot(i).interior()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
        let mid = interpolant_eval(&rec, 4.5 * tau, InterpolantKind::PiecewiseLinear).unwrap();
        let avg = rec.snapshot(5).combine(0.5, rec.snapshot(4), 0.5).unwrap();
        for (a, b) in mid.interior().iter().zip(avg.interior()) {
            assert!((a - b).abs() < 1e-14);
        }
        let c = interpolant_eval(&rec, 4.5 * tau, InterpolantKind::PiecewiseConstant).unwrap();
        assert_eq!(&c, rec.snapshot(5));
        assert_eq!(
            &interpolant_eval(&rec, -tau, InterpolantKind::PiecewiseConstant).unwrap(),
            rec.snapshot(-1)
        );
        assert!(matches!(
            interpolant_eval(&rec, 1.5, InterpolantKind::PiecewiseLinear),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn contact_set_edge_cases() {
        let g = Grid1D::new(0.0, 1.0, 6).unwrap();
        let obstacle = interpolate_function(g, |x| x - 0.5, -1.0, -1.0).unwrap();
        assert_eq!(
            contact_set(&obstacle, &obstacle, 1e-9).unwrap(),
            vec![1, 2, 3, 4, 5]
        );
        let above = obstacle
            .combine(1.0, &FieldP1::constant(g, 1.0), 1.0)
            .unwrap();
        assert!(contact_set(&above, &obstacle, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn scenario_validation() {
        let mut sc = free_sine(8, 4, 1.0);
        sc.order = FractionalOrder::new(0.5).unwrap();
        sc.u0 = FieldP1::constant(sc.grid, 1.0);
        assert!(matches!(run_evolution(&sc), Err(Error::InvalidScenario(_))));

        let mut sc = free_sine(8, 4, 1.0);
        sc.lower = Some(FieldP1::constant(sc.grid, 0.5));
        assert!(matches!(run_evolution(&sc), Err(Error::InvalidScenario(_))));

        let mut sc = free_sine(8, 0, 1.0);
        sc.n_steps = 0;
        assert!(run_evolution(&sc).is_err());
    }
}
