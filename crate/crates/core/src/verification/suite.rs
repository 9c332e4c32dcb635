use std::f64::consts::PI;

use crate::error::Result;
use crate::evolution::TrajectoryRecord;
use crate::grid_fem::{interpolate_function, FieldP1, SymmetricMatrix};

use super::{
    check_energy_monotone, check_key_estimate, check_variational_inequality, check_weak_form_free,
    min_obstacle_gap, SeparableTest, TimeBump,
};

/// Relative slack on energy inequalities.
pub const ENERGY_TOL: f64 = 1e-8;
/// Relative bound on the free-run weak-form residual.
pub const WEAK_FORM_TOL: f64 = 1e-8;
/// Allowed obstacle penetration.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every applicable check on a record.
pub fn run_suite(record: &TrajectoryRecord) -> Result<Vec<CheckOutcome>> {
    let sc = record.scenario();
    let e0 = record.energy(0).total();
    let eps_e = ENERGY_TOL * e0.max(1.0);
    let mut out = Vec::new();

    out.push(CheckOutcome {
        name: "initial-data",
        passed: record.snapshot(0) == &sc.u0 && record.velocity(0) == &sc.v0,
        detail: "u_0 and v_0 reproduce the data".into(),
    });

    let mono = check_energy_monotone(record, eps_e);
    out.push(CheckOutcome {
        name: "energy-monotone",
        passed: mono.passed,
        detail: format!(
            "max E_i - E_(i-1) = {:.3e} (tol {:.3e}){}",
            mono.max_increase,
            eps_e,
            mono.first_violation
                .map_or(String::new(), |i| format!(", first violation at step {i}"))
        ),
    });

    let key = check_key_estimate(record, eps_e);
    out.push(CheckOutcome {
        name: "key-estimate",
        passed: key.passed,
        detail: format!(
            "max E_i = {:.12e}, E_0 = {:.12e}",
            key.max_energy, key.bound
        ),
    });

    if let Some(gap) = min_obstacle_gap(record) {
        out.push(CheckOutcome {
            name: "feasibility",
            passed: gap >= -FEASIBILITY_TOL,
            detail: format!("min u_i - g = {gap:.3e}"),
        });
        let scale = 1.0 / (record.tau() * record.tau()) + record.ops().stiffness().row_sum_norm();
        let tol = 100.0 * sc.solver.grad_tol * scale;
        let vi = check_variational_inequality(record, tol)?;
        let worst = vi.worst();
        out.push(CheckOutcome {
            name: "variational-inequality",
            passed: vi.passed || sc.upper.is_some(),
            detail: format!(
                "worst stationarity {:.3e}, infeasibility {:.3e}, complementarity {:.3e} (tol {:.3e}){}",
                worst.stationarity,
                worst.infeasibility,
                worst.complementarity,
                tol,
                if sc.upper.is_some() { ", double obstacle: informational" } else { "" }
            ),
        });
    } else {
        let tests = default_test_functions(record);
        let report = check_weak_form_free(record, &tests)?;
        out.push(CheckOutcome {
            name: "weak-form",
            passed: report.passes(WEAK_FORM_TOL),
            detail: format!(
                "{} test functions, max |R|/scale = {:.3e}",
                tests.len(),
                report.max_relative()
            ),
        });
    }
    Ok(out)
}

/// Deterministic family of 20 separable test functions: sine modes and hats
/// in space, bumps at several positions in time.
pub fn default_test_functions(record: &TrajectoryRecord) -> Vec<SeparableTest> {
    let grid = *record.ops().grid();
    let t_final = record.time(record.n_steps() as isize);
    let (a, len) = (grid.a(), grid.b() - grid.a());
    let mut spaces: Vec<FieldP1> = (1..=3)
        .map(|k| {
            interpolate_function(grid, |x| (k as f64 * PI * (x - a) / len).sin(), 0.0, 0.0)
                .expect("finite profile")
        })
        .collect();
    let n = grid.n_cells();
    spaces.extend(
        [n / 4, n / 2, (3 * n) / 4]
            .iter()
            .map(|&j| FieldP1::hat(grid, j.clamp(1, n - 1))),
    );
    let mut tests = Vec::new();
    let mut c = 0usize;
    while tests.len() < 20 {
        let space = spaces[c % spaces.len()].clone();
        let center = t_final * (0.2 + 0.6 * ((c * 7) % 11) as f64 / 10.0);
        let radius = (0.15 + 0.05 * (c % 4) as f64) * t_final;
        let radius = radius.min(center).min(t_final - center);
        tests.push(SeparableTest {
            space,
            time: TimeBump { center, radius },
        });
        c += 1;
    }
    tests
}
