use crate::error::{Error, Result};
use crate::evolution::{run_evolution, TrajectoryRecord};
use crate::grid_fem::{mass_norm_sq, FieldP1};
use crate::scenario_io::ScenarioConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub n_steps: usize,
    /// `max_i ‖u_i − u(t_i)‖_{L²}`.
    pub error_max: f64,
    /// `(τ Σ_i ‖u_i − u(t_i)‖²_{L²})^{1/2}`.
    pub error_l2_space_time: f64,
    pub error_at_t: f64,
    /// `log2(e_{k−1} / e_k)` of `error_max` against the previous row.
    pub observed_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    /// Whether errors are against an exact solution or the finest level.
    pub self_referenced: bool,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[0].error_max / w[1].error_max)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n_cells,n_steps,error_max,error_l2_space_time,error_at_T,observed_rate\n",
        );
        for r in &self.rows {
            let rate = r.observed_rate.map_or(String::new(), |v| format!("{v:.6}"));
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{}\n",
                r.n_cells, r.n_steps, r.error_max, r.error_l2_space_time, r.error_at_t, rate
            ));
        }
        out
    }
}

/// Exact standing wave `u(t, x) = sin(x) cos(t)` on `(0, π)`.
pub fn standing_wave(t: f64, x: f64) -> f64 {
    x.sin() * t.cos()
}

/// Runs `base` at `(h, τ)`, `(h/2, τ/2)`, … for `levels` levels.
///
/// With an exact solution every level gets a row. Without one the finest
/// level is the reference and the coarser `levels − 1` levels get rows,
/// compared at shared nodes and times.
pub fn convergence_study(
    base: &ScenarioConfig,
    exact: Option<&dyn Fn(f64, f64) -> f64>,
    levels: usize,
) -> Result<ConvergenceTable> {
    let min_levels = if exact.is_some() { 1 } else { 2 };
    if levels < min_levels {
        return Err(Error::InvalidScenario(format!(
            "convergence study needs at least {min_levels} levels, got {levels}"
        )));
    }
    let records = (0..levels)
        .map(|k| {
            let factor = 1usize << k;
            let scenario = base.resolve_at(base.n_cells * factor, base.n_steps * factor)?;
            run_evolution(&scenario)
        })
        .collect::<Result<Vec<_>>>()?;

    let errors: Vec<Vec<f64>> = match exact {
        Some(exact) => records.iter().map(|r| errors_vs_exact(r, exact)).collect(),
        None => {
            let fine = records.last().expect("at least two levels");
            records[..levels - 1]
                .iter()
                .enumerate()
                .map(|(k, r)| errors_vs_reference(r, fine, 1 << (levels - 1 - k)))
                .collect()
        }
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(errors.len());
    for (r, e) in records.iter().zip(&errors) {
        let tau = r.tau();
        let error_max = e.iter().copied().fold(0.0, f64::max);
        let row = ConvergenceRow {
            n_cells: r.ops().grid().n_cells(),
            n_steps: r.n_steps(),
            error_max,
            error_l2_space_time: (tau * e.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            error_at_t: *e.last().expect("n_steps >= 1"),
            observed_rate: rows.last().map(|prev| (prev.error_max / error_max).log2()),
        };
        rows.push(row);
    }
    Ok(ConvergenceTable {
        self_referenced: exact.is_none(),
        rows,
    })
}

/// `‖u_i − u(t_i)‖_{L²}` for `i = 0..=n`.
fn errors_vs_exact(record: &TrajectoryRecord, exact: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    let grid = *record.ops().grid();
    let nodes = grid.nodes();
    (0..=record.n_steps() as isize)
        .map(|i| {
            let t = record.time(i);
            let u = record.snapshot(i);
            let diff: Vec<f64> = nodes
                .iter()
                .enumerate()
                .map(|(j, &x)| u.at_node(j) - exact(t, x))
                .collect();
            let e = FieldP1::from_nodal(grid, &diff).expect("nodal length matches");
            mass_norm_sq(&e).sqrt()
        })
        .collect()
}

/// Errors against a finer run whose grid and time step are `ratio` times finer.
fn errors_vs_reference(
    coarse: &TrajectoryRecord,
    fine: &TrajectoryRecord,
    ratio: usize,
) -> Vec<f64> {
    let grid = *coarse.ops().grid();
    (0..=coarse.n_steps() as isize)
        .map(|i| {
            let u = coarse.snapshot(i);
            let reference = fine.snapshot(i * ratio as isize);
            let diff: Vec<f64> = (0..=grid.n_cells())
                .map(|j| u.at_node(j) - reference.at_node(j * ratio))
                .collect();
            let e = FieldP1::from_nodal(grid, &diff).expect("nodal length matches");
            mass_norm_sq(&e).sqrt()
        })
        .collect()
}
