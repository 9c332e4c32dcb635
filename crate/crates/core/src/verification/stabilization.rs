use serde::Serialize;

use crate::evolution::TrajectoryRecord;

/// A maximal run of steps with a nonempty contact set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Impact {
    pub step_start: usize,
    pub step_end: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// `E` just before the first contact step minus `E` just after the last one.
    pub energy_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizationReport {
    pub osc_tol: f64,
    pub t_bar: Option<f64>,
    pub t_bar_step: Option<usize>,
    /// `max_{i >= k} |E_i − E_k|` for the detected `t̄ = t_k`.
    pub post_t_bar_energy_oscillation: f64,
    pub impacts: Vec<Impact>,
}

/// Finds the first grid time `t̄ = t_k` after which the energy stays within
/// `osc_tol · E_0` of `E_k`, and lists the impact intervals.
pub fn detect_stabilization(record: &TrajectoryRecord, osc_tol: f64) -> StabilizationReport {
    let e: Vec<f64> = record.energies().iter().map(|s| s.total()).collect();
    let n = e.len();
    let band = osc_tol * e[0];

    // Suffix extrema give max_{i >= k} |E_i − E_k| in one pass.
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    let mut suffix_min = vec![f64::INFINITY; n];
    for k in (0..n).rev() {
        let (hi, lo) = if k + 1 < n {
            (suffix_max[k + 1], suffix_min[k + 1])
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        suffix_max[k] = hi.max(e[k]);
        suffix_min[k] = lo.min(e[k]);
    }
    let oscillation = |k: usize| (suffix_max[k] - e[k]).max(e[k] - suffix_min[k]);
    let t_bar_step = (0..n).find(|&k| oscillation(k) <= band);

    let mut impacts = Vec::new();
    let mut i = 0;
    while i < n {
        if record.contacts(i).is_empty() {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && !record.contacts(i + 1).is_empty() {
            i += 1;
        }
        let end = i;
        let before = e[start.saturating_sub(1)];
        let after = e[(end + 1).min(n - 1)];
        impacts.push(Impact {
            step_start: start,
            step_end: end,
            t_start: record.time(start as isize),
            t_end: record.time(end as isize),
            energy_drop: before - after,
        });
        i += 1;
    }

    StabilizationReport {
        osc_tol,
        t_bar: t_bar_step.map(|k| record.time(k as isize)),
        t_bar_step,
        post_t_bar_energy_oscillation: t_bar_step.map_or(f64::NAN, oscillation),
        impacts,
    }
}
