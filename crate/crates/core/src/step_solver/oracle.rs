use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid_fem::{FieldP1, SymmetricMatrix};

use super::StepProblem;

/// Largest problem the enumeration accepts.
pub const ORACLE_MAX_NODES: usize = 12;

/// Brute-force reference for the lower-obstacle step.
///
/// Enumerates every subset `S` of interior nodes (smallest first), pins
/// `u = g` on `S`, solves the reduced stationarity system by dense LU on the
/// rest, and returns the first candidate that is feasible with a nonnegative
/// multiplier on `S`.
pub fn oracle_active_set_solve(problem: &StepProblem<'_>) -> Result<FieldP1> {
    let g = problem
        .lower
        .ok_or_else(|| Error::InvalidProblem("active-set oracle needs a lower obstacle".into()))?;
    if problem.upper.is_some() {
        return Err(Error::InvalidProblem(
            "active-set oracle handles a single lower obstacle".into(),
        ));
    }
    let ops = problem.ops;
    let n = ops.grid().n_interior();
    if n > ORACLE_MAX_NODES {
        return Err(Error::InvalidProblem(format!(
            "active-set oracle limited to {ORACLE_MAX_NODES} interior nodes, got {n}"
        )));
    }
    let inv_tau2 = 1.0 / (problem.tau * problem.tau);
    let hess = ops.mass().to_dense() * inv_tau2 + ops.stiffness().to_dense();

    // Gradient at x = 0 with the problem's Dirichlet data.
    let zero = problem.lift(vec![0.0; n]);
    let offset = DVector::from_vec(super::residual_vector(problem, &zero)?);

    let gv = g.interior();
    let scale = problem.scale();
    let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for mask in subsets {
        let pinned = |j: usize| mask & (1 << j) != 0;
        let free: Vec<usize> = (0..n).filter(|&j| !pinned(j)).collect();
        let mut x = DVector::from_fn(n, |j, _| if pinned(j) { gv[j] } else { 0.0 });
        if !free.is_empty() {
            let hx = &hess * &x;
            let sub = DMatrix::from_fn(free.len(), free.len(), |a, b| hess[(free[a], free[b])]);
            let rhs = DVector::from_fn(free.len(), |a, _| -offset[free[a]] - hx[free[a]]);
            let Some(sol) = sub.lu().solve(&rhs) else {
                continue;
            };
            for (a, &j) in free.iter().enumerate() {
                x[j] = sol[a];
            }
        }
        let r = &hess * &x + &offset;
        let size = 1.0 + x.amax();
        let feasible = free
            .iter()
            .all(|&j| x[j] >= gv[j] - 1e-12 * (1.0 + gv[j].abs()));
        let signed = (0..n)
            .filter(|&j| pinned(j))
            .all(|j| r[j] >= -1e-11 * scale * size);
        if feasible && signed {
            return Ok(problem.lift(x.as_slice().to_vec()));
        }
    }
    Err(Error::NoValidActiveSet)
}
