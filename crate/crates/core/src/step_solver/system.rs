use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::grid_fem::{dot, OperatorSet, Stiffness, SymmetricMatrix};
use crate::linalg::solve_spd_tridiagonal;

use super::StepProblem;

enum Hessian {
    Tridiagonal {
        n: usize,
        diag: f64,
        off: f64,
    },
    Dense {
        matrix: DMatrix<f64>,
        factor: Cholesky<f64, Dyn>,
    },
}

/// The step Hessian `H = M/τ² + A` for fixed operators and time step.
///
/// The gradient of the step objective on interior values is `H x + k`, with
/// the affine part `k` depending on the problem data. Building this once per
/// run lets the dense Cholesky factor be shared across steps.
pub struct StepSystem<'a> {
    ops: &'a OperatorSet,
    tau: f64,
    hessian: Hessian,
}

impl<'a> StepSystem<'a> {
    pub fn new(ops: &'a OperatorSet, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "time step {tau} must be positive"
            )));
        }
        let inv_tau2 = 1.0 / (tau * tau);
        let mass = ops.mass();
        let hessian = match ops.stiffness() {
            Stiffness::Local(a) => Hessian::Tridiagonal {
                n: mass.n,
                diag: mass.diag * inv_tau2 + a.diag,
                off: mass.off * inv_tau2 + a.off,
            },
            Stiffness::Fractional(a) => {
                let matrix = mass.to_dense() * inv_tau2 + a.to_dense();
                let factor = matrix.clone().cholesky().ok_or_else(|| {
                    Error::Singular("step Hessian is not positive definite".into())
                })?;
                Hessian::Dense { matrix, factor }
            }
        };
        Ok(Self { ops, tau, hessian })
    }

    pub fn ops(&self) -> &OperatorSet {
        self.ops
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.ops.grid().n_interior()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.hessian {
            Hessian::Tridiagonal { diag, off, .. } => match i.abs_diff(j) {
                0 => *diag,
                1 => *off,
                _ => 0.0,
            },
            Hessian::Dense { matrix, .. } => matrix[(i, j)],
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match &self.hessian {
            Hessian::Tridiagonal { n, diag, off } => {
                let n = *n;
                (0..n)
                    .map(|i| {
                        let mut acc = diag * x[i];
                        if i > 0 {
                            acc += off * x[i - 1];
                        }
                        if i + 1 < n {
                            acc += off * x[i + 1];
                        }
                        acc
                    })
                    .collect()
            }
            Hessian::Dense { matrix, .. } => {
                (matrix * DVector::from_column_slice(x)).as_slice().to_vec()
            }
        }
    }

    /// Affine part `k` of the gradient for the given problem.
    pub fn affine_term(&self, problem: &StepProblem<'_>) -> Vec<f64> {
        let inv_tau2 = 1.0 / (self.tau * self.tau);
        let b = problem.target();
        let mb = self
            .ops
            .mass_apply_lifted(&b)
            .expect("validated problem is compatible");
        let (bl, br) = (problem.u_prev.bc_left(), problem.u_prev.bc_right());
        let coupling = self.ops.stiffness_boundary_coupling(bl, br);
        let n = mb.len();
        let off = self.ops.mass().off;
        let mut k: Vec<f64> = mb
            .iter()
            .zip(&coupling)
            .map(|(m, c)| -m * inv_tau2 + c)
            .collect();
        k[0] += off * bl * inv_tau2;
        k[n - 1] += off * br * inv_tau2;
        k
    }

    pub fn gradient(&self, x: &[f64], k: &[f64]) -> Vec<f64> {
        let mut g = self.apply(x);
        for (gi, ki) in g.iter_mut().zip(k) {
            *gi += ki;
        }
        g
    }

    /// Solves `H x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.hessian {
            Hessian::Tridiagonal { n, diag, off } => {
                solve_spd_tridiagonal(&vec![*diag; *n], &vec![*off; n.saturating_sub(1)], rhs)
            }
            Hessian::Dense { factor, .. } => Ok(factor
                .solve(&DVector::from_column_slice(rhs))
                .as_slice()
                .to_vec()),
        }
    }

    /// Minimizes the step objective with the nodes in `fixed` pinned to `x[j]`.
    ///
    /// Returns the full interior vector.
    pub fn solve_on_face(&self, x: &[f64], fixed: &[bool], k: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let free: Vec<usize> = (0..n).filter(|&j| !fixed[j]).collect();
        let mut out = x.to_vec();
        if free.is_empty() {
            return Ok(out);
        }
        let pinned: Vec<f64> = (0..n).map(|j| if fixed[j] { x[j] } else { 0.0 }).collect();
        let h_pinned = self.apply(&pinned);
        let rhs: Vec<f64> = free.iter().map(|&j| -k[j] - h_pinned[j]).collect();
        let sol = match &self.hessian {
            Hessian::Tridiagonal { diag, off, .. } => {
                let d = vec![*diag; free.len()];
                let o: Vec<f64> = free
                    .windows(2)
                    .map(|w| if w[1] == w[0] + 1 { *off } else { 0.0 })
                    .collect();
                solve_spd_tridiagonal(&d, &o, &rhs)?
            }
            Hessian::Dense { matrix, .. } => {
                if free.len() == n {
                    self.solve(&rhs)?
                } else {
                    let sub =
                        DMatrix::from_fn(free.len(), free.len(), |a, b| matrix[(free[a], free[b])]);
                    let chol = sub.cholesky().ok_or_else(|| {
                        Error::Singular("reduced Hessian is not positive definite".into())
                    })?;
                    chol.solve(&DVector::from_vec(rhs)).as_slice().to_vec()
                }
            }
        };
        for (&j, v) in free.iter().zip(sol) {
            out[j] = v;
        }
        Ok(out)
    }

    /// `½ dᵀ H d + gᵀ d`, the exact objective change along `d` from a point
    /// with gradient `g`.
    pub fn objective_change(&self, g: &[f64], d: &[f64], hd: &[f64]) -> f64 {
        dot(g, d) + 0.5 * dot(d, hd)
    }
}
