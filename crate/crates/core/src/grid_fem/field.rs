use crate::error::{Error, Result};

use super::Grid1D;

/// Continuous piecewise-linear function on a [`Grid1D`], stored as interior
/// nodal values plus the two boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldP1 {
    grid: Grid1D,
    interior: Vec<f64>,
    bc_left: f64,
    bc_right: f64,
}

impl FieldP1 {
    pub fn new(grid: Grid1D, interior: Vec<f64>, bc_left: f64, bc_right: f64) -> Result<Self> {
        if interior.len() != grid.n_interior() {
            return Err(Error::Incompatible(format!(
                "expected {} interior values, got {}",
                grid.n_interior(),
                interior.len()
            )));
        }
        Ok(Self {
            grid,
            interior,
            bc_left,
            bc_right,
        })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid1D, value: f64) -> Self {
        Self {
            grid,
            interior: vec![value; grid.n_interior()],
            bc_left: value,
            bc_right: value,
        }
    }

    /// Hat function of grid node `j` (`1 <= j < n_cells`).
    pub fn hat(grid: Grid1D, j: usize) -> Self {
        assert!(
            j >= 1 && j < grid.n_cells(),
            "hat index {j} is not interior"
        );
        let mut f = Self::zeros(grid);
        f.interior[j - 1] = 1.0;
        f
    }

    /// Builds a field from all `n_cells + 1` nodal values.
    pub fn from_nodal(grid: Grid1D, nodal: &[f64]) -> Result<Self> {
        if nodal.len() != grid.n_cells() + 1 {
            return Err(Error::Incompatible(format!(
                "expected {} nodal values, got {}",
                grid.n_cells() + 1,
                nodal.len()
            )));
        }
        let n = grid.n_cells();
        Ok(Self {
            grid,
            interior: nodal[1..n].to_vec(),
            bc_left: nodal[0],
            bc_right: nodal[n],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        &mut self.interior
    }

    pub fn into_interior(self) -> Vec<f64> {
        self.interior
    }

    pub fn bc_left(&self) -> f64 {
        self.bc_left
    }

    pub fn bc_right(&self) -> f64 {
        self.bc_right
    }

    pub fn has_zero_boundary(&self) -> bool {
        self.bc_left == 0.0 && self.bc_right == 0.0
    }

    /// Value at grid node `j`, boundary nodes included.
    pub fn at_node(&self, j: usize) -> f64 {
        if j == 0 {
            self.bc_left
        } else if j == self.grid.n_cells() {
            self.bc_right
        } else {
            self.interior[j - 1]
        }
    }

    pub fn nodal(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.interior.len() + 2);
        out.push(self.bc_left);
        out.extend_from_slice(&self.interior);
        out.push(self.bc_right);
        out
    }

    /// Piecewise-linear evaluation at an arbitrary point of the closed domain.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        let n = g.n_cells();
        let t = ((x - g.a()) / g.h()).clamp(0.0, n as f64);
        let cell = (t.floor() as usize).min(n - 1);
        let w = t - cell as f64;
        (1.0 - w) * self.at_node(cell) + w * self.at_node(cell + 1)
    }

    pub fn ensure_same_grid(&self, other: &FieldP1) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Incompatible(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`, applied to every nodal value.
    pub fn combine(&self, alpha: f64, other: &FieldP1, beta: f64) -> Result<FieldP1> {
        self.ensure_same_grid(other)?;
        Ok(FieldP1 {
            grid: self.grid,
            interior: self
                .interior
                .iter()
                .zip(&other.interior)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
            bc_left: alpha * self.bc_left + beta * other.bc_left,
            bc_right: alpha * self.bc_right + beta * other.bc_right,
        })
    }

    pub fn scaled(&self, alpha: f64) -> FieldP1 {
        FieldP1 {
            grid: self.grid,
            interior: self.interior.iter().map(|x| alpha * x).collect(),
            bc_left: alpha * self.bc_left,
            bc_right: alpha * self.bc_right,
        }
    }

    /// Largest absolute nodal value, boundary included.
    pub fn max_abs(&self) -> f64 {
        self.interior
            .iter()
            .chain([&self.bc_left, &self.bc_right])
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Nodal interpolant of `f`; the boundary values are prescribed separately.
pub fn interpolate_function<F>(grid: Grid1D, f: F, bc_left: f64, bc_right: f64) -> Result<FieldP1>
where
    F: Fn(f64) -> f64,
{
    let mut interior = Vec::with_capacity(grid.n_interior());
    for j in 1..grid.n_cells() {
        let value = f(grid.node(j));
        if !value.is_finite() {
            return Err(Error::NonFinite { node: j, value });
        }
        interior.push(value);
    }
    for (node, value) in [(0, bc_left), (grid.n_cells(), bc_right)] {
        if !value.is_finite() {
            return Err(Error::NonFinite { node, value });
        }
    }
    FieldP1::new(grid, interior, bc_left, bc_right)
}
