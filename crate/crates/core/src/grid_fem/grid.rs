use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of the interval `(a, b)` into `n_cells` cells.
///
/// Nodes are `x_j = a + j h` for `j = 0..=n_cells`; nodes `1..n_cells` are the
/// interior degrees of freedom of the P1 space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "endpoints must be finite, got ({a}, {b})"
            )));
        }
        if b <= a {
            return Err(Error::InvalidDomain(format!(
                "right endpoint {b} must exceed left endpoint {a}"
            )));
        }
        if n_cells < 2 {
            return Err(Error::InvalidDomain(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self { a, b, n_cells })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of interior nodes, `n_cells - 1`.
    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    /// All `n_cells + 1` node coordinates, boundary included.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|j| self.node(j)).collect()
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.n_cells).map(|j| self.node(j)).collect()
    }

    /// Grid with every cell split in two.
    pub fn refined(&self) -> Self {
        Self {
            n_cells: 2 * self.n_cells,
            ..*self
        }
    }
}

pub fn build_grid(a: f64, b: f64, n_cells: usize) -> Result<Grid1D> {
    Grid1D::new(a, b, n_cells)
}
