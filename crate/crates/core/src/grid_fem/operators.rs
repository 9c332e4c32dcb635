use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::fractional::gagliardo_toeplitz_column;
use super::{FieldP1, Grid1D};

/// Exponent `s` of `(−Δ)^s`, restricted to `0 < s <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const LAPLACIAN: FractionalOrder = FractionalOrder(1.0);

    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s <= 1.0 {
            Ok(Self(s))
        } else {
            Err(Error::OrderOutOfRange(s))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `s = 1`: the classical, local Laplacian.
    pub fn is_local(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(s: FractionalOrder) -> f64 {
        s.0
    }
}

/// Square symmetric matrix acting on interior nodal vectors.
pub trait SymmetricMatrix {
    fn dim(&self) -> usize;

    fn entry(&self, i: usize, j: usize) -> f64;

    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.apply(y))
    }

    /// Maximum absolute row sum.
    fn row_sum_norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entry(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.entry(i, j))
    }
}

/// Constant-coefficient symmetric tridiagonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tridiagonal {
    pub n: usize,
    pub diag: f64,
    pub off: f64,
}

impl SymmetricMatrix for Tridiagonal {
    fn dim(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag,
            1 => self.off,
            _ => 0.0,
        }
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut acc = self.diag * x[i];
            if i > 0 {
                acc += self.off * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off * x[i + 1];
            }
            out[i] = acc;
        }
    }

    fn row_sum_norm(&self) -> f64 {
        let off = if self.n > 1 {
            2.0 * self.off.abs()
        } else {
            0.0
        };
        self.diag.abs() + off
    }
}

/// Symmetric Toeplitz matrix given by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricToeplitz {
    column: Vec<f64>,
}

impl SymmetricToeplitz {
    pub fn new(column: Vec<f64>) -> Self {
        Self { column }
    }

    pub fn column(&self) -> &[f64] {
        &self.column
    }
}

impl SymmetricMatrix for SymmetricToeplitz {
    fn dim(&self) -> usize {
        self.column.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.column[i.abs_diff(j)]
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.column[i.abs_diff(j)] * xj;
            }
            *o = acc;
        }
    }
}

/// Stiffness realizing the bilinear form `[u, v]_s` on interior vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Stiffness {
    Local(Tridiagonal),
    Fractional(SymmetricToeplitz),
}

impl SymmetricMatrix for Stiffness {
    fn dim(&self) -> usize {
        match self {
            Stiffness::Local(m) => m.dim(),
            Stiffness::Fractional(m) => m.dim(),
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            Stiffness::Local(m) => m.entry(i, j),
            Stiffness::Fractional(m) => m.entry(i, j),
        }
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Stiffness::Local(m) => m.apply_into(x, out),
            Stiffness::Fractional(m) => m.apply_into(x, out),
        }
    }

    fn row_sum_norm(&self) -> f64 {
        match self {
            Stiffness::Local(m) => m.row_sum_norm(),
            Stiffness::Fractional(m) => m.row_sum_norm(),
        }
    }
}

/// P1 mass matrix on interior nodes: `2h/3` on the diagonal, `h/6` off it.
pub fn assemble_mass(grid: &Grid1D) -> Tridiagonal {
    let h = grid.h();
    Tridiagonal {
        n: grid.n_interior(),
        diag: 2.0 * h / 3.0,
        off: h / 6.0,
    }
}

/// P1 Dirichlet-form stiffness on interior nodes: `2/h` and `−1/h`.
pub fn assemble_stiffness_local(grid: &Grid1D) -> Tridiagonal {
    let h = grid.h();
    Tridiagonal {
        n: grid.n_interior(),
        diag: 2.0 / h,
        off: -1.0 / h,
    }
}

/// Gagliardo stiffness (unit normalization) for `0 < s < 1` with zero exterior data.
pub fn assemble_stiffness_fractional(
    grid: &Grid1D,
    s: FractionalOrder,
) -> Result<SymmetricToeplitz> {
    let column = gagliardo_toeplitz_column(grid.h(), s.value(), grid.n_interior())?;
    Ok(SymmetricToeplitz::new(column))
}

/// Mass and stiffness operators of one grid and order.
///
/// For `s = 1` the forms act on lifted fields (nonzero Dirichlet data is
/// allowed); for `s < 1` every field must vanish on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    grid: Grid1D,
    order: FractionalOrder,
    mass: Tridiagonal,
    stiffness: Stiffness,
}

impl OperatorSet {
    pub fn new(grid: Grid1D, order: FractionalOrder) -> Result<Self> {
        let stiffness = if order.is_local() {
            Stiffness::Local(assemble_stiffness_local(&grid))
        } else {
            Stiffness::Fractional(assemble_stiffness_fractional(&grid, order)?)
        };
        Ok(Self {
            grid,
            order,
            mass: assemble_mass(&grid),
            stiffness,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn mass(&self) -> &Tridiagonal {
        &self.mass
    }

    pub fn stiffness(&self) -> &Stiffness {
        &self.stiffness
    }

    pub fn check_compatible(&self, u: &FieldP1) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::Incompatible(format!(
                "field grid {:?} differs from operator grid {:?}",
                u.grid(),
                self.grid
            )));
        }
        if !self.order.is_local() && !u.has_zero_boundary() {
            return Err(Error::Incompatible(format!(
                "s = {} requires zero exterior data, got boundary values ({}, {})",
                self.order.value(),
                u.bc_left(),
                u.bc_right()
            )));
        }
        Ok(())
    }

    /// `∫ u v` for the lifted P1 fields.
    pub fn mass_form(&self, u: &FieldP1, v: &FieldP1) -> Result<f64> {
        self.check_compatible(u)?;
        self.check_compatible(v)?;
        let h = self.grid.h();
        Ok(self.mass.bilinear(u.interior(), v.interior())
            + boundary_terms(u, v, h / 3.0, self.mass.off))
    }

    /// `[u, v]_s` for the lifted P1 fields.
    pub fn stiffness_form(&self, u: &FieldP1, v: &FieldP1) -> Result<f64> {
        self.check_compatible(u)?;
        self.check_compatible(v)?;
        Ok(match &self.stiffness {
            Stiffness::Local(a) => {
                a.bilinear(u.interior(), v.interior())
                    + boundary_terms(u, v, 1.0 / self.grid.h(), a.off)
            }
            Stiffness::Fractional(a) => a.bilinear(u.interior(), v.interior()),
        })
    }

    /// Interior rows of the full stiffness applied to the lifted field.
    pub fn stiffness_apply_lifted(&self, u: &FieldP1) -> Result<Vec<f64>> {
        self.check_compatible(u)?;
        let mut out = self.stiffness.apply(u.interior());
        let coupling = self.stiffness_boundary_coupling(u.bc_left(), u.bc_right());
        for (o, c) in out.iter_mut().zip(coupling) {
            *o += c;
        }
        Ok(out)
    }

    /// Interior rows of the full mass matrix applied to the lifted field.
    pub fn mass_apply_lifted(&self, u: &FieldP1) -> Result<Vec<f64>> {
        self.check_compatible(u)?;
        let mut out = self.mass.apply(u.interior());
        let n = out.len();
        out[0] += self.mass.off * u.bc_left();
        out[n - 1] += self.mass.off * u.bc_right();
        Ok(out)
    }

    /// Contribution of Dirichlet values to the interior stiffness rows.
    pub fn stiffness_boundary_coupling(&self, bc_left: f64, bc_right: f64) -> Vec<f64> {
        let n = self.grid.n_interior();
        let mut out = vec![0.0; n];
        if let Stiffness::Local(a) = &self.stiffness {
            out[0] += a.off * bc_left;
            out[n - 1] += a.off * bc_right;
        }
        out
    }
}

fn boundary_terms(u: &FieldP1, v: &FieldP1, diag: f64, off: f64) -> f64 {
    let n = u.interior().len();
    let (ul, ur, vl, vr) = (u.bc_left(), u.bc_right(), v.bc_left(), v.bc_right());
    diag * (ul * vl + ur * vr)
        + off * (ul * v.interior()[0] + vl * u.interior()[0])
        + off * (ur * v.interior()[n - 1] + vr * u.interior()[n - 1])
}

/// `[u]_s²`, the squared Gagliardo (or Dirichlet, for `s = 1`) seminorm.
pub fn gagliardo_seminorm_sq(u: &FieldP1, ops: &OperatorSet) -> Result<f64> {
    ops.stiffness_form(u, u)
}

/// `∫ u²` of a P1 field, boundary values included, regardless of order.
pub fn mass_norm_sq(u: &FieldP1) -> f64 {
    let mass = assemble_mass(u.grid());
    mass.bilinear(u.interior(), u.interior()) + boundary_terms(u, u, u.grid().h() / 3.0, mass.off)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
