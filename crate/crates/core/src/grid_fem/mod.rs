//! Uniform 1D grid, P1 fields and the mass/stiffness operators.

mod field;
pub mod fractional;
mod grid;
mod operators;

pub use field::{interpolate_function, FieldP1};
pub use grid::{build_grid, Grid1D};
pub use operators::{
    assemble_mass, assemble_stiffness_fractional, assemble_stiffness_local, dot,
    gagliardo_seminorm_sq, mass_norm_sq, FractionalOrder, OperatorSet, Stiffness, SymmetricMatrix,
    SymmetricToeplitz, Tridiagonal,
};
