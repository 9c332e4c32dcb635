//! Minimizing-movement solver for the wave equation with the (fractional)
//! Laplacian, with or without an obstacle, on a uniform 1D P1 grid.
//!
//! Each time step minimizes
//! `J(u) = ‖u − 2u_{i−1} + u_{i−2}‖²/(2τ²) + [u]_s²/2`
//! over the (obstacle-constrained) discrete space; [`evolution`] chains the
//! steps and [`verification`] checks the discrete energy, variational and
//! convergence properties of the resulting trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod grid_fem;
pub mod linalg;
pub mod scenario_io;
pub mod step_solver;
pub mod verification;

pub use error::{Error, Result};
