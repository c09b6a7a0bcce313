//! High-order ADER-WENO finite-volume schemes for hyperbolic systems in
//! conservative and path-conservative form, with reconstruction and
//! space-time prediction in primitive or conserved variables.

// `!(x > 0)` rejects NaN on purpose; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod boundary;
pub mod config;
pub mod counter;
pub mod driver;
pub mod eigen;
pub mod error;
pub mod fluxes;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod predictor;
pub mod problems;
pub mod real;
pub mod solver;
pub mod systems;
pub mod weno;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision instances of the generic types.
pub type Grid = grid::Grid<f64>;
pub type Field = grid::Field<f64>;
pub type System = systems::SystemSpec<f64>;
pub type Solver = solver::Solver<f64>;
pub type SchemeConfig = solver::SchemeConfig<f64>;
pub type BoundarySet = boundary::BoundarySet<f64>;
pub type NodalBasis = basis::NodalBasis<f64>;
