//! Structure-preserving time integration for the Landau–Lifshitz–Gilbert
//! equation
//!
//! ```text
//! m_t = -m × Δm - α m × (m × Δm),   ∂m/∂ν = 0 on ∂Ω
//! ```
//!
//! on the unit interval or unit cube. The crate provides
//!
//! * structured grids and nodal 3-vector fields ([`grid`], [`field`], [`norms`]),
//! * the discrete Laplacian and the regularising solve `g = (I - Δt Δ_h)^{-1} m`
//!   ([`operators`]),
//! * closed-form per-node 3×3 algebra: Cayley solves, propagators and
//!   iteration spectra ([`nodal`]),
//! * the time integrators: the explicit regularized scheme, the fractional
//!   Gauss–Seidel scheme, and midpoint / trapezoidal Crank–Nicolson
//!   references ([`schemes`]),
//! * manufactured solutions with their forcing ([`manufactured`]),
//! * a convergence-study runner with CSV output ([`study`]).

pub mod error;
pub mod field;
pub mod grid;
pub mod manufactured;
pub mod nodal;
pub mod norms;
pub mod operators;
pub mod schemes;
pub mod study;

pub use error::{Error, Result};
pub use field::VectorField;
pub use grid::{make_grid, Boundary, Grid, Layout};
pub use nodal::Vec3;
pub use norms::{error_norms, exchange_energy, max_unit_norm_deviation, NormConvention, NormTriple};
