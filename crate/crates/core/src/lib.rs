//! Stationary states of the one-dimensional Gross-Pitaevskii equation in a
//! hard-walled box `[-1, 1]` split by a central delta barrier.
//!
//! * [`elliptic`]: Jacobi elliptic functions and integrals.
//! * [`linear_modes`]: eigenmodes of the linear problem.
//! * [`exact_states`]: closed-form nonlinear states and their bifurcations.
//! * [`two_mode`]: two-mode and variational approximations.
//! * [`stability`]: Bogoliubov-de Gennes spectra in a truncated mode basis.
//! * [`grid_oracle`]: imaginary-time propagation on a grid.
//! * [`io`] and [`cli`]: output formats and the command-line front end.

pub mod cli;
pub mod eigen;
pub mod elliptic;
pub mod error;
pub mod exact_states;
pub mod grid_oracle;
pub mod io;
pub mod linear_modes;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod stability;
pub mod two_mode;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the generic kernels.
pub type Elliptic = elliptic::Elliptic<f64>;
pub type LinearMode = linear_modes::LinearMode<f64>;

pub type TwoModeModel = two_mode::TwoModeModel<f64>;
pub type GaussLegendre = quadrature::GaussLegendre<f64>;
