//! Reference computations that share no formula code with the expansion: closed-form
//! kernels, adaptive quadrature, Gauss–Hermite convolution and finite differences.

mod banded;
mod exact;
mod fd;
mod quad;

pub use banded::BandMatrix;
pub use exact::{const_drift_coefficients, exact_const_drift_kernel, exact_potential_kernel};
pub use fd::{fd_solve, line_grid, FdBoundary, FdConfig, FdScheme};
pub use quad::{gh_convolve, quad_ray};
