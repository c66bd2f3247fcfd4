//! Global analytic expansions of fundamental solutions for linear parabolic equations
//! and systems whose components couple through first-order drift terms.
//!
//! The fundamental solution is represented as a Gaussian times the exponential of a
//! power series in time, `p_j = (4πt)^{-n/2} exp(−|x−y|²/4t + Σ_k c^j_k(x,y) t^k)`,
//! with coefficients computed recursively as truncated Taylor polynomials in `x − y`.
//! On top of the kernel sit Cauchy convolution, a second-kind Volterra boundary
//! integral solver for Robin problems, and a Cole–Hopf Burgers solver; an independent
//! oracle layer (exact kernels, quadrature, finite differences) checks all of it.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod polyalg;
pub mod quadrature;
pub mod recursion;
pub mod solvers;

pub use error::{Error, Result};
