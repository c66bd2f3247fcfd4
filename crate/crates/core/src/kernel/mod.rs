//! Evaluation of the fundamental-solution ansatz and its diagnostics.

mod eval;
mod family;

pub use eval::{eval_kernel, kernel_gradient, normal_derivative, residual, varadhan_diag, KernelValue, Residual};
pub use family::{normalization_check, KernelFamily};
