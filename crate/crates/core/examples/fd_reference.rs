//! Crank–Nicolson reference solution compared with the kernel-based solver.

use parakernel::kernel::KernelFamily;
use parakernel::oracle::{fd_solve, line_grid, FdBoundary, FdConfig};
use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};
use parakernel::solvers::{solve_cauchy, FunctionSpec, OutputSpec, ProblemSpec, QuadConfig};

fn main() -> parakernel::Result<()> {
    let pc = ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0)?,
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )?;
    let ps = ProblemSpec::cauchy(
        pc.clone(),
        FunctionSpec::gaussian(1, 1.0, 1.0),
        0.25,
        OutputSpec {
            grid: line_grid(-2.0, 2.0, 41)?,
            times: vec![0.25],
        },
    );
    let family = KernelFamily::new(pc, ExpansionConfig::new(6, 12, WarpParams::plain()))?;
    let kernel = solve_cauchy(&ps, &family, &QuadConfig::default())?;
    let mut prev: Option<f64> = None;
    for h in [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
        let fd = fd_solve(
            &ps,
            &FdConfig::crank_nicolson(h, h / 4.0, FdBoundary::LargeBoxDirichlet).with_box(-6.0, 6.0),
        )?;
        let diff = kernel.max_abs_diff(&fd, |_| true)?;
        match prev {
            Some(p) => println!("h=1/{:.0}: |kernel - fd| = {diff:.3e} (ratio {:.2})", 1.0 / h, p / diff),
            None => println!("h=1/{:.0}: |kernel - fd| = {diff:.3e}", 1.0 / h),
        }
        prev = Some(diff);
    }
    Ok(())
}
