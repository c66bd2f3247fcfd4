//! Kernel values against the closed form for constant drift, and PDE residuals for a
//! variable drift.

use parakernel::kernel::{eval_kernel, residual};
use parakernel::oracle::exact_const_drift_kernel;
use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{expand, BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};

fn main() -> parakernel::Result<()> {
    let dom = BoxDomain::cube(1, 1.0)?;
    let y = [0.1];

    let flat = ProblemCoefficients::scalar(dom.clone(), vec![CoefficientFn::constant(1, 0.7)])?;
    let e = expand(&flat, &y, &ExpansionConfig::new(2, 6, WarpParams::plain()))?;
    for &(t, x) in &[(0.1, 0.3), (0.5, -0.6), (1.0, 0.9)] {
        let p = eval_kernel(&e, t, &[x], &y, 0)?;
        let exact = exact_const_drift_kernel(0.7, 0.0, t, x, y[0])?;
        println!(
            "t={t} x={x}: p={:.15e} exact={exact:.15e} grad={:.6e}",
            p.value, p.gradient[0]
        );
    }

    let wavy = ProblemCoefficients::scalar(
        dom,
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )?;
    println!("relative residual at t=0.05, x=0.4:");
    for order in 2..=6 {
        let e = expand(&wavy, &y, &ExpansionConfig::new(order, 12, WarpParams::plain()))?;
        let r = residual(&e, &wavy, 0.05, &[0.4], &y)?;
        println!("  K={order}: {:.3e}", r.relative[0]);
    }
    Ok(())
}
