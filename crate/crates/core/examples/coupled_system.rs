//! Two-component system: decoupled components reproduce scalar expansions, and a
//! constant coupling gives a residual that shrinks with t.

use parakernel::kernel::residual;
use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{expand, BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};

fn main() -> parakernel::Result<()> {
    let dom = BoxDomain::cube(2, 1.0)?;
    let cfg = ExpansionConfig::new(4, 8, WarpParams::plain());
    let y = [0.1, -0.2];

    let decoupled = ProblemCoefficients::new(2, 2, dom.clone())?
        .with_drift(0, 0, 0, CoefficientFn::stationary(SpatialFn::sine(2, 0.3, 0, 1.0, 0.2)))?
        .with_drift(1, 1, 1, CoefficientFn::constant(2, -0.2))?;
    let sys = expand(&decoupled, &y, &cfg)?;
    for j in 0..2 {
        let scalar = expand(&decoupled.diagonal_component(j)?, &y, &cfg)?;
        let mut diff: f64 = 0.0;
        for k in 0..=cfg.order {
            for (a, b) in sys.coeff(j, k).terms().iter().zip(scalar.coeff(0, k).terms()) {
                diff = diff.max(a.max_abs_diff(b)?);
            }
        }
        println!("component {j}: max difference from scalar expansion {diff:e}");
    }

    let coupled = ProblemCoefficients::new(2, 2, dom)?.with_drift(0, 1, 0, CoefficientFn::constant(2, 0.2))?;
    let e = expand(&coupled, &[0.0, 0.0], &ExpansionConfig::new(6, 8, WarpParams::plain()))?;
    for &t in &[0.01, 0.05, 0.1] {
        let r = residual(&e, &coupled, t, &[0.1, 0.1], &[0.0, 0.0])?;
        println!("t={t}: relative residuals {:.3e} {:.3e}", r.relative[0], r.relative[1]);
    }
    Ok(())
}
