//! Log-correction coefficients for a sinusoidal drift, order by order.

use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{expand, BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};

fn main() -> parakernel::Result<()> {
    let pc = ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0)?,
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )?;
    let e = expand(&pc, &[0.2], &ExpansionConfig::new(6, 12, WarpParams::plain()))?;
    let d = &e.diagnostics;
    println!("reference time s = {}", d.reference_time);
    println!("k  sup|c_k|  sup|c_k| s^k  truncated");
    for k in 0..=e.order() {
        println!("{k}  {:.3e}  {:.3e}  {}", d.sup_norms[k], d.scaled[k], d.truncated[k]);
    }
    // c_0 at Δx: minus half the drift averaged along the segment, times Δx.
    let c0 = e.coeff(0, 0);
    println!("c_0(x = 0.7) = {:.12}", c0.eval(&[0.7], 0.0));
    let exact = 0.3 * 0.5 * (0.7f64.cos() - 0.2f64.cos());
    println!("closed form  = {exact:.12}");
    Ok(())
}
