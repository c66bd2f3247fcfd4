//! Choosing the time scale β, expanding in warped time, and the horizon cap of the
//! warp schedule.

use parakernel::kernel::eval_kernel;
use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{
    expand, select_beta, tau_of_t, warp_schedule, BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams,
};

fn main() -> parakernel::Result<()> {
    let pc = ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0)?,
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )?
    .with_bound(0.3)?;
    let sel = select_beta(&pc)?;
    let beta = sel.params.beta;
    println!("c0_up = {:.4}, bound = {:.4}, beta = {beta:.4}", sel.c0_up, sel.bound);

    let plain = expand(&pc, &[0.0], &ExpansionConfig::new(6, 12, WarpParams::plain()))?;
    let warped = expand(&pc, &[0.0], &ExpansionConfig::new(6, 12, WarpParams::tau(beta, 0.9)?))?;
    for &t in &[0.05, 0.1, 0.25] {
        let a = eval_kernel(&plain, t, &[0.3], &[0.0], 0)?.value;
        let b = eval_kernel(&warped, t, &[0.3], &[0.0], 0)?.value;
        println!("t={t} tau={:.4}: plain {a:.10e}, warped {b:.10e}", tau_of_t(t, beta)?);
    }

    for &horizon in &[0.5, 2.0] {
        let s = warp_schedule(horizon, 2.0)?;
        println!(
            "schedule for T={horizon}: beta={:.4} tau_max={:.4}; {}",
            s.params.beta, s.params.tau_max, s.note
        );
    }
    Ok(())
}
