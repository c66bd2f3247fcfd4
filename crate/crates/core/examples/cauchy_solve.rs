//! Whole-space initial value problem with a source term, solved by convolving with the
//! kernel family.

use parakernel::kernel::KernelFamily;
use parakernel::oracle::line_grid;
use parakernel::polyalg::{CoefficientFn, SpatialFn};
use parakernel::recursion::{BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};
use parakernel::solvers::{solve_cauchy, FunctionSpec, OutputSpec, ProblemSpec, QuadConfig, SpaceTimeFn};

fn main() -> parakernel::Result<()> {
    let pc = ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0)?,
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )?;
    let family = KernelFamily::new(pc.clone(), ExpansionConfig::new(6, 12, WarpParams::plain()))?;
    let ps = ProblemSpec::cauchy(
        pc,
        FunctionSpec::gaussian(1, 1.0, 1.0),
        0.25,
        OutputSpec {
            grid: line_grid(-2.0, 2.0, 9)?,
            times: vec![0.1, 0.25],
        },
    )
    .with_source(SpaceTimeFn::separable(0.5, -1.0, FunctionSpec::cosine(1, 1.0, 0, 1.0)));
    let sol = solve_cauchy(&ps, &family, &QuadConfig::default())?;
    sol.write_csv(std::io::stdout().lock())?;
    eprintln!("expansions cached: {}", family.cached());
    Ok(())
}
