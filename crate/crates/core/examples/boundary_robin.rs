//! Robin problem on (0, 1) with exact solution e^{−t} cos x, solved through a boundary
//! density marched in time.

use parakernel::kernel::KernelFamily;
use parakernel::oracle::line_grid;
use parakernel::polyalg::PolyTerm;
use parakernel::recursion::{BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};
use parakernel::solvers::{
    solve_ibvp2, BoundaryConfig, FunctionSpec, OutputSpec, ProblemKind, ProblemSpec, QuadConfig, SeparableTerm,
    SpaceTimeFn,
};

fn linear(c0: f64, c1: f64) -> FunctionSpec {
    FunctionSpec::Poly {
        terms: vec![
            PolyTerm {
                exponents: vec![0],
                coeff: c0,
            },
            PolyTerm {
                exponents: vec![1],
                coeff: c1,
            },
        ],
    }
}

fn main() -> parakernel::Result<()> {
    let pc = ProblemCoefficients::new(1, 1, BoxDomain::new(vec![0.0], vec![1.0])?)?;
    let mut ps = ProblemSpec::cauchy(
        pc.clone(),
        FunctionSpec::cosine(1, 1.0, 0, 1.0),
        1.0,
        OutputSpec {
            grid: line_grid(0.0, 1.0, 6)?,
            times: vec![0.5, 1.0],
        },
    );
    ps.kind = ProblemKind::Ibvp2;
    ps.alpha = SpaceTimeFn::stationary(FunctionSpec::Constant { value: 1.0 });
    // Boundary data e^{−t}·1 at x = 0 and e^{−t}(cos 1 − sin 1) at x = 1, interpolated linearly.
    let right = 1f64.cos() - 1f64.sin();
    ps.psi = SpaceTimeFn {
        terms: vec![SeparableTerm {
            coeff: 1.0,
            rate: -1.0,
            power: 0,
            space: linear(1.0, right - 1.0),
        }],
    };

    let family = KernelFamily::new(pc, ExpansionConfig::new(2, 4, WarpParams::plain()))?;
    for steps in [32, 64, 128] {
        let (sol, density) = solve_ibvp2(&ps, &family, &BoundaryConfig::new(steps), &QuadConfig::default())?;
        let mut err: f64 = 0.0;
        for (ti, &t) in sol.times.iter().enumerate() {
            for (p, x) in sol.grid.points().iter().enumerate() {
                err = err.max((sol.value(ti, p, 0) - (-t).exp() * x[0].cos()).abs());
            }
        }
        let last = density.times.len() - 1;
        println!(
            "steps {steps:4}: max error {err:.3e}, density at t={:.4}: [{:.5}, {:.5}]",
            density.times[last], density.values[0][last], density.values[1][last]
        );
    }
    Ok(())
}
