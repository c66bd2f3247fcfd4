//! Viscous Burgers velocities through the logarithmic transform, in one and two
//! dimensions.

use parakernel::oracle::line_grid;
use parakernel::polyalg::{FourierTerm, PolyTerm};
use parakernel::recursion::{BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};
use parakernel::solvers::{
    burgers_curl, burgers_demo, FunctionSpec, Grid, OutputSpec, ProblemKind, ProblemSpec, QuadConfig,
};

fn burgers(
    dom: BoxDomain,
    phi0: FunctionSpec,
    nu: f64,
    grid: Grid,
    times: Vec<f64>,
) -> parakernel::Result<ProblemSpec> {
    let pc = ProblemCoefficients::new(dom.dim(), 1, dom)?;
    let horizon = *times.last().unwrap();
    let mut ps = ProblemSpec::cauchy(pc, phi0, horizon, OutputSpec { grid, times });
    ps.kind = ProblemKind::Burgers;
    ps.nu = Some(nu);
    Ok(ps)
}

fn main() -> parakernel::Result<()> {
    let cfg = ExpansionConfig::new(2, 4, WarpParams::plain());
    let quad = QuadConfig::default();

    // Φ_0 = −x²/2 gives v = x/(1 + t).
    let ps = burgers(
        BoxDomain::cube(1, 1.0)?,
        FunctionSpec::Poly {
            terms: vec![PolyTerm {
                exponents: vec![2],
                coeff: -0.5,
            }],
        },
        0.1,
        line_grid(-1.0, 1.0, 5)?,
        vec![0.5],
    )?;
    let v = burgers_demo(&ps, &cfg, &quad)?;
    for (p, x) in v.grid.points().iter().enumerate() {
        println!("x={:5.2}: v={:.12} exact={:.12}", x[0], v.value(0, p, 0), x[0] / 1.5);
    }

    let wave = FunctionSpec::Fourier {
        terms: vec![
            FourierTerm {
                amplitude: 0.2,
                wave: vec![1.0, 0.0],
                phase: 0.0,
            },
            FourierTerm {
                amplitude: 0.1,
                wave: vec![0.5, 1.0],
                phase: 0.4,
            },
        ],
    };
    let grid = Grid::uniform(&[-0.5, -0.5], &[0.5, 0.5], 3)?;
    let ps2 = burgers(BoxDomain::cube(2, 1.0)?, wave, 0.5, grid.clone(), vec![0.2])?;
    let v2 = burgers_demo(
        &ps2,
        &ExpansionConfig::new(4, 6, WarpParams::plain()),
        &QuadConfig { gh_order: 20, ..quad },
    )?;
    println!(
        "2D velocity at the origin: ({:.6}, {:.6})",
        v2.value(0, 4, 0),
        v2.value(0, 4, 1)
    );
    let curl = burgers_curl(
        &ps2,
        &ExpansionConfig::new(4, 6, WarpParams::plain()),
        &QuadConfig { gh_order: 20, ..quad },
        0.2,
        &grid.points(),
        1e-3,
    )?;
    println!("relative curl {curl:.2e}");
    Ok(())
}
