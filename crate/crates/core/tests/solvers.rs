use parakernel::kernel::KernelFamily;
use parakernel::oracle::{fd_solve, line_grid, FdBoundary, FdConfig};
use parakernel::polyalg::{CoefficientFn, FourierTerm, PolyTerm, SpatialFn};
use parakernel::recursion::{BoxDomain, ExpansionConfig, ProblemCoefficients, WarpParams};
use parakernel::solvers::*;
use parakernel::Error;

fn poly(terms: &[(u32, f64)]) -> FunctionSpec {
    FunctionSpec::Poly {
        terms: terms
            .iter()
            .map(|&(e, c)| PolyTerm {
                exponents: vec![e],
                coeff: c,
            })
            .collect(),
    }
}

fn term(coeff: f64, rate: f64, power: u32, space: FunctionSpec) -> SeparableTerm {
    SeparableTerm {
        coeff,
        rate,
        power,
        space,
    }
}

fn sine_coefficients() -> ProblemCoefficients {
    ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0).unwrap(),
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )
    .unwrap()
}

fn cauchy(pc: &ProblemCoefficients, phi: FunctionSpec, times: Vec<f64>) -> ProblemSpec {
    let horizon = *times.last().unwrap();
    ProblemSpec::cauchy(
        pc.clone(),
        phi,
        horizon,
        OutputSpec {
            grid: line_grid(-2.0, 2.0, 21).unwrap(),
            times,
        },
    )
}

#[test]
fn heat_gaussian_closed_form() {
    let pc = ProblemCoefficients::new(1, 1, BoxDomain::cube(1, 1.0).unwrap()).unwrap();
    let fam = KernelFamily::new(pc.clone(), ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
    let ps = cauchy(&pc, FunctionSpec::gaussian(1, 1.0, 1.0), vec![0.1, 0.5]);
    let sol = solve_cauchy(&ps, &fam, &QuadConfig::default()).unwrap();
    for (ti, &t) in sol.times.iter().enumerate() {
        for (p, x) in sol.grid.points().iter().enumerate() {
            let exact = (1.0 + 4.0 * t).powf(-0.5) * (-x[0] * x[0] / (1.0 + 4.0 * t)).exp();
            assert!((sol.value(ti, p, 0) - exact).abs() < 1e-12);
        }
    }
}

#[test]
fn source_term_with_constant_data() {
    // u_t = u_xx + 1, u(0) = 2: u = 2 + t.
    let pc = ProblemCoefficients::new(1, 1, BoxDomain::cube(1, 1.0).unwrap()).unwrap();
    let fam = KernelFamily::new(pc.clone(), ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
    let ps = cauchy(&pc, FunctionSpec::Constant { value: 2.0 }, vec![0.3])
        .with_source(SpaceTimeFn::stationary(FunctionSpec::Constant { value: 1.0 }));
    let sol = solve_cauchy(&ps, &fam, &QuadConfig::default()).unwrap();
    assert!(sol.values.iter().all(|v| (v - 2.3).abs() < 1e-12));
}

#[test]
fn linearity() {
    let pc = sine_coefficients();
    let fam = KernelFamily::new(pc.clone(), ExpansionConfig::new(4, 10, WarpParams::plain())).unwrap();
    let q = QuadConfig::default();
    let a = FunctionSpec::gaussian(1, 1.0, 0.8);
    let b = FunctionSpec::cosine(1, 1.0, 0, 2.0);
    let mix = FunctionSpec::Sum {
        parts: vec![
            FunctionSpec::gaussian(1, 1.5, 0.8),
            FunctionSpec::cosine(1, -0.5, 0, 2.0),
        ],
    };
    let sa = solve_cauchy(&cauchy(&pc, a, vec![0.2]), &fam, &q).unwrap();
    let sb = solve_cauchy(&cauchy(&pc, b, vec![0.2]), &fam, &q).unwrap();
    let sm = solve_cauchy(&cauchy(&pc, mix, vec![0.2]), &fam, &q).unwrap();
    for i in 0..sm.values.len() {
        assert!((sm.values[i] - 1.5 * sa.values[i] + 0.5 * sb.values[i]).abs() < 1e-10);
    }
}

#[test]
fn semigroup_on_sine_drift() {
    let pc = ProblemCoefficients::scalar(
        BoxDomain::cube(1, 6.0).unwrap(),
        vec![CoefficientFn::stationary(SpatialFn::sine(1, 0.3, 0, 1.0, 0.0))],
    )
    .unwrap();
    let fam = KernelFamily::new(pc.clone(), ExpansionConfig::new(6, 12, WarpParams::plain())).unwrap();
    let q = QuadConfig::default();
    let phi = FunctionSpec::gaussian(1, 1.0, 1.0);
    let fine = line_grid(-6.0, 6.0, 1201).unwrap();
    let mut first = cauchy(&pc, phi.clone(), vec![0.1]);
    first.output.grid = fine.clone();
    let mid = solve_cauchy(&first, &fam, &q).unwrap();
    let staged = FunctionSpec::Grid {
        lower: -6.0,
        upper: 6.0,
        values: mid.slice(0, 0),
    };
    let two_step = solve_cauchy(&cauchy(&pc, staged, vec![0.1]), &fam, &q).unwrap();
    let direct = solve_cauchy(&cauchy(&pc, phi, vec![0.2]), &fam, &q).unwrap();
    let diff = two_step
        .values
        .iter()
        .zip(&direct.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 5e-3, "semigroup defect {diff}");
}

#[test]
fn cauchy_matches_crank_nicolson() {
    let pc = sine_coefficients();
    let fam = KernelFamily::new(pc.clone(), ExpansionConfig::new(6, 12, WarpParams::plain())).unwrap();
    let ps = cauchy(&pc, FunctionSpec::gaussian(1, 1.0, 1.0), vec![0.25]);
    let sol = solve_cauchy(&ps, &fam, &QuadConfig::default()).unwrap();
    let fd = fd_solve(
        &ps,
        &FdConfig::crank_nicolson(1.0 / 128.0, 1e-3, FdBoundary::LargeBoxDirichlet).with_box(-6.0, 6.0),
    )
    .unwrap();
    assert!(sol.max_abs_diff(&fd, |_| true).unwrap() < 1e-4);
}

#[test]
fn rejects_foreign_family() {
    let pc = sine_coefficients();
    let other = ProblemCoefficients::new(1, 1, BoxDomain::cube(1, 1.0).unwrap()).unwrap();
    let fam = KernelFamily::new(other, ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
    let ps = cauchy(&pc, FunctionSpec::Zero, vec![0.1]);
    assert!(matches!(
        solve_cauchy(&ps, &fam, &QuadConfig::default()),
        Err(Error::Structural(_))
    ));
}

/// Boundary problem on (0, 1) with `ψ(t, x) = left(t) (1 − x) + right(t) x`.
fn ibvp(phi: FunctionSpec, alpha: f64, left: Vec<SeparableTerm>, right: Vec<SeparableTerm>) -> ProblemSpec {
    let pc = ProblemCoefficients::new(1, 1, BoxDomain::new(vec![0.0], vec![1.0]).unwrap()).unwrap();
    let mut ps = ProblemSpec::cauchy(
        pc,
        phi,
        1.0,
        OutputSpec {
            grid: line_grid(0.0, 1.0, 11).unwrap(),
            times: vec![0.5, 1.0],
        },
    );
    ps.kind = ProblemKind::Ibvp2;
    ps.alpha = SpaceTimeFn::stationary(FunctionSpec::Constant { value: alpha });
    let mut terms = Vec::new();
    for t in left {
        terms.push(SeparableTerm {
            space: poly(&[(0, 1.0), (1, -1.0)]),
            ..t
        });
    }
    for t in right {
        terms.push(SeparableTerm {
            space: poly(&[(1, 1.0)]),
            ..t
        });
    }
    ps.psi = SpaceTimeFn { terms };
    ps
}

fn ibvp_error(ps: &ProblemSpec, steps: usize, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let fam = KernelFamily::new(ps.coefficients.clone(), ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
    let (sol, density) = solve_ibvp2(ps, &fam, &BoundaryConfig::new(steps), &QuadConfig::default()).unwrap();
    assert_eq!(density.times.len(), steps);
    let mut err: f64 = 0.0;
    for (ti, &t) in sol.times.iter().enumerate() {
        for (p, x) in sol.grid.points().iter().enumerate() {
            err = err.max((sol.value(ti, p, 0) - exact(t, x[0])).abs());
        }
    }
    err
}

#[test]
fn ibvp_cosine_robin_converges() {
    let (c, s) = (1f64.cos(), 1f64.sin());
    let ps = ibvp(
        FunctionSpec::cosine(1, 1.0, 0, 1.0),
        1.0,
        vec![term(1.0, -1.0, 0, FunctionSpec::Zero)],
        vec![term(c - s, -1.0, 0, FunctionSpec::Zero)],
    );
    let exact = |t: f64, x: f64| (-t).exp() * x.cos();
    let e64 = ibvp_error(&ps, 64, exact);
    let e128 = ibvp_error(&ps, 128, exact);
    assert!(e64 < 1e-2, "{e64}");
    assert!(e128 <= 0.7 * e64, "{e128} vs {e64}");
}

#[test]
fn ibvp_polynomial_solution() {
    // u = x² + 2t, α = 1/2: ψ(t, 0) = t, ψ(t, 1) = 2.5 + t.
    let ps = ibvp(
        poly(&[(2, 1.0)]),
        0.5,
        vec![term(1.0, 0.0, 1, FunctionSpec::Zero)],
        vec![
            term(2.5, 0.0, 0, FunctionSpec::Zero),
            term(1.0, 0.0, 1, FunctionSpec::Zero),
        ],
    );
    assert!(ibvp_error(&ps, 64, |t, x| x * x + 2.0 * t) < 1e-2);
}

#[test]
fn ibvp_neumann_mode() {
    // u = e^{−4t} cos(2x + 0.3), α = 0.
    let ps = ibvp(
        FunctionSpec::Fourier {
            terms: vec![FourierTerm {
                amplitude: 1.0,
                wave: vec![2.0],
                phase: 0.3 + std::f64::consts::FRAC_PI_2,
            }],
        },
        0.0,
        vec![term(2.0 * 0.3f64.sin(), -4.0, 0, FunctionSpec::Zero)],
        vec![term(-2.0 * 2.3f64.sin(), -4.0, 0, FunctionSpec::Zero)],
    );
    assert!(ibvp_error(&ps, 64, |t, x| (-4.0 * t).exp() * (2.0 * x + 0.3).cos()) < 2e-2);
}

#[test]
fn ibvp_with_source() {
    // u = t cos x: f = (1 + t) cos x, α = 1.
    let (c, s) = (1f64.cos(), 1f64.sin());
    let mut ps = ibvp(
        FunctionSpec::Zero,
        1.0,
        vec![term(1.0, 0.0, 1, FunctionSpec::Zero)],
        vec![term(c - s, 0.0, 1, FunctionSpec::Zero)],
    );
    ps.source = SpaceTimeFn {
        terms: vec![
            term(1.0, 0.0, 0, FunctionSpec::cosine(1, 1.0, 0, 1.0)),
            term(1.0, 0.0, 1, FunctionSpec::cosine(1, 1.0, 0, 1.0)),
        ],
    };
    assert!(ibvp_error(&ps, 64, |t, x| t * x.cos()) < 1e-2);
}

#[test]
fn ibvp_trivial_data() {
    let ps = ibvp(FunctionSpec::Zero, 0.0, vec![], vec![]);
    let fam = KernelFamily::new(ps.coefficients.clone(), ExpansionConfig::new(2, 4, WarpParams::plain())).unwrap();
    let (sol, density) = solve_ibvp2(&ps, &fam, &BoundaryConfig::new(8), &QuadConfig::default()).unwrap();
    assert!(sol.values.iter().all(|&v| v == 0.0));
    assert!(density.values.iter().flatten().all(|&v| v == 0.0));
}

fn burgers(dom: BoxDomain, phi0: FunctionSpec, nu: f64, grid: Grid, times: Vec<f64>) -> ProblemSpec {
    let pc = ProblemCoefficients::new(dom.dim(), 1, dom).unwrap();
    let horizon = *times.last().unwrap();
    let mut ps = ProblemSpec::cauchy(pc, phi0, horizon, OutputSpec { grid, times });
    ps.kind = ProblemKind::Burgers;
    ps.nu = Some(nu);
    ps
}

#[test]
fn burgers_self_similar() {
    let ps = burgers(
        BoxDomain::cube(1, 1.0).unwrap(),
        poly(&[(2, -0.5)]),
        0.1,
        line_grid(-1.0, 1.0, 21).unwrap(),
        vec![0.1, 0.3, 0.5],
    );
    let v = burgers_demo(
        &ps,
        &ExpansionConfig::new(2, 4, WarpParams::plain()),
        &QuadConfig::default(),
    )
    .unwrap();
    for (ti, &t) in v.times.iter().enumerate() {
        for (p, x) in v.grid.points().iter().enumerate() {
            assert!((v.value(ti, p, 0) - x[0] / (1.0 + t)).abs() < 1e-10);
        }
    }
}

#[test]
fn burgers_at_rest() {
    let ps = burgers(
        BoxDomain::cube(1, 1.0).unwrap(),
        FunctionSpec::Zero,
        0.3,
        line_grid(-1.0, 1.0, 5).unwrap(),
        vec![0.5],
    );
    let v = burgers_demo(
        &ps,
        &ExpansionConfig::new(2, 4, WarpParams::plain()),
        &QuadConfig::default(),
    )
    .unwrap();
    assert!(v.values.iter().all(|&x| x.abs() < 1e-12));
}

#[test]
fn burgers_matches_explicit_march() {
    let cfg = ExpansionConfig::new(4, 6, WarpParams::plain());
    let ps = burgers(
        BoxDomain::cube(1, 3.0).unwrap(),
        FunctionSpec::cosine(1, 0.2, 0, 1.0),
        0.5,
        line_grid(-2.0, 2.0, 21).unwrap(),
        vec![0.5],
    );
    let v = burgers_demo(&ps, &cfg, &QuadConfig::default()).unwrap();
    let fd_cfg = FdConfig::explicit(1.0 / 64.0, 1e-4, FdBoundary::LargeBoxDirichlet).with_box(-8.0, 8.0);
    let fd = fd_solve(&ps, &fd_cfg).unwrap();
    assert!(v.max_abs_diff(&fd, |_| true).unwrap() < 1e-2);

    // Uniform forcing F = 0.3 x enters as a potential on the heat side.
    let mut forced = burgers(
        BoxDomain::cube(1, 1.0).unwrap(),
        poly(&[(2, -0.5)]),
        0.1,
        line_grid(-1.0, 1.0, 21).unwrap(),
        vec![0.5],
    );
    forced.source = SpaceTimeFn::stationary(poly(&[(1, 0.3)]));
    let v = burgers_demo(&forced, &cfg, &QuadConfig::default()).unwrap();
    let fd = fd_solve(&forced, &fd_cfg).unwrap();
    assert!(v.max_abs_diff(&fd, |_| true).unwrap() < 1e-3);
}

#[test]
fn burgers_2d_is_curl_free() {
    let phi0 = FunctionSpec::Sum {
        parts: vec![
            FunctionSpec::cosine(2, 0.3, 0, 1.0),
            FunctionSpec::Fourier {
                terms: vec![FourierTerm {
                    amplitude: 0.2,
                    wave: vec![1.0, 1.0],
                    phase: 0.3,
                }],
            },
        ],
    };
    let grid = Grid::uniform(&[-1.0, -1.0], &[1.0, 1.0], 4).unwrap();
    let ps = burgers(BoxDomain::cube(2, 1.0).unwrap(), phi0, 0.5, grid.clone(), vec![0.2]);
    let quad = QuadConfig {
        gh_order: 30,
        ..QuadConfig::default()
    };
    let curl = burgers_curl(
        &ps,
        &ExpansionConfig::new(2, 4, WarpParams::plain()),
        &quad,
        0.2,
        &grid.points(),
        1e-3,
    )
    .unwrap();
    assert!(curl < 1e-6, "{curl}");
}

#[test]
fn burgers_errors() {
    let cfg = ExpansionConfig::new(2, 4, WarpParams::plain());
    let deep = burgers(
        BoxDomain::cube(1, 1.0).unwrap(),
        FunctionSpec::Constant { value: -200.0 },
        0.1,
        line_grid(-1.0, 1.0, 3).unwrap(),
        vec![0.1],
    );
    match burgers_demo(&deep, &cfg, &QuadConfig::default()) {
        Err(Error::Scaling(msg)) => assert!(msg.contains("-200")),
        other => panic!("expected scaling error, got {other:?}"),
    }
    let mut gauss = deep.clone();
    gauss.phi = FunctionSpec::Zero;
    gauss.source = SpaceTimeFn::stationary(FunctionSpec::gaussian(1, 1.0, 1.0));
    assert!(matches!(
        burgers_demo(&gauss, &cfg, &QuadConfig::default()),
        Err(Error::Unsupported(_))
    ));
}
