use std::sync::Arc;

use proptest::prelude::*;

use parakernel::kernel::eval_kernel;
use parakernel::oracle::quad_ray;
use parakernel::polyalg::{CoefficientFn, FourierTerm, MonomialBasis, MultiIndex, PolyTerm, SpatialFn, TaylorPoly};
use parakernel::recursion::{
    expand, pk_gamma, ray_integrate, BoxDomain, ExpansionConfig, ProblemCoefficients, Recursion, WarpMode, WarpParams,
};

const DIM: usize = 2;
const DEGREE: u32 = 6;

fn basis() -> Arc<MonomialBasis> {
    MonomialBasis::new(DIM, DEGREE).unwrap()
}

/// Polynomial of degree at most 2 with small integer coefficients, so products of three
/// of them are computed exactly.
fn int_poly() -> impl Strategy<Value = TaylorPoly> {
    let b = basis();
    let low = b.prefix_len(2);
    prop::collection::vec(-4i32..=4, low).prop_map(move |c| {
        let mut coeffs = vec![0.0; b.len()];
        for (dst, v) in coeffs.iter_mut().zip(c) {
            *dst = f64::from(v);
        }
        TaylorPoly::from_coeffs(&b, &[0.0; DIM], coeffs).unwrap()
    })
}

fn real_poly(max_degree: u32) -> impl Strategy<Value = TaylorPoly> {
    let b = basis();
    let low = b.prefix_len(max_degree);
    prop::collection::vec(-1.0f64..1.0, low).prop_map(move |c| {
        let mut coeffs = vec![0.0; b.len()];
        coeffs[..c.len()].copy_from_slice(&c);
        TaylorPoly::from_coeffs(&b, &[0.1, -0.2], coeffs).unwrap()
    })
}

fn sine_drift() -> impl Strategy<Value = (f64, f64, f64)> {
    (-0.4f64..0.4, 0.5f64..1.5, -1.0f64..1.0)
}

fn scalar_problem(amp: f64, k: f64, phase: f64) -> ProblemCoefficients {
    ProblemCoefficients::scalar(
        BoxDomain::cube(1, 1.0).unwrap(),
        vec![CoefficientFn::stationary(SpatialFn::sine(1, amp, 0, k, phase))],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative_and_commutative(a in int_poly(), b in int_poly(), c in int_poly()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs(), right.coeffs());
        let (ab, ba) = (a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(ab.coeffs(), ba.coeffs());
        let dist = a.mul(&b.add(&c).unwrap()).unwrap();
        let split = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(dist.coeffs(), split.coeffs());
    }

    #[test]
    fn leibniz_rule(a in int_poly(), b in int_poly(), i in 0..DIM) {
        let lhs = a.mul(&b).unwrap().partial(i).unwrap();
        let rhs = a.partial(i).unwrap().mul(&b).unwrap().add(&a.mul(&b.partial(i).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn eval_is_multiplicative(a in real_poly(3), b in real_poly(3), x in prop::array::uniform2(-1.0f64..1.0)) {
        let prod = a.mul(&b).unwrap().eval(&x);
        let direct = a.eval(&x) * b.eval(&x);
        prop_assert!((prod - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn taylorize_remainder_bound_holds(
        amp in -2.0f64..2.0,
        k in 0.2f64..3.0,
        phase in -3.0f64..3.0,
        c2 in -1.0f64..1.0,
        center in prop::array::uniform2(-1.0f64..1.0),
        dir in prop::array::uniform2(-1.0f64..1.0),
        radius in 0.05f64..0.6,
    ) {
        let f = SpatialFn::fourier(DIM, vec![FourierTerm { amplitude: amp, wave: vec![k, -0.5 * k], phase }])
            .unwrap()
            .plus(&SpatialFn::polynomial(DIM, vec![PolyTerm { exponents: vec![2, 1], coeff: c2 }]).unwrap())
            .unwrap();
        let t = f.taylorize(&basis(), &center, radius).unwrap();
        let norm = dir[0].hypot(dir[1]).max(1e-9);
        let x = [center[0] + radius * dir[0] / norm, center[1] + radius * dir[1] / norm];
        let err = (f.eval(&x) - t.poly.eval(&x)).abs();
        prop_assert!(err <= t.remainder_bound + 1e-13, "{err} > {}", t.remainder_bound);
    }

    #[test]
    fn ray_integrate_matches_quadrature(p in real_poly(5), a in 0.3f64..8.0, dx in prop::array::uniform2(-1.0f64..1.0)) {
        let closed = ray_integrate(&p, a).unwrap().eval_offset(&dx);
        let numeric = quad_ray(|s| p.eval_offset(&[s * dx[0], s * dx[1]]), a, 1e-14).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-12 * (1.0 + numeric.abs()), "{closed} vs {numeric}");
    }

    #[test]
    fn pk_gamma_is_ray_integral_of_shifted_monomial(
        g0 in 0u32..4,
        g1 in 0u32..3,
        a in 0.5f64..5.0,
        y in prop::array::uniform2(-1.0f64..1.0),
        dx in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let b = basis();
        let mut mono = TaylorPoly::constant(&b, &y, 1.0).unwrap();
        for (axis, power) in [(0, g0), (1, g1)] {
            let shifted = TaylorPoly::coordinate(&b, &y, axis).unwrap().add(&TaylorPoly::constant(&b, &y, y[axis]).unwrap()).unwrap();
            for _ in 0..power {
                mono = mono.mul(&shifted).unwrap();
            }
        }
        let gamma = MultiIndex::new(vec![g0, g1]).unwrap();
        let direct = pk_gamma(&gamma, a, &y, &dx).unwrap();
        let via_ray = ray_integrate(&mono, a).unwrap().eval_offset(&dx);
        prop_assert!((direct - via_ray).abs() <= 1e-13 * (1.0 + direct.abs()));
    }

    #[test]
    fn every_order_solves_its_transport_equation(
        (amp, k, phase) in sine_drift(),
        v in -0.5f64..0.5,
        y in -0.8f64..0.8,
        mode in prop::sample::select(vec![WarpMode::Plain, WarpMode::Beta, WarpMode::Tau]),
    ) {
        let pc = scalar_problem(amp, k, phase)
            .with_potential(0, CoefficientFn::stationary(SpatialFn::sine(1, v, 0, 1.0, 0.3)))
            .unwrap();
        let warp = match mode {
            WarpMode::Plain => WarpParams::plain(),
            WarpMode::Beta => WarpParams::beta(0.6).unwrap(),
            WarpMode::Tau => WarpParams::tau(0.6, 0.5).unwrap(),
        };
        let cfg = ExpansionConfig::new(4, 8, warp);
        let e = expand(&pc, &[y], &cfg).unwrap();
        let rec = Recursion::new(&pc, &[y], &cfg).unwrap();
        for order in 1..=4 {
            let prior = vec![(0..order).map(|r| e.coeff(0, r).clone()).collect::<Vec<_>>()];
            let src = rec.source(order, &prior, 0).unwrap();
            let ck = e.coeff(0, order);
            let mut lhs = ck.scale(order as f64);
            lhs.axpy(1.0, &ck.map_terms(|p| Ok(p.euler())).unwrap()).unwrap();
            let scale = src.terms().iter().map(|p| p.max_abs_coeff()).fold(1.0, f64::max);
            for l in 0..=lhs.order().max(src.order()) {
                let diff = lhs.term(l).max_abs_diff(&src.term(l)).unwrap();
                prop_assert!(diff <= 1e-12 * scale, "order {order}, s^{l}: {diff}");
            }
        }
    }

    #[test]
    fn stationary_drift_gives_static_c0((amp, k, phase) in sine_drift(), y in -0.8f64..0.8) {
        let pc = scalar_problem(amp, k, phase);
        let e = expand(&pc, &[y], &ExpansionConfig::new(3, 8, WarpParams::plain())).unwrap();
        let c0 = e.coeff(0, 0);
        for l in 1..=c0.order() {
            prop_assert!(c0.term(l).is_zero());
        }
    }

    #[test]
    fn kernel_is_positive_with_consistent_gradient(
        (amp, k, phase) in sine_drift(),
        y in -0.8f64..0.8,
        x in -1.0f64..1.0,
        t in 0.01f64..0.3,
    ) {
        let pc = scalar_problem(amp, k, phase);
        let e = expand(&pc, &[y], &ExpansionConfig::new(4, 10, WarpParams::plain())).unwrap();
        let kv = eval_kernel(&e, t, &[x], &[y], 0).unwrap();
        prop_assert!(kv.value > 0.0 && kv.value.is_finite());
        prop_assert!(kv.log_value.is_finite());
        let h = 1e-5;
        let up = eval_kernel(&e, t, &[x + h], &[y], 0).unwrap().value;
        let down = eval_kernel(&e, t, &[x - h], &[y], 0).unwrap().value;
        let fd = (up - down) / (2.0 * h);
        let peak = (4.0 * std::f64::consts::PI * t).sqrt().recip();
        prop_assert!((fd - kv.gradient[0]).abs() <= 1e-6 * peak / t.sqrt(), "{fd} vs {}", kv.gradient[0]);
    }
}
