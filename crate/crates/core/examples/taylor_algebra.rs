//! Truncated multivariate Taylor arithmetic and expansion of a coefficient function.

use parakernel::polyalg::{MonomialBasis, SpatialFn, TaylorPoly};

fn main() -> parakernel::Result<()> {
    let basis = MonomialBasis::new(2, 4)?;
    let center = [0.5, -0.25];
    let dx = TaylorPoly::coordinate(&basis, &center, 0)?;
    let dy = TaylorPoly::coordinate(&basis, &center, 1)?;

    // (1 + Δx + Δy)^3, then its x-derivative and Laplacian.
    let one_plus = dx.add(&dy)?.add(&TaylorPoly::constant(&basis, &center, 1.0)?)?;
    let cube = one_plus.mul(&one_plus)?.mul(&one_plus)?;
    println!("basis of {} monomials, degree {}", basis.len(), basis.degree());
    for (g, c) in cube.terms().filter(|(_, c)| *c != 0.0) {
        println!("  {:?}  {c}", g.entries());
    }
    println!("d/dx at center: {}", cube.partial(0)?.eval(&center));
    println!("laplacian at center: {}", cube.laplacian().eval(&center));

    // Products past the cap are dropped and flagged.
    let sq = cube.mul(&cube)?;
    println!("degree-6 product truncated: {}", sq.truncated());

    let f = SpatialFn::sine(2, 0.8, 0, 2.0, 0.1);
    let t = f.taylorize(&basis, &center, 0.3)?;
    let probe = [0.7, -0.1];
    println!(
        "sin taylor: f = {:.12}, poly = {:.12}, bound = {:.3e}",
        f.eval(&probe),
        t.poly.eval(&probe),
        t.remainder_bound
    );
    Ok(())
}
