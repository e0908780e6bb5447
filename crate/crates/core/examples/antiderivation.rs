//! Discrete antiderivatives along the digit chain of a grid point and the
//! integration-by-parts identity.

use padic_sde::antider::{antider_u, antider_w, by_parts_residual, covariation, steps};
use padic_sde::grid::GridFunction;
use padic_sde::measure::TreeWiener;
use padic_sde::padic::{BallSpec, PAdic};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 3);
    let t = 87;
    for s in steps(&d, t) {
        println!("level {}: {} -> {}  dt = {}", s.level, d.point(s.lo), d.point(s.hi), s.dt);
    }

    // P_u of f(u) = 1 recovers t - t_0.
    let one = GridFunction::constant(d.clone(), PAdic::one(p, n));
    println!("P_u 1 at t = {}: {}", d.point(t), antider_u(&one, t)?);

    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(3);
    println!("P_w 1 = w(t) - w(t_0): {}", antider_w(&one, &w, t)? == (w.at(t)? - w.at(0)?));

    let x = GridFunction::from_fn(d.clone(), |_, u| &(u * u) + &PAdic::from_int(p, n, 2));
    let y = w.values.clone();
    println!("[X, W]_t = {}", covariation(&x, &y, t)?);
    let r = by_parts_residual(&x, &y, t)?;
    println!("by-parts residual is zero: {}", r.is_zero());
    Ok(())
}
