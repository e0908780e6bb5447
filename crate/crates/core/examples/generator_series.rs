//! The generator series for eta = f(t, xi(t)) next to the difference
//! quotient [eta(t + h) - eta(t)] / h along h = p^k.

use padic_sde::functional::{generator_series, PolyF, SeriesInputs};
use padic_sde::grid::GridFunction;
use padic_sde::measure::TreeWiener;
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::sde::{solve_picard, Builtin, SdeProblem};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 10);
    let d = BallSpec::unit_ball(p, n, 3);
    let a = PAdic::from_int(p, n, 5);
    let pr = SdeProblem::new(d.clone(), PAdic::one(p, n), Builtin::Constant(a.clone()), Builtin::Constant(PAdic::zero(p, n)));
    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(0);
    let xi = solve_picard(&pr, &w)?.xi;

    let f = PolyF::in_x(vec![PAdic::zero(p, n), PAdic::zero(p, n), PAdic::one(p, n)]);
    let inputs = SeriesInputs {
        f: &f,
        xi: &xi,
        a: &GridFunction::constant(d.clone(), a.clone()),
        e: &GridFunction::constant(d.clone(), PAdic::zero(p, n)),
        w: &w,
    };
    let t = 6;
    let series = generator_series(&inputs, t, 4)?;
    println!("series value at t = {}: {series}", d.point(t));
    for k in 0..3u32 {
        let t2 = t + (p as u64).pow(k);
        let h = d.point(t2) - d.point(t);
        let eta = |i: u64| f.eval(&d.point(i), xi.get(i).unwrap());
        let q = (eta(t2) - eta(t)).checked_div(&h)?;
        println!("difference quotient, |h| = {:<6}: {q}", h.norm());
    }
    Ok(())
}
