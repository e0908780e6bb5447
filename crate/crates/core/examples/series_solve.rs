//! The general equation with a finite series of mixed antiderivative terms
//! sum c_{b,m,l} P_{u^{b+m-l}, w^l}[a^{m-l} E^l].

use std::sync::Arc;

use padic_sde::measure::TreeWiener;
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::sde::{solve_general, solve_picard, Builtin, SdeProblem, SeriesTerm};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 3);
    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(8);
    let drift = Builtin::Linear { slope: PAdic::from_int(p, n, 5), offset: PAdic::one(p, n) };
    let diffusion = Builtin::Constant(PAdic::one(p, n));
    let base = SdeProblem::new(d.clone(), PAdic::one(p, n), drift.clone(), diffusion.clone());

    // The two first-order terms reproduce the standard equation.
    let one = || Arc::new(Builtin::Constant(PAdic::one(p, n)));
    let reduced = base.clone().with_series(vec![
        SeriesTerm { b: 0, m: 1, l: 0, coef: one() },
        SeriesTerm { b: 0, m: 1, l: 1, coef: one() },
    ]);
    let a = solve_picard(&base, &w)?;
    let b = solve_general(&reduced, &w)?;
    let same = (0..d.len()).all(|i| a.xi.get(i).unwrap().agrees_with(b.xi.get(i).unwrap()));
    println!("first-order series equals the standard solution: {same}");

    // A second-order correction term.
    let second = base.with_series(vec![
        SeriesTerm { b: 0, m: 1, l: 0, coef: one() },
        SeriesTerm { b: 0, m: 1, l: 1, coef: one() },
        SeriesTerm { b: 0, m: 2, l: 2, coef: Arc::new(Builtin::Constant(PAdic::from_int(p, n, 5))) },
    ]);
    let c = solve_general(&second, &w)?;
    println!("with a second-order term: {} iterations, xi(7) = {}", c.iterations(), c.xi.get(7)?);
    Ok(())
}
