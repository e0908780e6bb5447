//! Solve xi(t) = xi0 + P_u a(xi) + P_w E(xi) by Picard iteration, with and
//! without ball subdivision.

use padic_sde::measure::TreeWiener;
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::sde::{solve_picard, Builtin, SdeProblem};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (3, 6);
    let d = BallSpec::unit_ball(p, n, 3);
    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(42);

    let cases = [
        ("contracting slope 3", PAdic::from_int(p, n, 3)),
        ("large slope 1/9", PAdic::from_rational(p, n, 1, 9)?),
    ];
    for (name, slope) in cases {
        let pr = SdeProblem::new(
            d.clone(),
            PAdic::one(p, n),
            Builtin::Linear { slope, offset: PAdic::zero(p, n) },
            Builtin::Constant(PAdic::one(p, n)),
        );
        let sol = solve_picard(&pr, &w)?;
        println!("{name}: {} balls, {} iterations, residual {}", sol.balls.len(), sol.iterations(), sol.residual);
        println!("  defect trace of the first ball: {:?}", sol.balls[0].defect_trace);
        println!("  xi(1) = {}", sol.xi.get(1)?);
    }
    Ok(())
}
