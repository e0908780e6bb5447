//! Empirical moment growth and stability of solutions against the
//! a priori bounds, level by level in |t - t_0|.

use padic_sde::measure::{TreeWiener, WienerSampler};
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::sde::{moment_diagnostic, solve_ensemble, stability_diagnostic, Builtin, SdeProblem};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 3);
    let sampler = WienerSampler::Tree(TreeWiener::standard(1.0, 1.0, d.clone())?);
    let problem = |x0: i128| {
        SdeProblem::new(
            d.clone(),
            PAdic::from_int(p, n, x0),
            Builtin::Linear { slope: PAdic::from_int(p, n, 5), offset: PAdic::zero(p, n) },
            Builtin::Constant(PAdic::one(p, n)),
        )
    };
    let first = solve_ensemble(&problem(1), &sampler, 99, 300)?;
    let second = solve_ensemble(&problem(6), &sampler, 99, 300)?;

    let m = moment_diagnostic(&first, 1, 1.0, 1.0, 3.0);
    println!("moment bound holds: {}", m.pass());
    for l in &m.levels {
        println!("  |t - t0| = {:<5} value {:>9.4} bound {:>9.4} (+{:.4})", l.radius, l.value, l.bound, l.allowance);
    }
    let s = stability_diagnostic(&first, &second, 1, 1.0, 1.0, 3.0)?;
    println!("stability bound holds: {}", s.pass());
    for l in &s.levels {
        println!("  |t - t0| = {:<5} value {:>9.4} bound {:>9.4}", l.radius, l.value, l.bound);
    }
    Ok(())
}
