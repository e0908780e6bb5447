//! Monte Carlo expected character of a stochastic antiderivative against
//! the product of increment characteristic functionals.

use padic_sde::char_expect::verify_char_expectation;
use padic_sde::grid::GridFunction;
use padic_sde::measure::{TreeWiener, WienerSampler};
use padic_sde::padic::{BallSpec, PAdic};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (3, 8);
    let d = BallSpec::unit_ball(p, n, 3);
    let sampler = WienerSampler::Tree(TreeWiener::standard(0.5, 1.0, d.clone())?);
    let psi = GridFunction::from_fn(d.clone(), |_, u| &PAdic::one(p, n) + u);
    let gamma = PAdic::from_rational(p, n, 1, 3)?;
    for t in [1, 5, 26] {
        let r = verify_char_expectation(&psi, &sampler, &gamma, &PAdic::one(p, n), t, 50_000, 77)?;
        println!(
            "t = {}: empirical {:.4}{:+.4}i  analytic {:.4}  tol {:.4}  pass {}",
            r.t, r.empirical.re, r.empirical.im, r.analytic.re, r.tolerance, r.pass
        );
    }
    Ok(())
}
