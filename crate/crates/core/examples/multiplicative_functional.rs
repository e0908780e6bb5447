//! Multiplicative operator functionals built from solutions of a linear
//! equation: identity, cocycle and moment checks over an ensemble.

use padic_sde::functional::{linear_family, mof_check, representation_residual};
use padic_sde::measure::{derive_seed, TreeWiener};
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::sde::{Builtin, SdeProblem};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 2);
    let tree = TreeWiener::standard(1.0, 1.0, d.clone())?;
    let pr = SdeProblem::new(
        d.clone(),
        PAdic::one(p, n),
        Builtin::Linear { slope: PAdic::from_int(p, n, 5), offset: PAdic::zero(p, n) },
        Builtin::Linear { slope: PAdic::from_int(p, n, 25), offset: PAdic::zero(p, n) },
    );
    let family = (0..50)
        .map(|i| linear_family(&pr, &tree.sample(derive_seed(1, i))))
        .collect::<padic_sde::Result<Vec<_>>>()?;
    let triples: Vec<_> = (0..20).map(|k| (k % 25, (3 * k + 1) % 25, (7 * k + 2) % 25)).collect();
    let r = mof_check(&family, &triples, 2.0)?;
    println!("identity {} cocycle {} moment constant {:.4}", r.identity, r.cocycle, r.moment_constant);

    let xi0s: Vec<_> = [1, 2, 7].iter().map(|&x| PAdic::from_int(p, n, x)).collect();
    let res = representation_residual(&pr, &tree.sample(3), &xi0s)?;
    println!("xi(t) = T(t, t0) xi0 residual: {res}");
    Ok(())
}
