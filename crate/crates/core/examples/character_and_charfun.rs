//! Additive characters chi_gamma(x) = exp(2 pi i {gamma x}_p) and the
//! characteristic functional of a q-Gaussian measure.

use padic_sde::charfun::{character, charfun_gaussian, GaussianSpec};
use padic_sde::padic::PAdic;

fn main() -> padic_sde::Result<()> {
    let (p, n) = (3, 10);
    let gamma = PAdic::from_rational(p, n, 1, 9)?;
    for k in 0..5 {
        let x = PAdic::from_int(p, n, k);
        let c = character(&gamma, &x);
        println!("chi_(1/9)({k}) = exp(2 pi i {}/{}^{})  = {:.6}", c.numerator(), p, c.denominator_exp(), c.to_complex());
    }

    // M chi_h(x) = exp(-beta |h|^q) chi(shift h) for a one-dimensional measure.
    let spec = GaussianSpec::one_dim(1.0, 1.0, PAdic::from_rational(p, n, 1, 3)?)?;
    for k in -2..=2 {
        let h = PAdic::p_power(p, n, k);
        let v = charfun_gaussian(&spec, &[PAdic::one(p, n)], &h)?;
        println!("h = 3^{k:>2}: {v:.6}");
    }

    // Product measure with |zeta_j| decaying fast enough for an l_q sum.
    let zeta = (1..=4).map(|j| PAdic::p_power(p, n, j)).collect();
    let prod = GaussianSpec::product(zeta, 1.0, vec![PAdic::zero(p, n); 4])?;
    println!("betas: {:?}", prod.betas());
    Ok(())
}
