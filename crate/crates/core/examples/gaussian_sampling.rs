//! Draw from a one-dimensional q-Gaussian measure and compare the empirical
//! characteristic function with the closed form.

use num_complex::Complex64;
use padic_sde::charfun::{character, GaussianSpec};
use padic_sde::measure::{ensemble, GaussianSampler};
use padic_sde::padic::PAdic;

fn main() -> padic_sde::Result<()> {
    let (p, n, draws) = (3, 16, 200_000u64);
    let spec = GaussianSpec::one_dim(1.0, 1.0, PAdic::zero(p, n))?;
    let sampler = GaussianSampler::new(&spec, n)?;
    let xs = ensemble(2024, draws, |_, rng| sampler.sample(rng));
    println!("first draws: {} {} {}", xs[0], xs[1], xs[2]);
    for k in -1..=2 {
        let h = PAdic::p_power(p, n, k);
        let emp = xs.iter().map(|x| character(&h, x).to_complex()).sum::<Complex64>() / draws as f64;
        let exact = (-h.norm()).exp();
        println!("h = 3^{k:>2}: empirical {:.5} {:+.5}i   exact {exact:.5}", emp.re, emp.im);
    }
    Ok(())
}
