//! Exact shell probabilities P(|x| = p^m) of a one-dimensional q-Gaussian
//! measure and ball probabilities P(|x| <= p^m).

use padic_sde::charfun::{ball_probability, shell_distribution, shell_range, GaussianSpec};
use padic_sde::padic::PAdic;

fn main() -> padic_sde::Result<()> {
    let (p, beta, q) = (2, 1.0, 1.0);
    let spec = GaussianSpec::one_dim(beta, q, PAdic::zero(p, 20))?;
    let (lo, hi) = shell_range(&spec, 1e-15, 1e-14)?;
    let table = shell_distribution(&spec, lo, hi, 1e-14)?;
    println!("shells {lo}..={hi}, total mass {:.15}", table.total_mass());
    for (m, w) in table.entries.iter().filter(|e| e.1 > 1e-6) {
        println!("m = {m:>3}  P = {w:.3e}");
    }
    for m in [-2, 0, 2] {
        println!("P(|x| <= 2^{m}) = {:.12}", ball_probability(p, beta, q, m, 1e-15)?);
    }
    Ok(())
}
