//! Wiener processes on a finite grid of Z_p: the tree construction with
//! independent digit-level increments and the Mahler series construction.

use padic_sde::measure::{MahlerWiener, TreeWiener, WienerSampler, ZetaLaw};
use padic_sde::padic::BallSpec;

fn main() -> padic_sde::Result<()> {
    let domain = BallSpec::unit_ball(3, 6, 2);
    let tree = TreeWiener::standard(1.0, 1.0, domain.clone())?;
    let mahler = MahlerWiener::new(&ZetaLaw::Geometric { rate: 1.0 }, 6, 1.0, domain.clone())?;

    for s in [WienerSampler::Tree(tree.clone()), WienerSampler::Mahler(mahler)] {
        let path = s.sample(17);
        println!("{} sampler, seed 17", s.tag().name());
        for (t, w) in path.rows() {
            println!("  w({t}) = {w}");
        }
    }

    // Lazy sampling along one chain reproduces the full path.
    let full = tree.sample(5);
    let lazy = tree.sample_on(5, &[7]);
    println!("lazy w(7) == full w(7): {}", lazy.at(7)? == full.at(7)?);
    Ok(())
}
