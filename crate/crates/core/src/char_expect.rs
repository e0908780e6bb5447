//! Monte Carlo check of the expected character of a stochastic
//! antiderivative against the product of increment characteristic
//! functionals.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::antider::steps;
use crate::charfun::character;
use crate::error::Result;
use crate::grid::GridFunction;
use crate::measure::{derive_seed, WienerSampler};
use crate::padic::{mahler_int, PAdic};

#[derive(Debug, Clone, PartialEq)]
pub struct CharExpectationReport {
    pub t: String,
    pub gamma: String,
    pub g: String,
    pub samples: u64,
    pub empirical: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub std_err: (f64, f64),
    pub analytic: Complex64,
    pub tolerance: f64,
    pub pass: bool,
    /// False for the Mahler sampler, whose increments are not exactly
    /// independent; the report is then a diagnostic.
    pub asserted: bool,
}

/// `M chi_h(w(hi) - w(lo))` for the step `lo -> hi` of a chain.
pub fn increment_charfun(sampler: &WienerSampler, lo: u64, hi: u64, h: &PAdic) -> f64 {
    if h.is_zero() {
        return 1.0;
    }
    let hq = |q: f64| h.norm().powf(q);
    match sampler {
        WienerSampler::Tree(tw) => {
            let p = tw.domain().prime() as u64;
            let mut level = 0usize;
            let mut x = hi;
            while x >= p {
                x /= p;
                level += 1;
            }
            (-tw.betas()[level] * hq(tw.q())).exp()
        }
        WienerSampler::Mahler(mw) => {
            let d = mw.domain();
            let (p, n) = (d.prime(), d.precision());
            let (a, b) = (mw.representative(lo), mw.representative(hi));
            let s: f64 = mw
                .betas()
                .iter()
                .enumerate()
                .map(|(m, beta)| {
                    let diff = mahler_int(p, n, m as u32 + 1, b) - mahler_int(p, n, m as u32 + 1, a);
                    if diff.is_zero() {
                        0.0
                    } else {
                        beta * diff.norm().powf(mw.q())
                    }
                })
                .sum();
            (-s * hq(mw.q())).exp()
        }
    }
}

/// The analytic side `prod_j M chi_gamma(g psi(t_j) dw_j)` for
/// deterministic `psi`.
pub fn analytic_product(psi: &GridFunction<PAdic>, sampler: &WienerSampler, gamma: &PAdic, g: &PAdic, t: u64) -> Result<f64> {
    let mut prod = 1.0;
    for s in steps(psi.domain(), t) {
        let h = &(gamma * g) * psi.get(s.lo)?;
        prod *= increment_charfun(sampler, s.lo, s.hi, &h);
    }
    Ok(prod)
}

/// Average `chi_gamma(g sum_j psi(t_j) dw_j)` over `samples` paths with
/// seeds `derive_seed(seed, i)` and compare with the analytic product.
pub fn verify_char_expectation(
    psi: &GridFunction<PAdic>,
    sampler: &WienerSampler,
    gamma: &PAdic,
    g: &PAdic,
    t: u64,
    samples: u64,
    seed: u64,
) -> Result<CharExpectationReport> {
    let d = psi.domain();
    let chain = steps(d, t);
    let vals: Vec<Complex64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Complex64> {
            let w = sampler.sample_on(derive_seed(seed, i), &[t]);
            let mut acc = PAdic::zero(d.prime(), d.precision());
            for s in &chain {
                let dw = w.at(s.hi)? - w.at(s.lo)?;
                acc = &acc + &(psi.get(s.lo)? * &dw);
            }
            Ok(character(gamma, &(g * &acc)).to_complex())
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
    let var = |f: fn(&Complex64) -> f64, m: f64| vals.iter().map(|v| (f(v) - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let std_err = ((var(|v| v.re, mean.re) / n).sqrt(), (var(|v| v.im, mean.im) / n).sqrt());
    let analytic = Complex64::new(analytic_product(psi, sampler, gamma, g, t)?, 0.0);
    let tolerance = 4.0 / n.sqrt();
    let pass = (mean.re - analytic.re).abs() <= tolerance && (mean.im - analytic.im).abs() <= tolerance;
    Ok(CharExpectationReport {
        t: d.point(t).to_string(),
        gamma: gamma.to_string(),
        g: g.to_string(),
        samples,
        empirical: mean,
        std_err,
        analytic,
        tolerance,
        pass,
        asserted: matches!(sampler, WienerSampler::Tree(_)),
    })
}
