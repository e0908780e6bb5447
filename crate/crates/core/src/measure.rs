//! Samplers for q-Gaussian measures and for the Wiener process on a ball,
//! with reproducible per-sample RNG streams.
//!
//! Seed derivation: the stream of sample `i` under master seed `s` is
//! `ChaCha8Rng::seed_from_u64(derive_seed(s, i))`, where
//! `derive_seed(s, i) = splitmix64(s ^ splitmix64(i))` and `splitmix64` uses
//! the constants `0x9E3779B97F4A7C15`, `0xBF58476D1CE4E5B9`,
//! `0x94D049BB133111EB`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charfun::{shell_distribution, shell_range, GaussianSpec};
use crate::error::{Error, Result};
use crate::grid::{chain_closure, GridFunction};
use crate::padic::{mahler_int, BallSpec, PAdic};

pub type Stream = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn stream(master: u64, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index))
}

/// Run `f` on `count` independent streams in parallel; results are in
/// index order.
pub fn ensemble<T: Send>(master: u64, count: u64, f: impl Fn(u64, &mut Stream) -> T + Sync) -> Vec<T> {
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut stream(master, i)))
        .collect()
}

/// Tail mass left outside the precomputed shell table.
const SAMPLER_TAIL: f64 = 1e-15;

/// Inverse-CDF sampler for a one-dimensional q-Gaussian.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    p: u32,
    n: u32,
    shift: PAdic,
    m_lo: i64,
    /// Cumulative probabilities; slot 0 is the lower tail, slot k the
    /// shell `m_lo + k - 1`.
    cdf: Vec<f64>,
}

impl GaussianSampler {
    /// Draws carry `n` digits.
    pub fn new(spec: &GaussianSpec, n: u32) -> Result<Self> {
        let (lo, hi) = shell_range(spec, SAMPLER_TAIL, 1e-14)?;
        let table = shell_distribution(spec, lo, hi, 1e-14)?;
        let mut acc = table.lower_tail;
        let mut cdf = vec![acc];
        for (_, w) in &table.entries {
            acc += w;
            cdf.push(acc);
        }
        Ok(GaussianSampler { p: table.p, n, shift: spec.shift[0].clone(), m_lo: lo, cdf })
    }

    /// Draw a shell index `m` (`|x - gamma| = p^m`).
    pub fn draw_shell(&self, rng: &mut Stream) -> i64 {
        let u: f64 = rng.gen::<f64>() * self.cdf.last().copied().unwrap_or(1.0).max(1.0);
        let k = self.cdf.partition_point(|&c| c <= u);
        // k == 0 is the lower tail; past the end is the upper tail.
        self.m_lo + k as i64 - 1
    }

    pub fn sample(&self, rng: &mut Stream) -> PAdic {
        let m = self.draw_shell(rng);
        let mut digits = Vec::with_capacity(self.n as usize);
        digits.push(rng.gen_range(1..self.p));
        for _ in 1..self.n {
            digits.push(rng.gen_range(0..self.p));
        }
        let x = PAdic::from_digits(self.p, self.n, -m, &digits).expect("digits in range");
        &x + &self.shift
    }
}
/// One draw from a one-dimensional q-Gaussian at the precision of its shift.
/// One draw from a one-dimensional q-Gaussian with the spec's precision.
pub fn sample_gaussian_1d(spec: &GaussianSpec, rng: &mut Stream) -> Result<PAdic> {
    let n = spec.shift[0].precision();
    Ok(GaussianSampler::new(spec, n)?.sample(rng))
}

/// Which construction produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerTag {
    Mahler,
    Tree,
}

impl SamplerTag {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerTag::Mahler => "mahler",
            SamplerTag::Tree => "tree",
        }
    }
}

/// A sampled Wiener path on the grid of its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    pub values: GridFunction<PAdic>,
    pub tag: SamplerTag,
    pub seed: u64,
}

impl WienerPath {
    pub fn domain(&self) -> &BallSpec {
        self.values.domain()
    }

    pub fn at(&self, i: u64) -> Result<&PAdic> {
        self.values.get(i)
    }

    /// `(t, w)` rows in canonical text form for the defined grid points.
    pub fn rows(&self) -> Vec<(String, String)> {
        self.values
            .defined_indices()
            .map(|i| (self.domain().point(i).to_string(), self.values.get(i).unwrap().to_string()))
            .collect()
    }
}

/// How the Mahler coefficient scales `|zeta_m|` are declared.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaLaw {
    /// `|zeta_m| = p^(-rate m)`.
    Geometric { rate: f64 },
    /// Explicit nonzero values with decaying norms.
    Explicit(Vec<PAdic>),
}

/// `w(t) = sum_{m=1}^{M} X_m Q_m(t)` with independent one-dimensional
/// q-Gaussian coefficients of scale `beta_m = |zeta_m|^(-q)`.
#[derive(Debug, Clone)]
pub struct MahlerWiener {
    domain: BallSpec,
    samplers: Vec<GaussianSampler>,
    betas: Vec<f64>,
    q: f64,
    /// Coefficient precision.
    coeff_prec: u32,
}

impl MahlerWiener {
    pub fn new(law: &ZetaLaw, terms: u32, q: f64, domain: BallSpec) -> Result<Self> {
        let p = domain.prime();
        let n = domain.precision();
        if domain.radius_exp > 0 || !domain.center.is_zero() && domain.center.valuation().unwrap_or(0) < 0 {
            return Err(Error::Domain("Mahler sampler needs a domain inside Z_p".into()));
        }
        let betas: Vec<f64> = match law {
            ZetaLaw::Geometric { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::NotLq(format!("geometric rate {rate} does not decay")));
                }
                (1..=terms).map(|m| (p as f64).powf(rate * m as f64 * q)).collect()
            }
            ZetaLaw::Explicit(z) => {
                if z.len() < terms as usize {
                    return Err(Error::Parameters("fewer zeta values than terms".into()));
                }
                let z = z[..terms as usize].to_vec();
                let zero = vec![PAdic::zero(p, n); z.len()];
                GaussianSpec::product(z, q, zero)?.betas()
            }
        };
        let coeff_prec = n;
        let samplers = betas
            .iter()
            .map(|&b| GaussianSampler::new(&GaussianSpec::one_dim(b, q, PAdic::zero(p, n))?, coeff_prec))
            .collect::<Result<Vec<_>>>()?;
        Ok(MahlerWiener { domain, samplers, betas, q, coeff_prec })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn domain(&self) -> &BallSpec {
        &self.domain
    }

    /// Integer representative of grid point `i`, the argument of `Q_m`.
    pub fn representative(&self, i: u64) -> u128 {
        integer_representative(&self.domain.point(i))
    }

    pub fn terms(&self) -> u32 {
        self.samplers.len() as u32
    }

    /// Coefficients `X_1..X_M` for a path seed.
    pub fn coefficients(&self, seed: u64) -> Vec<PAdic> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.samplers.iter().map(|s| s.sample(&mut rng)).collect()
    }

    fn value(&self, coeffs: &[PAdic], x: &PAdic) -> PAdic {
        let (p, n) = (self.domain.prime(), self.domain.precision());
        let k = integer_representative(x);
        let mut acc = PAdic::zero(p, n);
        for (m, c) in coeffs.iter().enumerate() {
            let q = mahler_int(p, n, m as u32 + 1, k);
            if !q.is_exact_zero() {
                acc = &acc + &(c * &q);
            }
        }
        acc
    }

    /// Path from explicit coefficients on the given indices (all when `None`).
    pub fn path_from(&self, coeffs: &[PAdic], seed: u64, on: Option<&[u64]>) -> WienerPath {
        let f = |_, x: &PAdic| self.value(coeffs, x);
        let values = match on {
            None => GridFunction::from_fn(self.domain.clone(), f),
            Some(ix) => GridFunction::from_fn_on(self.domain.clone(), chain_closure(&self.domain, ix), f),
        };
        WienerPath { values, tag: SamplerTag::Mahler, seed }
    }

    pub fn sample(&self, seed: u64) -> WienerPath {
        self.path_from(&self.coefficients(seed), seed, None)
    }

    /// Values on the prefix chains of `points` only.
    pub fn sample_on(&self, seed: u64, points: &[u64]) -> WienerPath {
        self.path_from(&self.coefficients(seed), seed, Some(points))
    }

    pub fn coefficient_precision(&self) -> u32 {
        self.coeff_prec
    }
}

/// Integer `sum_{k < N} d_k p^k` for `x` in `Z_p`.
fn integer_representative(x: &PAdic) -> u128 {
    if x.is_zero() {
        return 0;
    }
    let v = x.valuation().unwrap();
    let p = x.prime() as u128;
    let mut k: u128 = 0;
    let mut scale: u128 = 1;
    for e in 0..x.precision() as i64 {
        if e >= v {
            k += x.digit_at_exponent(e) as u128 * scale;
        }
        scale *= p;
    }
    k
}

/// Independent q-Gaussian increments on the digit tree: the node of grid
/// index `t != 0` at level `j` (its highest nonzero digit) carries an
/// increment of scale `beta_j`, and `w(t) = w(t - d_j p^j) + Delta_t`.
#[derive(Debug, Clone)]
pub struct TreeWiener {
    domain: BallSpec,
    levels: Vec<GaussianSampler>,
    betas: Vec<f64>,
    q: f64,
}

impl TreeWiener {
    pub fn new(betas: Vec<f64>, q: f64, domain: BallSpec) -> Result<Self> {
        let (p, n) = (domain.prime(), domain.precision());
        if betas.len() < domain.levels() as usize {
            return Err(Error::Parameters(format!(
                "{} level scales for {} levels",
                betas.len(),
                domain.levels()
            )));
        }
        let levels = betas
            .iter()
            .map(|&b| GaussianSampler::new(&GaussianSpec::one_dim(b, q, PAdic::zero(p, n))?, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeWiener { domain, levels, betas, q })
    }

    /// Level scales `beta_j = beta |sigma_{j+1} - sigma_j|^q`, so that each
    /// increment has law `exp(-beta |h Delta t|^q)`.
    pub fn standard(beta: f64, q: f64, domain: BallSpec) -> Result<Self> {
        let p = domain.prime() as f64;
        let r = domain.radius_exp;
        let betas = (0..domain.levels() as i64).map(|j| beta * p.powf((r - j) as f64 * q)).collect();
        Self::new(betas, q, domain)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn domain(&self) -> &BallSpec {
        &self.domain
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The increment attached to node `t` (zero for `t = 0`).
    pub fn increment(&self, seed: u64, t: u64) -> PAdic {
        if t == 0 {
            return PAdic::zero(self.domain.prime(), self.domain.precision());
        }
        let j = top_level(self.domain.prime() as u64, t);
        self.levels[j as usize].sample(&mut stream(seed, t))
    }

    fn parent(&self, t: u64) -> u64 {
        let p = self.domain.prime() as u64;
        let j = top_level(p, t);
        t % p.pow(j)
    }

    pub fn sample(&self, seed: u64) -> WienerPath {
        let mut values = GridFunction::empty(self.domain.clone());
        values.set(0, PAdic::zero(self.domain.prime(), self.domain.precision()));
        for t in 1..self.domain.len() {
            let w = self.increment(seed, t) + values.get(self.parent(t)).unwrap().clone();
            values.set(t, w);
        }
        WienerPath { values, tag: SamplerTag::Tree, seed }
    }

    /// Values on the prefix chains of `points` only; agrees with `sample`
    /// wherever both are defined.
    pub fn sample_on(&self, seed: u64, points: &[u64]) -> WienerPath {
        let ix = chain_closure(&self.domain, points);
        let mut values: GridFunction<PAdic> = GridFunction::empty(self.domain.clone());
        for t in ix {
            let w = if t == 0 {
                PAdic::zero(self.domain.prime(), self.domain.precision())
            } else {
                self.increment(seed, t) + values.get(self.parent(t)).unwrap().clone()
            };
            values.set(t, w);
        }
        WienerPath { values, tag: SamplerTag::Tree, seed }
    }
}

/// Position of the highest nonzero base-p digit of `t > 0`.
fn top_level(p: u64, mut t: u64) -> u32 {
    let mut j = 0;
    while t >= p {
        t /= p;
        j += 1;
    }
    j
}

/// Either Wiener construction.
#[derive(Debug, Clone)]
pub enum WienerSampler {
    Mahler(MahlerWiener),
    Tree(TreeWiener),
}

impl WienerSampler {
    pub fn sample(&self, seed: u64) -> WienerPath {
        match self {
            WienerSampler::Mahler(m) => m.sample(seed),
            WienerSampler::Tree(t) => t.sample(seed),
        }
    }

    pub fn sample_on(&self, seed: u64, points: &[u64]) -> WienerPath {
        match self {
            WienerSampler::Mahler(m) => m.sample_on(seed, points),
            WienerSampler::Tree(t) => t.sample_on(seed, points),
        }
    }

    pub fn tag(&self) -> SamplerTag {
        match self {
            WienerSampler::Mahler(_) => SamplerTag::Mahler,
            WienerSampler::Tree(_) => SamplerTag::Tree,
        }
    }

    pub fn domain(&self) -> &BallSpec {
        match self {
            WienerSampler::Mahler(m) => &m.domain,
            WienerSampler::Tree(t) => &t.domain,
        }
    }
}
