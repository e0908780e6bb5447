//! Additive characters of `Q_p`, characteristic functionals of q-Gaussian
//! measures and the norm-shell distribution obtained from them.
//!
//! Character values are kept as exact angles `num / p^k mod 1`; a complex
//! number is produced only when an expectation is averaged.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::padic::{frac_part, ppow, PAdic};

/// Exact rational angle in `[0, 1)` with a power-of-p denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitAngle {
    p: u32,
    num: u128,
    exp: u32,
}

/// Largest denominator exponent with `p^k < 2^126`.
fn max_exp(p: u32) -> u32 {
    let mut k = 0;
    while (p as u128).checked_pow(k + 1).is_some_and(|m| m < (1u128 << 126)) {
        k += 1;
    }
    k
}

impl UnitAngle {
    pub fn zero(p: u32) -> Self {
        UnitAngle { p, num: 0, exp: 0 }
    }

    /// `num / p^k` reduced mod 1. Denominators beyond `2^126` drop their
    /// least significant digits.
    pub fn from_parts(p: u32, num: u128, k: u32) -> Self {
        let (mut num, mut k) = (num, k);
        let cap = max_exp(p);
        if k > cap {
            num /= ppow(p, k - cap);
            k = cap;
        }
        num %= ppow(p, k);
        while k > 0 && num % p as u128 == 0 {
            num /= p as u128;
            k -= 1;
        }
        if num == 0 {
            k = 0;
        }
        UnitAngle { p, num, exp: k }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    /// Exponent `k` of the denominator `p^k`.
    pub fn denominator_exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "prime mismatch");
        let e = self.exp.max(other.exp);
        let m = ppow(self.p, e);
        let a = self.num * ppow(self.p, e - self.exp);
        let b = other.num * ppow(self.p, e - other.exp);
        Self::from_parts(self.p, (a + b) % m, e)
    }

    /// Complex conjugation.
    pub fn neg(&self) -> Self {
        if self.num == 0 {
            return *self;
        }
        UnitAngle { num: ppow(self.p, self.exp) - self.num, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn to_f64(&self) -> f64 {
        if self.num == 0 {
            return 0.0;
        }
        self.num as f64 / ppow(self.p, self.exp) as f64
    }

    /// `exp(2 pi i angle)`.
    pub fn to_complex(&self) -> Complex64 {
        let th = 2.0 * PI * self.to_f64();
        Complex64::new(th.cos(), th.sin())
    }
}

impl fmt::Debug for UnitAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.num, self.p, self.exp)
    }
}

/// `chi_gamma(x) = exp(2 pi i {gamma x}_p)`, as an angle.
pub fn character(gamma: &PAdic, x: &PAdic) -> UnitAngle {
    frac_part(&(gamma * x))
}

/// How the coordinate scales `beta_j` are given.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianMode {
    /// A single coordinate with scale `beta > 0`.
    OneDim { beta: f64 },
    /// Product measure with `beta_j = |zeta_j|^(-q)`.
    Product { zeta: Vec<PAdic> },
}

/// Parameters of a one-dimensional or product q-Gaussian measure.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub q: f64,
    pub mode: GaussianMode,
    /// Shift `gamma_j`, one entry per coordinate.
    pub shift: Vec<PAdic>,
}

impl GaussianSpec {
    pub fn one_dim(beta: f64, q: f64, shift: PAdic) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameters(format!("beta must be positive, got {beta}")));
        }
        check_q(q)?;
        Ok(GaussianSpec { q, mode: GaussianMode::OneDim { beta }, shift: vec![shift] })
    }

    /// Product mode. `zeta` must be nonzero with non-increasing norms that
    /// actually decay (the finite witness of `J` in `L_q`); the shift must
    /// decay as well.
    pub fn product(zeta: Vec<PAdic>, q: f64, shift: Vec<PAdic>) -> Result<Self> {
        check_q(q)?;
        if zeta.is_empty() {
            return Err(Error::NotLq("empty coefficient sequence".into()));
        }
        if zeta.iter().any(|z| z.is_zero()) {
            return Err(Error::NotLq("zeta_j must be nonzero".into()));
        }
        if zeta.windows(2).any(|w| w[1].norm() > w[0].norm())
            || (zeta.len() > 1 && zeta.last().unwrap().norm() >= zeta[0].norm())
        {
            return Err(Error::NotLq("norms |zeta_j| do not decay".into()));
        }
        if shift.len() != zeta.len() {
            return Err(Error::Parameters("shift length differs from zeta length".into()));
        }
        if shift.len() > 1 {
            let head = shift[0].norm();
            let tail = shift.last().unwrap().norm();
            if head > 0.0 && tail >= head {
                return Err(Error::Domain("shift is not a c_0 truncation".into()));
            }
        }
        Ok(GaussianSpec { q, mode: GaussianMode::Product { zeta }, shift })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn betas(&self) -> Vec<f64> {
        match &self.mode {
            GaussianMode::OneDim { beta } => vec![*beta],
            GaussianMode::Product { zeta } => zeta.iter().map(|z| z.norm().powf(-self.q)).collect(),
        }
    }

    /// The one-dimensional marginal of coordinate `j`.
    pub fn marginal(&self, j: usize) -> GaussianSpec {
        GaussianSpec {
            q: self.q,
            mode: GaussianMode::OneDim { beta: self.betas()[j] },
            shift: vec![self.shift[j].clone()],
        }
    }

    fn one_dim_beta(&self) -> Result<f64> {
        match self.mode {
            GaussianMode::OneDim { beta } => Ok(beta),
            _ => Err(Error::Parameters("one-dimensional spec required".into())),
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameters(format!("q must be >= 1, got {q}")))
    }
}

/// `mu^g(h) = exp(-(sum_j beta_j |g_j|^q) |h|^q) chi_{g(gamma)}(h)`.
pub fn charfun_gaussian(spec: &GaussianSpec, g: &[PAdic], h: &PAdic) -> Result<Complex64> {
    if g.len() != spec.dim() {
        return Err(Error::Parameters(format!(
            "functional has {} coefficients, spec has {}",
            g.len(),
            spec.dim()
        )));
    }
    if h.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let modulus = charfun_modulus(spec, g, h);
    let mut g_gamma = PAdic::zero(h.prime(), h.precision());
    for (gj, sj) in g.iter().zip(&spec.shift) {
        g_gamma = &g_gamma + &(gj * sj);
    }
    Ok(character(&g_gamma, h).to_complex() * modulus)
}

/// `|mu^g(h)|`, computed without the character factor.
pub fn charfun_modulus(spec: &GaussianSpec, g: &[PAdic], h: &PAdic) -> f64 {
    let s: f64 = spec.betas().iter().zip(g).map(|(b, gj)| b * gj.norm().powf(spec.q)).sum();
    (-s * h.norm().powf(spec.q)).exp()
}

/// Shell probabilities `P(|x - gamma| = p^m)` for `m_lo <= m <= m_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTable {
    pub p: u32,
    pub entries: Vec<(i64, f64)>,
    /// `P(|x - gamma| < p^m_lo)`.
    pub lower_tail: f64,
    /// `P(|x - gamma| > p^m_hi)`.
    pub upper_tail: f64,
}

impl ShellTable {
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum::<f64>() + self.lower_tail + self.upper_tail
    }

    pub fn weight(&self, m: i64) -> f64 {
        self.entries.iter().find(|(k, _)| *k == m).map(|e| e.1).unwrap_or(0.0)
    }
}

const MAX_TERMS: usize = 1_000_000;

/// Ball probability `P(|x| <= p^m)` for the centred measure with
/// characteristic function `exp(-beta |h|^q)`:
/// `p^m (1 - 1/p) sum_{k <= -m} exp(-beta p^(kq)) p^k`.
pub fn ball_probability(p: u32, beta: f64, q: f64, m: i64, tol: f64) -> Result<f64> {
    let lp = (p as f64).ln();
    // Terms with beta p^(kq) > 800 are below e^-800 relative to anything kept.
    let k_star = ((800.0 / beta).ln() / (q * lp)).ceil() as i64;
    let mut k = (-m).min(k_star);
    let mut sum = 0.0f64;
    for _ in 0..MAX_TERMS {
        let e = k as f64 * q * lp;
        let log_term = -beta * e.exp() + k as f64 * lp + m as f64 * lp;
        let term = log_term.exp();
        sum += term;
        if beta * e.exp() < 1.0 && term <= tol * sum {
            return Ok(sum * (1.0 - 1.0 / p as f64));
        }
        k -= 1;
    }
    Err(Error::Tail(format!("ball series for m = {m} did not converge")))
}

/// `P(|x| > p^m) = p^m (1 - 1/p) sum_{k <= -m} (1 - exp(-beta p^(kq))) p^k`.
pub fn ball_complement(p: u32, beta: f64, q: f64, m: i64, tol: f64) -> Result<f64> {
    let lp = (p as f64).ln();
    let mut k = -m;
    let mut sum = 0.0f64;
    for _ in 0..MAX_TERMS {
        let x = beta * (k as f64 * q * lp).exp();
        let term = -(-x).exp_m1() * ((k + m) as f64 * lp).exp();
        sum += term;
        if x < 1.0 && term <= tol * sum {
            return Ok(sum * (1.0 - 1.0 / p as f64));
        }
        k -= 1;
    }
    Err(Error::Tail(format!("complement series for m = {m} did not converge")))
}

/// Ball probability through whichever series is numerically stable.
fn cdf(p: u32, beta: f64, q: f64, m: i64, tol: f64) -> Result<(f64, f64)> {
    let direct = ball_probability(p, beta, q, m, tol)?;
    if direct <= 0.5 {
        Ok((direct, 1.0 - direct))
    } else {
        let c = ball_complement(p, beta, q, m, tol)?;
        Ok((1.0 - c, c))
    }
}

/// Shell weights of a one-dimensional spec on `m_lo..=m_hi`.
pub fn shell_distribution(spec: &GaussianSpec, m_lo: i64, m_hi: i64, tail_tol: f64) -> Result<ShellTable> {
    let beta = spec.one_dim_beta()?;
    let p = spec.shift[0].prime();
    if !(tail_tol > 0.0) || m_hi < m_lo {
        return Err(Error::Parameters("need tail_tol > 0 and m_lo <= m_hi".into()));
    }
    let q = spec.q;
    let (lower, _) = cdf(p, beta, q, m_lo - 1, tail_tol)?;
    let mut prev = cdf(p, beta, q, m_lo - 1, tail_tol)?;
    let mut entries = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    for m in m_lo..=m_hi {
        let cur = cdf(p, beta, q, m, tail_tol)?;
        // Difference on whichever side keeps the small numbers small.
        let w = if cur.0 <= 0.5 { cur.0 - prev.0 } else { prev.1 - cur.1 };
        entries.push((m, w));
        prev = cur;
    }
    let upper = ball_complement(p, beta, q, m_hi, tail_tol)?;
    Ok(ShellTable { p, entries, lower_tail: lower, upper_tail: upper })
}

/// Smallest shell range whose two tails both fall below `tail_mass`.
pub fn shell_range(spec: &GaussianSpec, tail_mass: f64, tail_tol: f64) -> Result<(i64, i64)> {
    let beta = spec.one_dim_beta()?;
    let p = spec.shift[0].prime();
    let q = spec.q;
    let mut lo = 0i64;
    while cdf(p, beta, q, lo - 1, tail_tol)?.0 >= tail_mass {
        lo -= 1;
        if lo < -10_000 {
            return Err(Error::Tail("lower shell range does not close".into()));
        }
    }
    while cdf(p, beta, q, lo, tail_tol)?.0 < tail_mass && lo < 0 {
        lo += 1;
    }
    let mut hi = lo.max(0);
    while ball_complement(p, beta, q, hi, tail_tol)? >= tail_mass {
        hi += 1;
        if hi > 10_000 {
            return Err(Error::Tail("upper shell range does not close".into()));
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u32, k: i128) -> PAdic {
        PAdic::from_int(p, 8, k)
    }

    #[test]
    fn angles() {
        let a = UnitAngle::from_parts(5, 3, 1);
        let b = UnitAngle::from_parts(5, 4, 1);
        assert_eq!(a.add(&b), UnitAngle::from_parts(5, 2, 1));
        assert!(a.add(&a.neg()).is_zero());
        assert_eq!(UnitAngle::from_parts(5, 10, 2), UnitAngle::from_parts(5, 2, 1));
        assert!((UnitAngle::from_parts(2, 1, 1).to_complex().re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn character_examples() {
        assert!(character(&qp(5, 3), &qp(5, 7)).is_zero());
        let fifth = PAdic::from_rational(5, 8, 1, 5).unwrap();
        assert_eq!(character(&qp(5, 1), &fifth), UnitAngle::from_parts(5, 1, 1));
    }

    #[test]
    fn charfun_examples() {
        let spec = GaussianSpec::one_dim(1.0, 1.0, PAdic::zero(3, 8)).unwrap();
        let one = qp(3, 1);
        assert_eq!(charfun_gaussian(&spec, &[one.clone()], &PAdic::zero(3, 8)).unwrap(), Complex64::new(1.0, 0.0));
        let v = charfun_gaussian(&spec, &[one.clone()], &qp(3, 2)).unwrap();
        assert!((v.re - 0.367879441171).abs() < 1e-9 && v.im.abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianSpec::one_dim(0.0, 1.0, qp(3, 0)).is_err());
        assert!(GaussianSpec::one_dim(1.0, 0.5, qp(3, 0)).is_err());
        let z: Vec<PAdic> = (1..4).map(|k| PAdic::p_power(3, 8, k)).collect();
        let zero = vec![PAdic::zero(3, 8); 3];
        assert!(GaussianSpec::product(z.clone(), 1.0, zero.clone()).is_ok());
        let flat = vec![qp(3, 1); 3];
        assert!(matches!(GaussianSpec::product(flat, 1.0, zero), Err(Error::NotLq(_))));
    }

    #[test]
    fn shell_table_basic() {
        let spec = GaussianSpec::one_dim(1.0, 1.0, PAdic::zero(2, 8)).unwrap();
        let t = shell_distribution(&spec, -10, 60, 1e-12).unwrap();
        assert!((t.total_mass() - 1.0).abs() < 1e-9);
        assert!(t.entries.iter().all(|e| e.1 >= 0.0));
    }
}
