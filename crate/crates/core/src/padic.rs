//! Fixed-precision arithmetic in `Q_p`.
//!
//! A nonzero value is stored as `p^val * unit + O(p^prec)` where `unit` is a
//! p-adic unit with at most `N` base-p digits and `prec - val <= N` is the
//! number of known digits. `prec` is tracked through every operation, so a
//! computed value is always correct modulo `p^prec`. Cancellation lowers the
//! relative precision instead of inventing digits.
//!
//! Zero comes in two flavours: the exact zero (a dedicated flag, norm 0) and
//! the approximate zero `O(p^k)`, the result of subtracting two values that
//! agree on every known digit. Both report `norm() == 0.0`.

use std::cmp::{max, min, Ordering};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::charfun::UnitAngle;
use crate::error::{Error, Result};

const EXACT: i64 = i64::MAX;

/// Largest `p^N` accepted for a mantissa; products of two mantissas fit in `u128`.
pub const MANTISSA_LIMIT: u128 = 1 << 63;

pub(crate) fn ppow(p: u32, k: u32) -> u128 {
    (p as u128).pow(k)
}

/// Checks that `p` is prime and that `N` digits fit the mantissa.
pub fn check_params(p: u32, n: u32) -> Result<()> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::Parameters(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::Parameters("precision N must be positive".into()));
    }
    match (p as u128).checked_pow(n) {
        Some(m) if m <= MANTISSA_LIMIT => Ok(()),
        _ => Err(Error::Parameters(format!("{p}^{n} exceeds the mantissa capacity"))),
    }
}

/// p-adic valuation of a nonzero integer and its unit part.
fn split_int(p: u32, mut x: u128) -> (i64, u128) {
    debug_assert!(x != 0);
    let mut v = 0;
    let pp = p as u128;
    while x % pp == 0 {
        x /= pp;
        v += 1;
    }
    (v, x)
}

/// Inverse of a unit modulo `p^r` by Newton/Hensel lifting.
fn inv_unit(p: u32, unit: u128, r: u32) -> u128 {
    let pp = p as u128;
    let u0 = unit % pp;
    let mut x = (1..pp).find(|c| (c * u0) % pp == 1).expect("unit has an inverse mod p");
    let mut k = 1u32;
    while k < r {
        k = min(2 * k, r);
        let m = ppow(p, k);
        let ux = (unit % m) * x % m;
        x = x * ((2 + m - ux) % m) % m;
    }
    x % ppow(p, r)
}

/// Arithmetic operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

/// A fixed-precision element of `Q_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u32,
    n: u32,
    val: i64,
    unit: u128,
    prec: i64,
}

impl PAdic {
    /// The exact zero.
    pub fn zero(p: u32, n: u32) -> Self {
        PAdic { p, n, val: EXACT, unit: 0, prec: EXACT }
    }

    /// `O(p^k)`: known to vanish modulo `p^k`, nothing more.
    pub fn approx_zero(p: u32, n: u32, k: i64) -> Self {
        PAdic { p, n, val: k, unit: 0, prec: k }
    }

    pub fn one(p: u32, n: u32) -> Self {
        Self::from_int(p, n, 1)
    }

    /// An integer at full relative precision.
    pub fn from_int(p: u32, n: u32, k: i128) -> Self {
        if k == 0 {
            return Self::zero(p, n);
        }
        let (v, u) = split_int(p, k.unsigned_abs());
        let m = ppow(p, n);
        let x = Self::from_parts(p, n, v, u % m, v + n as i64);
        if k < 0 {
            -x
        } else {
            x
        }
    }

    /// `num / den` at full relative precision.
    pub fn from_rational(p: u32, n: u32, num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroInverse);
        }
        let a = Self::from_int(p, n, num);
        let b = Self::from_int(p, n, den);
        Ok(&a * &b.inv()?)
    }

    /// `p^k` at full relative precision.
    pub fn p_power(p: u32, n: u32, k: i64) -> Self {
        Self::from_parts(p, n, k, 1, k + n as i64)
    }

    /// `digit * p^k`; exact zero when `digit == 0`.
    pub fn digit_at(p: u32, n: u32, digit: u32, k: i64) -> Self {
        if digit == 0 {
            Self::zero(p, n)
        } else {
            Self::from_parts(p, n, k, digit as u128, k + n as i64)
        }
    }

    /// Builds a value from a valuation and base-p digits `d0, d1, ...` (least
    /// significant first). An all-zero digit list gives the exact zero.
    pub fn from_digits(p: u32, n: u32, val: i64, digits: &[u32]) -> Result<Self> {
        if digits.len() > n as usize {
            return Err(Error::BeyondPrecision { j: digits.len() as u32, n });
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Parse(format!("digit {d} out of range for p = {p}")));
        }
        if digits.iter().all(|&d| d == 0) {
            return Ok(Self::zero(p, n));
        }
        if digits[0] == 0 {
            return Err(Error::Parse("leading digit must be nonzero".into()));
        }
        let unit = digits.iter().rev().fold(0u128, |acc, &d| acc * p as u128 + d as u128);
        Ok(Self::from_parts(p, n, val, unit, val + n as i64))
    }

    /// Raw constructor: `p^val * unit + O(p^prec)`. `unit` is normalised.
    pub(crate) fn from_parts(p: u32, n: u32, val: i64, unit: u128, prec: i64) -> Self {
        debug_assert!(prec <= val + n as i64 || unit == 0);
        if prec <= val {
            return Self::approx_zero(p, n, prec);
        }
        let r = (prec - val) as u32;
        let unit = unit % ppow(p, r);
        if unit == 0 {
            return Self::approx_zero(p, n, prec);
        }
        let (s, u) = split_int(p, unit);
        PAdic { p, n, val: val + s, unit: u, prec }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Working precision `N` (maximum number of mantissa digits).
    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec == EXACT
    }

    /// Valuation of a nonzero value; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Absolute precision: the value is known modulo `p^abs_prec`. `None` for
    /// the exact zero.
    pub fn abs_prec(&self) -> Option<i64> {
        (self.prec != EXACT).then_some(self.prec)
    }

    /// Number of known mantissa digits.
    pub fn rel_prec(&self) -> u32 {
        if self.is_zero() {
            0
        } else {
            (self.prec - self.val) as u32
        }
    }

    pub fn unit(&self) -> u128 {
        self.unit
    }

    /// `p^(-val)`, or 0 for zero.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Some(v) => (self.p as f64).powi(-(v as i32)),
            None => 0.0,
        }
    }

    /// Compares norms exactly (through valuations).
    pub fn cmp_norm(&self, other: &Self) -> Ordering {
        match (self.valuation(), other.valuation()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }

    /// The `N` mantissa digits, least significant first; unknown digits are 0.
    pub fn digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut u = self.unit;
        for _ in 0..self.n {
            out.push((u % self.p as u128) as u32);
            u /= self.p as u128;
        }
        out
    }

    /// Digit of the canonical expansion at absolute exponent `k`.
    pub fn digit_at_exponent(&self, k: i64) -> u32 {
        if self.is_zero() || k < self.val || k >= self.prec {
            return 0;
        }
        let shift = (k - self.val) as u32;
        ((self.unit / ppow(self.p, shift)) % self.p as u128) as u32
    }

    /// True when the value is zero at its tracked precision.
    pub fn is_zero_at_precision(&self) -> bool {
        self.is_zero()
    }

    /// Digit-for-digit agreement up to the lesser of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.p == other.p && (self - other).is_zero()
    }

    /// Agreement modulo `p^k` (in addition to the tracked precisions).
    pub fn agrees_mod(&self, other: &Self, k: i64) -> bool {
        let d = self - other;
        d.is_zero() || d.val >= k
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::PrimeMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_impl(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_impl(&other.neg_impl()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.mul_impl(other))
    }

    fn add_impl(&self, other: &Self) -> Self {
        let n = max(self.n, other.n);
        if self.is_exact_zero() {
            return PAdic { n, ..other.clone() };
        }
        if other.is_exact_zero() {
            return PAdic { n, ..self.clone() };
        }
        let prec = min(self.prec, other.prec);
        let v = min(self.val, other.val);
        if prec <= v {
            return Self::approx_zero(self.p, n, prec);
        }
        let r = (prec - v) as u32;
        let m = ppow(self.p, r);
        let term = |x: &Self| -> u128 {
            if x.unit == 0 || x.val - v >= r as i64 {
                0
            } else {
                (x.unit % m) * ppow(x.p, (x.val - v) as u32) % m
            }
        };
        let s = (term(self) + term(other)) % m;
        Self::from_parts(self.p, n, v, s, prec)
    }

    fn neg_impl(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = ppow(self.p, self.rel_prec());
        PAdic { unit: m - self.unit, ..self.clone() }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let n = max(self.n, other.n);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(self.p, n);
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Self::approx_zero(self.p, n, self.prec + other.prec),
            (true, false) => return Self::approx_zero(self.p, n, self.prec + other.val),
            (false, true) => return Self::approx_zero(self.p, n, other.prec + self.val),
            _ => {}
        }
        let val = self.val + other.val;
        let prec = min(self.val + other.prec, other.val + self.prec);
        let r = (prec - val) as u32;
        let m = ppow(self.p, r);
        let u = (self.unit % m) * (other.unit % m) % m;
        Self::from_parts(self.p, n, val, u, prec)
    }

    /// Multiplicative inverse; relative precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let r = self.rel_prec();
        let u = inv_unit(self.p, self.unit, r);
        Ok(Self::from_parts(self.p, self.n, -self.val, u, -self.val + r as i64))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        PAdic { val: self.val + k, prec: self.prec + k, ..self.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p, self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Truncation of the canonical expansion keeping the first `j` mantissa
    /// digits. `sigma(0)` is the exact zero; the truncation is a finite
    /// expansion and carries full relative precision.
    pub fn sigma(&self, j: u32) -> Result<Self> {
        if j > self.n {
            return Err(Error::BeyondPrecision { j, n: self.n });
        }
        if j == 0 || self.is_zero() {
            return Ok(Self::zero(self.p, self.n));
        }
        let known = min(j, self.rel_prec());
        let u = self.unit % ppow(self.p, known);
        Ok(Self::from_parts(self.p, self.n, self.val, u, self.val + self.n as i64))
    }

    /// `sigma(j+1) - sigma(j) = d_j p^(val + j)`, exact zero when `d_j = 0`.
    pub fn sigma_increment(&self, j: u32) -> Result<Self> {
        if j >= self.n {
            return Err(Error::BeyondPrecision { j: j + 1, n: self.n });
        }
        if self.is_zero() {
            return Ok(Self::zero(self.p, self.n));
        }
        let d = self.digit_at_exponent(self.val + j as i64);
        Ok(Self::digit_at(self.p, self.n, d, self.val + j as i64))
    }

    /// Fractional part `{y}_p = sum_{j<0} y_j p^j` as an exact angle.
    /// Digits beyond the tracked precision count as zero.
    pub fn frac_part(&self) -> UnitAngle {
        frac_part(self)
    }
}

/// Field operations with explicit error reporting.
pub fn arith(x: &PAdic, y: &PAdic, op: ArithOp) -> Result<PAdic> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Inv => x.inv(),
        ArithOp::Neg => Ok(-x),
    }
}

/// See [`PAdic::frac_part`].
pub fn frac_part(y: &PAdic) -> UnitAngle {
    if y.is_zero() || y.val >= 0 {
        return UnitAngle::zero(y.p);
    }
    let k = (-y.val) as u32;
    let known = min(k, y.rel_prec());
    let num = y.unit % ppow(y.p, known);
    UnitAngle::from_parts(y.p, num, k)
}

/// Binomial polynomial `Q_m(x) = x(x-1)...(x-m+1)/m!` on `Z_p`.
pub fn mahler(m: u32, x: &PAdic) -> Result<PAdic> {
    if !x.is_zero() && x.val < 0 {
        return Err(Error::Domain(format!("mahler argument has valuation {} < 0", x.val)));
    }
    let (p, n) = (x.p, x.n);
    let mut acc = PAdic::one(p, n);
    for i in 0..m {
        let factor = if i == 0 { x.clone() } else { x - &PAdic::from_int(p, n, i as i128) };
        let (v, u) = split_int(p, (i + 1) as u128);
        let uinv = PAdic::from_parts(p, n, 0, inv_unit(p, u % ppow(p, n), n), n as i64);
        acc = (&(&acc * &factor) * &uinv).shift(-v);
    }
    Ok(acc)
}

/// `Q_m(k)` for a nonnegative integer `k`, at full relative precision.
///
/// The binomial is accumulated as `p^v * unit` with the unit parts of every
/// factor reduced modulo `p^N`, so the result is exact at capacity.
pub fn mahler_int(p: u32, n: u32, m: u32, k: u128) -> PAdic {
    if (m as u128) > k {
        return PAdic::zero(p, n);
    }
    let modulus = ppow(p, n);
    let mut v: i64 = 0;
    let mut unit: u128 = 1;
    for i in 0..m as u128 {
        let (vn, un) = split_int(p, k - i);
        let (vd, ud) = split_int(p, i + 1);
        v += vn - vd;
        unit = unit * (un % modulus) % modulus;
        unit = unit * inv_unit(p, ud % modulus, n) % modulus;
    }
    PAdic::from_parts(p, n, v, unit, v + n as i64)
}

/// Minimal valuation of a convergent EXP argument.
pub fn exp_min_valuation(p: u32) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// The p-adic exponential `sum z^k / k!` on `|z| < p^(-1/(p-1))`.
pub fn exp_p(z: &PAdic) -> Result<PAdic> {
    let (p, n) = (z.p, z.n);
    let one = PAdic::one(p, n);
    if z.is_zero() {
        return Ok(one);
    }
    let v = z.val;
    if v < exp_min_valuation(p) {
        return Err(Error::ExpDivergence(v));
    }
    let target = n as i64;
    let mut sum = one.clone();
    let mut term = one;
    let mut k: u64 = 1;
    loop {
        let (vk, uk) = split_int(p, k as u128);
        let uinv = PAdic::from_parts(p, n, 0, inv_unit(p, uk % ppow(p, n), n), n as i64);
        term = (&(&term * z) * &uinv).shift(-vk);
        sum = &sum + &term;
        // val(z^k/k!) >= k*v - (k-1)/(p-1); once that bound clears the
        // target precision every later term is invisible.
        let bound = (k as i64 + 1) * v - (k as i64) / (p as i64 - 1);
        if bound >= target && k > 1 {
            break;
        }
        k += 1;
    }
    Ok(sum)
}

impl Add for &PAdic {
    type Output = PAdic;
    fn add(self, rhs: &PAdic) -> PAdic {
        assert_eq!(self.p, rhs.p, "prime mismatch");
        self.add_impl(rhs)
    }
}

impl Sub for &PAdic {
    type Output = PAdic;
    fn sub(self, rhs: &PAdic) -> PAdic {
        assert_eq!(self.p, rhs.p, "prime mismatch");
        self.add_impl(&rhs.neg_impl())
    }
}

impl Mul for &PAdic {
    type Output = PAdic;
    fn mul(self, rhs: &PAdic) -> PAdic {
        assert_eq!(self.p, rhs.p, "prime mismatch");
        self.mul_impl(rhs)
    }
}

impl Neg for &PAdic {
    type Output = PAdic;
    fn neg(self) -> PAdic {
        self.neg_impl()
    }
}

impl Neg for PAdic {
    type Output = PAdic;
    fn neg(self) -> PAdic {
        self.neg_impl()
    }
}

impl Add for PAdic {
    type Output = PAdic;
    fn add(self, rhs: PAdic) -> PAdic {
        &self + &rhs
    }
}

impl Sub for PAdic {
    type Output = PAdic;
    fn sub(self, rhs: PAdic) -> PAdic {
        &self - &rhs
    }
}

impl Mul for PAdic {
    type Output = PAdic;
    fn mul(self, rhs: PAdic) -> PAdic {
        &self * &rhs
    }
}

/// Canonical text form `QP(p=<p>,v=<val>,d=<d0 d1 ... d{N-1}>)`.
impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.is_zero() { 0 } else { self.val };
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        write!(f, "QP(p={},v={},d={})", self.p, v, digits.join(" "))
    }
}

impl fmt::Debug for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            write!(f, "0")
        } else if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.prec)
        } else {
            write!(f, "{}^{} * {} + O({}^{})", self.p, self.val, self.unit, self.p, self.prec)
        }
    }
}

impl FromStr for PAdic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a canonical p-adic value: {s:?}"));
        let body = s.trim().strip_prefix("QP(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let mut parts = body.splitn(3, ',');
        let mut field = |key: &str| -> Result<&str> {
            parts.next().and_then(|f| f.strip_prefix(key)).ok_or_else(bad)
        };
        let p: u32 = field("p=")?.parse().map_err(|_| bad())?;
        let v: i64 = field("v=")?.parse().map_err(|_| bad())?;
        let digits: Vec<u32> = field("d=")?
            .split(' ')
            .map(|d| d.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let n = digits.len() as u32;
        check_params(p, n)?;
        let x = PAdic::from_digits(p, n, v, &digits)?;
        if x.is_zero() && v != 0 {
            return Err(bad());
        }
        Ok(x)
    }
}

/// A ball `|x - center| <= p^radius_exp` with its canonical digit grid.
///
/// Grid points are `center + p^(-radius_exp) * i` for `0 <= i < p^levels`,
/// where `levels = radius_exp + depth` and `p^(-depth)` is the resolution.
/// Digit `j` of the index `i` is the digit of the point at exponent
/// `j - radius_exp` relative to the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSpec {
    pub center: PAdic,
    pub radius_exp: i64,
    pub depth: i64,
}

impl BallSpec {
    /// `Z_p` with grid depth `depth`.
    pub fn unit_ball(p: u32, n: u32, depth: u32) -> Self {
        BallSpec { center: PAdic::zero(p, n), radius_exp: 0, depth: depth as i64 }
    }

    pub fn prime(&self) -> u32 {
        self.center.p
    }

    pub fn precision(&self) -> u32 {
        self.center.n
    }

    /// Number of digit levels of the grid.
    pub fn levels(&self) -> u32 {
        (self.radius_exp + self.depth).max(0) as u32
    }

    pub fn len(&self) -> u64 {
        ppow(self.prime(), self.levels()) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radius(&self) -> f64 {
        (self.prime() as f64).powi(self.radius_exp as i32)
    }

    pub fn contains(&self, x: &PAdic) -> bool {
        let d = x - &self.center;
        d.is_zero() || d.val >= -self.radius_exp
    }

    /// The grid point with index `i`.
    pub fn point(&self, i: u64) -> PAdic {
        let (p, n) = (self.prime(), self.precision());
        let offset = PAdic::from_int(p, n, i as i128).shift(-self.radius_exp);
        &self.center + &offset
    }

    /// Index of a grid point, if `x` lies on the grid.
    pub fn index_of(&self, x: &PAdic) -> Option<u64> {
        let d = (x - &self.center).shift(self.radius_exp);
        if d.is_zero() {
            return Some(0);
        }
        if d.val < 0 {
            return None;
        }
        let levels = self.levels() as i64;
        let mut idx: u64 = 0;
        for k in (0..levels).rev() {
            idx = idx * self.prime() as u64 + d.digit_at_exponent(k) as u64;
        }
        (self.point(idx).agrees_with(x)).then_some(idx)
    }

    /// Digit `j` of grid index `i`.
    pub fn digit(&self, i: u64, j: u32) -> u32 {
        ((i / (self.prime() as u64).pow(j)) % self.prime() as u64) as u32
    }

    /// Grid index of `sigma_j` of the point with index `i` (truncation
    /// relative to the ball center).
    pub fn sigma_index(&self, i: u64, j: u32) -> u64 {
        i % (self.prime() as u64).pow(j)
    }

    /// `sigma_{j+1}(t) - sigma_j(t)` for the point with index `i`.
    pub fn increment(&self, i: u64, j: u32) -> PAdic {
        let d = self.digit(i, j);
        PAdic::digit_at(self.prime(), self.precision(), d, j as i64 - self.radius_exp)
    }

    /// The sub-ball of radius `p^(radius_exp - 1)` through the grid point
    /// with leading digit `d`.
    pub fn child(&self, d: u32) -> BallSpec {
        BallSpec {
            center: self.point(d as u64),
            radius_exp: self.radius_exp - 1,
            depth: self.depth,
        }
    }

    /// Index in the parent grid of the child-grid index `i` of child `d`.
    pub fn parent_index(&self, d: u32, i: u64) -> u64 {
        d as u64 + self.prime() as u64 * i
    }

    /// Largest increment norm `max_j |sigma_{j+1} - sigma_j|` over the ball.
    pub fn max_increment_norm(&self) -> f64 {
        if self.levels() == 0 {
            0.0
        } else {
            self.radius()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u32, n: u32, k: i128) -> PAdic {
        PAdic::from_int(p, n, k)
    }

    #[test]
    fn carry_case() {
        let x = &qp(5, 4, 2) + &qp(5, 4, 3);
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.norm(), 0.2);
        assert!(x.agrees_with(&qp(5, 4, 5)));
    }

    #[test]
    fn inverse_of_two_mod_625() {
        let x = qp(5, 4, 2).inv().unwrap();
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.digits(), vec![3, 2, 2, 2]);
        assert!((&x * &qp(5, 4, 2)).agrees_with(&qp(5, 4, 1)));
    }

    #[test]
    fn add_exact_zero_is_identity() {
        let x = PAdic::from_rational(7, 5, 3, 49).unwrap();
        assert_eq!(&x + &PAdic::zero(7, 5), x);
    }

    #[test]
    fn errors() {
        assert_eq!(PAdic::zero(5, 4).inv(), Err(Error::ZeroInverse));
        assert_eq!(qp(5, 4, 0).inv(), Err(Error::ZeroInverse));
        assert_eq!(
            arith(&qp(5, 4, 1), &qp(3, 4, 1), ArithOp::Add),
            Err(Error::PrimeMismatch(5, 3))
        );
        assert!(matches!(qp(5, 4, 1).sigma(5), Err(Error::BeyondPrecision { .. })));
        assert!(check_params(4, 3).is_err());
        assert!(check_params(5, 40).is_err());
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = qp(5, 4, 1 + 125);
        let d = &a - &qp(5, 4, 1);
        assert_eq!(d.valuation(), Some(3));
        assert_eq!(d.abs_prec(), Some(4));
        assert_eq!(d.rel_prec(), 1);
    }

    #[test]
    fn sigma_truncations() {
        let t = qp(5, 4, 1 + 2 * 5 + 3 * 25);
        assert!(t.sigma(1).unwrap().agrees_with(&qp(5, 4, 1)));
        assert!(t.sigma(2).unwrap().agrees_with(&qp(5, 4, 11)));
        assert!(t.sigma(0).unwrap().is_exact_zero());
        assert!(PAdic::zero(5, 4).sigma(3).unwrap().is_exact_zero());
        let one = qp(5, 4, 1);
        let incs: Vec<bool> = (0..4).map(|j| one.sigma_increment(j).unwrap().is_zero()).collect();
        assert_eq!(incs, vec![false, true, true, true]);
    }

    #[test]
    fn frac_parts() {
        assert!(qp(5, 4, 17).frac_part().is_zero());
        let fifth = PAdic::from_rational(5, 4, 1, 5).unwrap();
        assert_eq!(fifth.frac_part(), UnitAngle::from_parts(5, 1, 1));
        let y = PAdic::from_rational(5, 4, 7, 25).unwrap();
        assert_eq!(y.frac_part(), UnitAngle::from_parts(5, 7, 2));
    }

    #[test]
    fn mahler_values() {
        let x = PAdic::from_rational(7, 6, 2, 3).unwrap();
        assert!(mahler(0, &x).unwrap().agrees_with(&qp(7, 6, 1)));
        for m in 1..6u32 {
            for k in 0..m {
                assert!(mahler(m, &qp(7, 6, k as i128)).unwrap().is_zero());
                assert!(mahler_int(7, 6, m, k as u128).is_exact_zero());
            }
        }
        let q = mahler_int(7, 6, 2, 7);
        assert!(q.agrees_with(&qp(7, 6, 21)));
        assert_eq!(q.norm(), 1.0 / 7.0);
        assert!(mahler(2, &qp(7, 6, 7)).unwrap().agrees_with(&q));
        assert!(matches!(mahler(2, &PAdic::p_power(7, 6, -1)), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_values() {
        assert_eq!(exp_p(&PAdic::zero(5, 6)).unwrap(), qp(5, 6, 1));
        let five = qp(5, 6, 5);
        let prod = &exp_p(&five).unwrap() * &exp_p(&-&five).unwrap();
        assert!(prod.agrees_with(&qp(5, 6, 1)));
        let lhs = exp_p(&qp(5, 6, 10)).unwrap();
        let e5 = exp_p(&five).unwrap();
        assert_eq!(lhs, &e5 * &e5);
        assert_eq!(exp_p(&qp(5, 6, 1)), Err(Error::ExpDivergence(0)));
        assert_eq!(exp_p(&qp(2, 6, 2)), Err(Error::ExpDivergence(1)));
        assert!(exp_p(&qp(2, 6, 4)).is_ok());
    }

    #[test]
    fn exp_matches_integer_series() {
        // exp(5) mod 5^6 from the rational series sum 5^k/k!, k < 12.
        let mut acc = PAdic::zero(5, 6);
        let mut fact: i128 = 1;
        for k in 0..14i128 {
            if k > 0 {
                fact *= k;
            }
            let t = PAdic::from_rational(5, 6, 5i128.pow(k as u32), fact).unwrap();
            acc = &acc + &t;
        }
        assert!(acc.agrees_with(&exp_p(&qp(5, 6, 5)).unwrap()));
    }

    #[test]
    fn canonical_text() {
        let x = qp(5, 4, 2).inv().unwrap();
        assert_eq!(x.to_string(), "QP(p=5,v=0,d=3 2 2 2)");
        let s = "QP(p=3,v=-2,d=1 0 2 2 1)";
        assert_eq!(s.parse::<PAdic>().unwrap().to_string(), s);
        assert_eq!(PAdic::zero(3, 3).to_string(), "QP(p=3,v=0,d=0 0 0)");
        assert!("QP(p=3,v=0,d=0 1 2)".parse::<PAdic>().is_err());
        assert!("QP(p=3,v=0,d=3 1 2)".parse::<PAdic>().is_err());
        assert!("QP(p=4,v=0,d=1)".parse::<PAdic>().is_err());
    }

    #[test]
    fn ball_grid() {
        let b = BallSpec::unit_ball(5, 4, 3);
        assert_eq!(b.len(), 125);
        assert_eq!(b.index_of(&qp(5, 4, 37)), Some(37));
        assert!(b.contains(&qp(5, 4, 1234)));
        assert!(!b.contains(&PAdic::p_power(5, 4, -1)));
        let c = b.child(2);
        assert_eq!(c.len(), 25);
        for i in 0..c.len() {
            assert!(c.point(i).agrees_with(&b.point(b.parent_index(2, i))));
        }
        assert!(c.contains(&qp(5, 4, 7)));
        assert!(!c.contains(&qp(5, 4, 8)));
    }
}
