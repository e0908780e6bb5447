//! Evolution operators `U(t, s)` generated by a matrix function `A(t)`.
//!
//! Each chain step `t_j -> t_{j+1}` contributes the factor
//! `EXP((t_{j+1} - t_j) A(t_j))`, so the left equation
//! `U(t, s) = I + [sum_j (EXP(dt_j A(t_j)) - I) U(t_j, s)]` (bracket taken
//! between the chains of `s` and `t`) is solved by `U(t, s) = G(t) G(s)^{-1}`
//! with `G` the anchored solution at the ball center. The operator norm is
//! the largest entry norm.

use std::fmt;
use std::sync::Arc;

use crate::antider::steps;
use crate::error::{Error, Result};
use crate::padic::{exp_min_valuation, BallSpec, PAdic};

/// Square matrix over `Q_p`, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    d: usize,
    a: Vec<PAdic>,
}

impl Matrix {
    pub fn new(d: usize, entries: Vec<PAdic>) -> Result<Self> {
        if entries.len() != d * d || d == 0 {
            return Err(Error::Parameters(format!("{} entries for a {d}x{d} matrix", entries.len())));
        }
        Ok(Matrix { d, a: entries })
    }

    pub fn zero(p: u32, n: u32, d: usize) -> Self {
        Matrix { d, a: vec![PAdic::zero(p, n); d * d] }
    }

    pub fn identity(p: u32, n: u32, d: usize) -> Self {
        let mut m = Self::zero(p, n, d);
        for i in 0..d {
            m.a[i * d + i] = PAdic::one(p, n);
        }
        m
    }

    pub fn scalar(x: PAdic) -> Self {
        Matrix { d: 1, a: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &PAdic {
        &self.a[i * self.d + j]
    }

    pub fn entries(&self) -> &[PAdic] {
        &self.a
    }

    fn prime(&self) -> u32 {
        self.a[0].prime()
    }

    fn precision(&self) -> u32 {
        self.a[0].precision()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let d = self.d;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = PAdic::zero(self.prime(), self.precision());
                for k in 0..d {
                    let (x, y) = (self.get(i, k), o.get(k, j));
                    if !x.is_exact_zero() && !y.is_exact_zero() {
                        acc = &acc + &(x * y);
                    }
                }
                out.push(acc);
            }
        }
        Matrix { d, a: out }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix { d: self.d, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix { d: self.d, a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect() }
    }

    pub fn scale(&self, c: &PAdic) -> Matrix {
        Matrix { d: self.d, a: self.a.iter().map(|x| c * x).collect() }
    }

    /// Largest entry norm; entries that vanish at precision count as zero.
    pub fn norm(&self) -> f64 {
        self.a.iter().filter(|x| !x.is_zero()).map(PAdic::norm).fold(0.0, f64::max)
    }

    pub fn agrees_with(&self, o: &Matrix) -> bool {
        self.d == o.d && self.a.iter().zip(&o.a).all(|(x, y)| x.agrees_with(y))
    }

    /// Entrywise agreement modulo `p^k`.
    pub fn agrees_mod(&self, o: &Matrix, k: i64) -> bool {
        self.d == o.d && self.a.iter().zip(&o.a).all(|(x, y)| x.agrees_mod(y, k))
    }

    /// Smallest entry valuation, `None` for the exact zero matrix.
    pub fn min_valuation(&self) -> Option<i64> {
        self.a
            .iter()
            .filter(|x| !x.is_exact_zero())
            .map(|x| x.valuation().or_else(|| x.abs_prec()).unwrap())
            .min()
    }

    /// `sum_k Z^k / k!` on the convergence domain.
    pub fn exp(&self) -> Result<Matrix> {
        let (p, n) = (self.prime(), self.precision());
        let id = Matrix::identity(p, n, self.d);
        let Some(v) = self.min_valuation() else {
            return Ok(id);
        };
        if v < exp_min_valuation(p) {
            return Err(Error::ExpDivergence(v));
        }
        let mut sum = id.clone();
        let mut term = id;
        let mut k: i64 = 1;
        loop {
            let inv_k = PAdic::from_int(p, n, k as i128).inv()?;
            term = term.mul(self).scale(&inv_k);
            sum = sum.add(&term);
            // Same tail bound as the scalar series. Entries smaller than the
            // tail only carry digits above the first omitted term.
            let tail = (k + 1) * v - k / (p as i64 - 1);
            if tail >= n as i64 && k > 1 {
                let cap = PAdic::approx_zero(p, n, tail);
                return Ok(Matrix { d: self.d, a: sum.a.iter().map(|x| x + &cap).collect() });
            }
            k += 1;
        }
    }

    /// Inverse by Gauss-Jordan elimination with largest-norm pivots.
    pub fn inverse(&self) -> Result<Matrix> {
        let d = self.d;
        let (p, n) = (self.prime(), self.precision());
        let mut a = self.a.clone();
        let mut b = Matrix::identity(p, n, d).a;
        for col in 0..d {
            let piv = (col..d)
                .filter(|&r| !a[r * d + col].is_zero())
                .max_by(|&r, &s| a[r * d + col].cmp_norm(&a[s * d + col]).then(s.cmp(&r)))
                .ok_or(Error::ZeroInverse)?;
            if piv != col {
                for k in 0..d {
                    a.swap(piv * d + k, col * d + k);
                    b.swap(piv * d + k, col * d + k);
                }
            }
            let inv = a[col * d + col].inv()?;
            for k in 0..d {
                a[col * d + k] = &a[col * d + k] * &inv;
                b[col * d + k] = &b[col * d + k] * &inv;
            }
            for r in 0..d {
                if r == col || a[r * d + col].is_exact_zero() {
                    continue;
                }
                let f = a[r * d + col].clone();
                for k in 0..d {
                    a[r * d + k] = &a[r * d + k] - &(&f * &a[col * d + k]);
                    b[r * d + k] = &b[r * d + k] - &(&f * &b[col * d + k]);
                }
            }
        }
        Ok(Matrix { d, a: b })
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.a.iter().map(|x| x.to_string())).finish()
    }
}

/// A bounded, entrywise continuous generator `A(t)`.
#[derive(Clone)]
pub enum GeneratorSpec {
    Constant(Matrix),
    /// `A(t) = sum_k t^k A_k`.
    Polynomial(Vec<Matrix>),
    /// Constant on sub-balls: `values` indexed by the first `depth` digits of
    /// `(t - center) p^radius_exp`.
    ByBall { center: PAdic, radius_exp: i64, depth: u32, values: Vec<Matrix> },
    Sum(Arc<GeneratorSpec>, Arc<GeneratorSpec>),
    /// Generator given by a program.
    Program(usize, Arc<dyn Fn(&PAdic) -> Matrix + Send + Sync>),
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Constant(m) => write!(f, "Constant({m:?})"),
            GeneratorSpec::Polynomial(v) => write!(f, "Polynomial({v:?})"),
            GeneratorSpec::ByBall { depth, values, .. } => write!(f, "ByBall(depth {depth}, {values:?})"),
            GeneratorSpec::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            GeneratorSpec::Program(d, _) => write!(f, "Program(dim {d})"),
        }
    }
}

impl GeneratorSpec {
    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::Constant(m) => m.dim(),
            GeneratorSpec::Polynomial(v) => v[0].dim(),
            GeneratorSpec::ByBall { values, .. } => values[0].dim(),
            GeneratorSpec::Sum(a, _) => a.dim(),
            GeneratorSpec::Program(d, _) => *d,
        }
    }

    pub fn eval(&self, t: &PAdic) -> Matrix {
        match self {
            GeneratorSpec::Constant(m) => m.clone(),
            GeneratorSpec::Polynomial(cs) => {
                let mut acc = cs.last().unwrap().clone();
                for c in cs.iter().rev().skip(1) {
                    acc = acc.scale(t).add(c);
                }
                acc
            }
            GeneratorSpec::ByBall { center, radius_exp, depth, values } => {
                let d = (t - center).shift(*radius_exp);
                let p = t.prime() as usize;
                let mut k = 0usize;
                for e in (0..*depth as i64).rev() {
                    k = k * p + d.digit_at_exponent(e) as usize;
                }
                values[k % values.len()].clone()
            }
            GeneratorSpec::Sum(a, b) => a.eval(t).add(&b.eval(t)),
            GeneratorSpec::Program(_, f) => f(t),
        }
    }

    pub fn plus(&self, other: &GeneratorSpec) -> GeneratorSpec {
        GeneratorSpec::Sum(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    /// `sup_t ||A(t)||` over the grid.
    pub fn sup_norm(&self, domain: &BallSpec) -> f64 {
        (0..domain.len()).map(|i| self.eval(&domain.point(i)).norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Solved,
    Dual,
    Exp,
    Perturbed,
    Functional,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Solved => "solved",
            Provenance::Dual => "dual",
            Provenance::Exp => "exp",
            Provenance::Perturbed => "perturbed",
            Provenance::Functional => "functional",
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `U(t, s) = left[t] right[s]`.
    Factored { left: Vec<Matrix>, right: Vec<Matrix> },
    /// `U(t, s) = EXP((t - s) A)`.
    Exp(Matrix),
}

/// A two-parameter family of `d x d` matrices on the grid of a ball.
#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    domain: BallSpec,
    dim: usize,
    pub provenance: Provenance,
    repr: Repr,
    /// Picard iterations used (0 when not solved).
    pub iterations: u32,
}

impl EvolutionOperator {
    pub fn domain(&self) -> &BallSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `U(t, s)` for grid indices `t`, `s`.
    pub fn at(&self, t: u64, s: u64) -> Result<Matrix> {
        match &self.repr {
            Repr::Factored { left, right } => Ok(left[t as usize].mul(&right[s as usize])),
            Repr::Exp(a) => {
                let h = self.domain.point(t) - self.domain.point(s);
                a.scale(&h).exp()
            }
        }
    }

    /// Family built from explicit factors `U(t, s) = left[t] right[s]`.
    pub fn from_factors(domain: BallSpec, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self> {
        if left.len() as u64 != domain.len() || right.len() != left.len() {
            return Err(Error::GridMismatch("factor tables do not cover the grid".into()));
        }
        let dim = left[0].dim();
        Ok(EvolutionOperator { domain, dim, provenance: Provenance::Functional, repr: Repr::Factored { left, right }, iterations: 0 })
    }
}

/// Step factors `EXP(dt A(t_j))` (or with `-dt` when `sign < 0`) for the
/// step into each grid node from its chain parent.
fn step_factors(a: &GeneratorSpec, domain: &BallSpec, sign: i32) -> Result<Vec<Matrix>> {
    let (p, n) = (domain.prime(), domain.precision());
    let mut out = vec![Matrix::identity(p, n, a.dim())];
    for t in 1..domain.len() {
        let s = steps(domain, t).pop().unwrap();
        let dt = if sign < 0 { -s.dt } else { s.dt };
        out.push(a.eval(&domain.point(s.lo)).scale(&dt).exp()?);
    }
    Ok(out)
}

fn chain_parent(domain: &BallSpec, t: u64) -> u64 {
    steps(domain, t).pop().map(|s| s.lo).unwrap_or(0)
}

fn max_defect(x: &[Matrix], y: &[Matrix]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a.sub(b).norm()).fold(0.0, f64::max)
}

/// Picard iteration for `X(t) = I + sum_j F_j` with
/// `F_j = (E_j - I) X(t_j)` (left) or `X(t_j) (E_j - I)` (right).
fn picard_anchored(e: &[Matrix], domain: &BallSpec, left: bool) -> Result<(Vec<Matrix>, u32)> {
    let (p, n) = (domain.prime(), domain.precision());
    let dim = e[0].dim();
    let id = Matrix::identity(p, n, dim);
    let parents: Vec<u64> = (0..domain.len()).map(|t| chain_parent(domain, t)).collect();
    let mut x = vec![id.clone(); domain.len() as usize];
    let mut last = f64::INFINITY;
    let max_iter = n * p + domain.levels() + 1;
    for it in 1..=max_iter {
        let mut sum = vec![Matrix::zero(p, n, dim); x.len()];
        for t in 1..x.len() {
            let par = parents[t] as usize;
            let step = e[t].sub(&id);
            let f = if left { step.mul(&x[par]) } else { x[par].mul(&step) };
            sum[t] = sum[par].add(&f);
        }
        let next: Vec<Matrix> = sum.iter().map(|s| id.add(s)).collect();
        let defect = max_defect(&next, &x);
        x = next;
        if defect == 0.0 {
            return Ok((x, it));
        }
        if defect >= last {
            return Err(Error::NoContraction(format!("evolution iteration stalled at defect {defect}")));
        }
        last = defect;
    }
    Err(Error::NoContraction("evolution iteration did not reach a fixed point".into()))
}

/// Solve the left equation for every pair of grid points.
pub fn solve_evolution(a: &GeneratorSpec, domain: &BallSpec) -> Result<EvolutionOperator> {
    let e = step_factors(a, domain, 1)?;
    let (g, iterations) = picard_anchored(&e, domain, true)?;
    let ginv = g.iter().map(Matrix::inverse).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionOperator {
        domain: domain.clone(),
        dim: a.dim(),
        provenance: Provenance::Solved,
        repr: Repr::Factored { left: g, right: ginv },
        iterations,
    })
}

/// Solve the dual equation `V(t, s) = I + P_u V(t, u) A(u)`, read with the
/// step factor `EXP(-dt A)`.
pub fn solve_dual(a: &GeneratorSpec, domain: &BallSpec) -> Result<EvolutionOperator> {
    let e = step_factors(a, domain, -1)?;
    let (h, iterations) = picard_anchored(&e, domain, false)?;
    let hinv = h.iter().map(Matrix::inverse).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionOperator {
        domain: domain.clone(),
        dim: a.dim(),
        provenance: Provenance::Dual,
        repr: Repr::Factored { left: hinv, right: h },
        iterations,
    })
}

/// `U(t, s) = EXP((t - s) A)` for constant `A`.
pub fn exp_operator(a: &Matrix, domain: &BallSpec) -> Result<EvolutionOperator> {
    let r = PAdic::p_power(domain.prime(), domain.precision(), -domain.radius_exp);
    a.scale(&r).exp()?;
    Ok(EvolutionOperator {
        domain: domain.clone(),
        dim: a.dim(),
        provenance: Provenance::Exp,
        repr: Repr::Exp(a.clone()),
        iterations: 0,
    })
}

/// Sums `S(t) = sum_{chain t} (E_j - I) M(t_j)` over all grid points.
fn chain_sums(e: &[Matrix], domain: &BallSpec, m: impl Fn(u64) -> Result<Matrix>) -> Result<Vec<Matrix>> {
    let (p, n) = (domain.prime(), domain.precision());
    let dim = e[0].dim();
    let id = Matrix::identity(p, n, dim);
    let mut sum = vec![Matrix::zero(p, n, dim); domain.len() as usize];
    for t in 1..domain.len() {
        let par = chain_parent(domain, t);
        sum[t as usize] = sum[par as usize].add(&e[t as usize].sub(&id).mul(&m(par)?));
    }
    Ok(sum)
}

/// `max_t ||U(t, s) - I - [sum_j (E_j - I) U(t_j, s)]_s^t||` for fixed `s`.
pub fn left_residual(u: &EvolutionOperator, a: &GeneratorSpec, s: u64) -> Result<f64> {
    let d = u.domain();
    let e = step_factors(a, d, 1)?;
    let sums = chain_sums(&e, d, |v| u.at(v, s))?;
    let id = Matrix::identity(d.prime(), d.precision(), u.dim());
    let mut worst: f64 = 0.0;
    for t in 0..d.len() {
        let rhs = id.add(&sums[t as usize]).sub(&sums[s as usize]);
        worst = worst.max(u.at(t, s)?.sub(&rhs).norm());
    }
    Ok(worst)
}

/// Outcome of a perturbation comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    /// Largest residual of the perturbation identity over the checked pairs.
    pub identity_residual: f64,
    /// `max ||U~(t, s) - U(t, s)||`.
    pub difference: f64,
    /// `M M~ sup ||B|| R`.
    pub bound: f64,
    pub bound_holds: bool,
    /// `M C R < 1`, the hypothesis of the uniform bound.
    pub hypothesis_met: bool,
    /// `sup ||U~||` and `M / (1 - M C R)` when the hypothesis holds.
    pub uniform: Option<(f64, f64)>,
}

/// Compare the operators of `A` and `A + B` on the given `(t, s)` pairs and
/// check `U~(t, s) = U(t, s) + [sum_j U(t, v_j) D_j U~(v_j, s)]_s^t` with
/// `D_j = EXP(-dt A(v_j)) EXP(dt (A + B)(v_j)) - I`.
pub fn perturbation_check(
    a: &GeneratorSpec,
    b: &GeneratorSpec,
    domain: &BallSpec,
    pairs: &[(u64, u64)],
) -> Result<PerturbationReport> {
    let ab = a.plus(b);
    let u = solve_evolution(a, domain)?;
    let mut ut = solve_evolution(&ab, domain)?;
    ut.provenance = Provenance::Perturbed;
    let em = step_factors(a, domain, -1)?;
    let ep = step_factors(&ab, domain, 1)?;
    let dj: Vec<Matrix> = em.iter().zip(&ep).map(|(x, y)| x.mul(y)).collect();
    let id = Matrix::identity(domain.prime(), domain.precision(), a.dim());

    let mut identity_residual: f64 = 0.0;
    let mut difference: f64 = 0.0;
    let (mut sup_u, mut sup_ut): (f64, f64) = (0.0, 0.0);
    for &(t, s) in pairs {
        // Chain sums of U(t, v) D_v U~(v, s) along the chains of t and s.
        let sum_on = |x: u64| -> Result<Matrix> {
            let mut acc = Matrix::zero(domain.prime(), domain.precision(), a.dim());
            for st in steps(domain, x) {
                let dv = dj[st.hi as usize].sub(&id);
                acc = acc.add(&u.at(t, st.lo)?.mul(&dv).mul(&ut.at(st.lo, s)?));
            }
            Ok(acc)
        };
        let rhs = u.at(t, s)?.add(&sum_on(t)?).sub(&sum_on(s)?);
        let lhs = ut.at(t, s)?;
        identity_residual = identity_residual.max(lhs.sub(&rhs).norm());
        difference = difference.max(lhs.sub(&u.at(t, s)?).norm());
        sup_u = sup_u.max(u.at(t, s)?.norm());
        sup_ut = sup_ut.max(lhs.norm());
    }
    let c = b.sup_norm(domain);
    let r = domain.radius();
    let (m, mt) = (1.0 + sup_u, 1.0 + sup_ut);
    let bound = m * mt * c * r;
    let hypothesis_met = m * c * r < 1.0;
    Ok(PerturbationReport {
        identity_residual,
        difference,
        bound,
        bound_holds: difference <= bound,
        hypothesis_met,
        uniform: hypothesis_met.then(|| (sup_ut, m / (1.0 - m * c * r))),
    })
}

/// A difference-quotient estimate of the generator.
#[derive(Debug, Clone)]
pub struct GeneratorEstimate {
    pub matrix: Matrix,
    /// Digit level `k` of the step `h = p^(k - radius_exp)`.
    pub level: u32,
    /// Absolute exponent `N - n - 1` to which the estimate is claimed, with
    /// `|h| = p^(-n)`.
    pub accuracy_exp: i64,
}

/// `[U(t + h, t) - I] / h` along `h = p^(k - r)`, taking the first level
/// that agrees with the next one modulo `p^(N - n - 1)`.
pub fn generating_operator(u: &EvolutionOperator, t: u64) -> Result<GeneratorEstimate> {
    let d = u.domain();
    let (p, n) = (d.prime(), d.precision());
    let id = Matrix::identity(p, n, u.dim());
    let l = d.levels();
    let quotient = |k: u32| -> Result<Matrix> {
        let t2 = (t + (p as u64).pow(k)) % d.len();
        let h = d.point(t2) - d.point(t);
        Ok(u.at(t2, t)?.sub(&id).scale(&h.inv()?))
    };
    let mut prev = None;
    for k in 0..l {
        let q = quotient(k)?;
        if let Some((kp, qp)) = prev.take() {
            let np = kp as i64 - d.radius_exp;
            let acc = n as i64 - np - 1;
            if acc <= 0 {
                break;
            }
            if q.agrees_mod(&qp, acc) {
                return Ok(GeneratorEstimate { matrix: qp, level: kp, accuracy_exp: acc });
            }
        }
        prev = Some((k, q));
    }
    Err(Error::NoLimit(format!("difference quotients at grid index {t} did not stabilize")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, n: u32, v: &[i128]) -> Matrix {
        let d = (v.len() as f64).sqrt() as usize;
        Matrix::new(d, v.iter().map(|&x| PAdic::from_int(p, n, x)).collect()).unwrap()
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(5, 6, &[1, 5, 2, 3, 1, 0, 0, 25, 1]);
        let i = a.inverse().unwrap();
        assert!(a.mul(&i).agrees_with(&Matrix::identity(5, 6, 3)));
        assert!(m(5, 6, &[0, 0, 0, 0]).inverse().is_err());
    }

    #[test]
    fn matrix_exp_matches_scalar() {
        let z = m(5, 6, &[5]);
        let e = z.exp().unwrap();
        assert_eq!(e.get(0, 0), &crate::padic::exp_p(&PAdic::from_int(5, 6, 5)).unwrap());
        assert!(matches!(m(5, 6, &[1]).exp(), Err(Error::ExpDivergence(0))));
    }

    #[test]
    fn exp_caps_small_entries_at_the_series_tail() {
        let e = m(3, 6, &[3, 243, 0, 3]).exp().unwrap();
        let off = e.get(0, 1);
        assert_eq!(off.valuation(), Some(5));
        assert!(off.abs_prec().unwrap() <= 7);
    }

    #[test]
    fn zero_generator() {
        let d = BallSpec::unit_ball(3, 6, 2);
        let u = solve_evolution(&GeneratorSpec::Constant(Matrix::zero(3, 6, 2)), &d).unwrap();
        for t in 0..d.len() {
            assert!(u.at(t, 5).unwrap().agrees_with(&Matrix::identity(3, 6, 2)));
        }
    }

    #[test]
    fn constant_generator_is_exp() {
        let d = BallSpec::unit_ball(5, 6, 3);
        let a = m(5, 6, &[5, 10, 0, 25]);
        let spec = GeneratorSpec::Constant(a.clone());
        let u = solve_evolution(&spec, &d).unwrap();
        let e = exp_operator(&a, &d).unwrap();
        for (t, s) in [(7u64, 3u64), (100, 0), (0, 124)] {
            assert!(u.at(t, s).unwrap().agrees_mod(&e.at(t, s).unwrap(), 5));
        }
        assert_eq!(left_residual(&u, &spec, 3).unwrap(), 0.0);
    }
}
