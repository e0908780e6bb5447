//! Multiplicative operator functionals of solved equations and the series
//! formula for the generator of `eta = f(t, xi(t))`.

use crate::antider::steps;
use crate::error::{Error, Result};
use crate::evolution::{EvolutionOperator, Matrix};
use crate::grid::GridFunction;
use crate::measure::WienerPath;
use crate::padic::{BallSpec, PAdic};
use crate::sde::{solve_picard, SdeProblem};

/// The scalar family `T(t, s) = eta(t) / eta(s)`.
pub fn scalar_family(eta: &GridFunction<PAdic>) -> Result<EvolutionOperator> {
    let d = eta.domain().clone();
    let mut left = Vec::with_capacity(d.len() as usize);
    let mut right = Vec::with_capacity(d.len() as usize);
    for i in 0..d.len() {
        let v = eta.get(i)?;
        left.push(Matrix::scalar(v.clone()));
        right.push(Matrix::scalar(v.inv()?));
    }
    EvolutionOperator::from_factors(d, left, right)
}

/// `T(t, s) = Y(t) Y(s)^{-1}` where `Y` solves the problem from `xi_0 = 1`.
/// Meaningful for coefficients linear in `xi` without offset.
pub fn linear_family(problem: &SdeProblem, w: &WienerPath) -> Result<EvolutionOperator> {
    let mut unit = problem.clone();
    unit.xi0 = PAdic::one(problem.domain.prime(), problem.domain.precision());
    scalar_family(&solve_picard(&unit, w)?.xi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MofReport {
    pub samples: usize,
    pub triples: usize,
    /// `T(t, t) = I` at precision for every checked point.
    pub identity: bool,
    /// `T(t, s) T(s, v) = T(t, v)` at precision for every triple.
    pub cocycle: bool,
    pub cocycle_residual: f64,
    /// Smallest `C` with `M ||T(t, s) e_i||^q <= C` over the checked pairs.
    pub moment_constant: f64,
}

/// Check identity, cocycle and moment properties over an ensemble of
/// families sharing one grid.
pub fn mof_check(family: &[EvolutionOperator], triples: &[(u64, u64, u64)], q: f64) -> Result<MofReport> {
    let mut identity = true;
    let mut cocycle_residual: f64 = 0.0;
    let mut moment: f64 = 0.0;
    let count = family.len() as f64;
    for &(t, s, v) in triples {
        let mut col_means = vec![0.0f64; family[0].dim()];
        for op in family {
            let d = op.domain();
            let id = Matrix::identity(d.prime(), d.precision(), op.dim());
            identity &= op.at(t, t)?.agrees_with(&id);
            let lhs = op.at(t, s)?.mul(&op.at(s, v)?);
            cocycle_residual = cocycle_residual.max(lhs.sub(&op.at(t, v)?).norm());
            let ts = op.at(t, s)?;
            for (j, m) in col_means.iter_mut().enumerate() {
                let norm = (0..op.dim())
                    .map(|i| ts.get(i, j))
                    .filter(|x| !x.is_zero())
                    .map(PAdic::norm)
                    .fold(0.0, f64::max);
                *m += norm.powf(q) / count;
            }
        }
        moment = col_means.into_iter().fold(moment, f64::max);
    }
    Ok(MofReport {
        samples: family.len(),
        triples: triples.len(),
        identity,
        cocycle: cocycle_residual == 0.0,
        cocycle_residual,
        moment_constant: moment,
    })
}

/// Largest `||xi(t) - T(t, t_0) xi_0||` over the grid and the given initial
/// values, for a linear problem on one path.
pub fn representation_residual(problem: &SdeProblem, w: &WienerPath, xi0s: &[PAdic]) -> Result<f64> {
    let fam = linear_family(problem, w)?;
    let mut worst: f64 = 0.0;
    for x0 in xi0s {
        let mut pr = problem.clone();
        pr.xi0 = x0.clone();
        let sol = solve_picard(&pr, w)?;
        for t in 0..problem.domain.len() {
            let pred = fam.at(t, 0)?.get(0, 0) * x0;
            let d = sol.xi.get(t)? - &pred;
            if !d.is_zero() {
                worst = worst.max(d.norm());
            }
        }
    }
    Ok(worst)
}

/// `f(t, x) = sum_{b, m} c[b][m] t^b x^m` with exact partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyF {
    pub coeffs: Vec<Vec<PAdic>>,
}

fn falling(n: usize, k: usize) -> i128 {
    (0..k).map(|i| (n - i) as i128).product()
}

impl PolyF {
    /// `f(x) = sum_m c_m x^m`.
    pub fn in_x(c: Vec<PAdic>) -> Self {
        PolyF { coeffs: vec![c] }
    }

    /// `d^{b+m} f / dt^b dx^m` at `(t, x)`.
    pub fn partial(&self, b: usize, m: usize, t: &PAdic, x: &PAdic) -> PAdic {
        let (p, n) = (x.prime(), x.precision());
        let mut acc = PAdic::zero(p, n);
        for (bb, row) in self.coeffs.iter().enumerate().skip(b) {
            for (mm, c) in row.iter().enumerate().skip(m) {
                if c.is_exact_zero() {
                    continue;
                }
                let k = PAdic::from_int(p, n, falling(bb, b) * falling(mm, m));
                acc = &acc + &(&(&(c * &k) * &t.pow((bb - b) as u32)) * &x.pow((mm - m) as u32));
            }
        }
        acc
    }

    pub fn eval(&self, t: &PAdic, x: &PAdic) -> PAdic {
        self.partial(0, 0, t, x)
    }
}

/// `sum_j g(t_j) dt_j^kt dw_j^kw` along the chain of `t`.
fn chain_sum(g: &GridFunction<PAdic>, w: &WienerPath, kt: u32, kw: u32, t: u64) -> Result<PAdic> {
    let d = g.domain();
    let mut acc = PAdic::zero(d.prime(), d.precision());
    for s in steps(d, t) {
        let mut v = g.get(s.lo)?.clone();
        if kt > 0 {
            v = &v * &s.dt.pow(kt);
        }
        if kw > 0 {
            v = &v * &(w.at(s.hi)? - w.at(s.lo)?).pow(kw);
        }
        acc = &acc + &v;
    }
    Ok(acc)
}

/// `w'(t)` by difference quotients along `h = p^(k - r)`, accepted once two
/// consecutive levels agree modulo `p^(N - n - 1)`.
pub fn path_derivative(w: &WienerPath, t: u64) -> Result<PAdic> {
    let d = w.domain();
    let (p, n) = (d.prime(), d.precision());
    let q = |k: u32| -> Result<PAdic> {
        let t2 = (t + (p as u64).pow(k)) % d.len();
        let h = d.point(t2) - d.point(t);
        Ok((w.at(t2)? - w.at(t)?) * h.inv()?)
    };
    let mut prev: Option<(u32, PAdic)> = None;
    for k in 0..d.levels() {
        let cur = q(k)?;
        if let Some((kp, qp)) = prev.take() {
            let acc = n as i64 - (kp as i64 - d.radius_exp) - 1;
            if acc <= 0 {
                break;
            }
            if cur.agrees_mod(&qp, acc) {
                return Ok(qp);
            }
        }
        prev = Some((k, cur));
    }
    Err(Error::NotC1(format!("difference quotients of w at grid index {t} did not stabilize")))
}

fn binom(n: usize, k: usize) -> i128 {
    falling(n, k) / falling(k, k)
}

/// Inputs of the generator series: the solution and its coefficients
/// evaluated along it.
pub struct SeriesInputs<'a> {
    pub f: &'a PolyF,
    pub xi: &'a GridFunction<PAdic>,
    pub a: &'a GridFunction<PAdic>,
    pub e: &'a GridFunction<PAdic>,
    pub w: &'a WienerPath,
}

/// The generator series for `eta = f(t, xi)` at grid index `t`, truncated at
/// total order `m + b <= max_order`, evaluated term by term as displayed:
/// `f'_t + f'_x a + f'_x E w' + sum_{m+b>=2} ((m+b)!)^{-1} sum_l C(m+b, m)
/// C(m, l) {(b+m-l) P_{u^{b+m-l-1}, w^l}[D a^{m-l} E^l]
/// + l P_{u^{b+m-l}, w^{l-1}}[D a^{m-l} E^{l-1}] E w'}` with
/// `D = d^{m+b} f / du^b dx^m (u, xi(u))`.
pub fn generator_series(inp: &SeriesInputs<'_>, t: u64, max_order: usize) -> Result<PAdic> {
    let d: &BallSpec = inp.xi.domain();
    let (p, n) = (d.prime(), d.precision());
    let at = |g: &GridFunction<PAdic>, i: u64| g.get(i).cloned();
    let tp = d.point(t);
    let x = at(inp.xi, t)?;
    let e_t = at(inp.e, t)?;
    let noisy = (0..d.len()).any(|i| inp.e.try_get(i).is_some_and(|v| !v.is_zero()));
    let wprime = if noisy { Some(path_derivative(inp.w, t)?) } else { None };
    let ew = |v: PAdic| -> PAdic {
        match &wprime {
            Some(wp) => &(&v * &e_t) * wp,
            None => PAdic::zero(p, n),
        }
    };

    let fx = inp.f.partial(0, 1, &tp, &x);
    let mut acc = inp.f.partial(1, 0, &tp, &x) + &fx * &at(inp.a, t)?;
    acc = acc + ew(fx);

    for order in 2..=max_order {
        let inv_fact = PAdic::from_rational(p, n, 1, (1..=order as i128).product())?;
        for b in 0..=order {
            let m = order - b;
            let deriv = GridFunction::from_fn(d.clone(), |i, u| {
                inp.f.partial(b, m, u, inp.xi.get(i).unwrap())
            });
            if deriv.defined_indices().all(|i| deriv.get(i).unwrap().is_exact_zero()) {
                continue;
            }
            for l in 0..=m {
                let c = &inv_fact * &PAdic::from_int(p, n, binom(order, m) * binom(m, l));
                let integrand = |le: usize| {
                    GridFunction::from_fn(d.clone(), |i, _| {
                        let mut v = deriv.get(i).unwrap().clone();
                        if m > l {
                            v = &v * &inp.a.get(i).unwrap().pow((m - l) as u32);
                        }
                        if le > 0 {
                            v = &v * &inp.e.get(i).unwrap().pow(le as u32);
                        }
                        v
                    })
                };
                let kt = (b + m - l) as u32;
                if kt > 0 {
                    let s = chain_sum(&integrand(l), inp.w, kt - 1, l as u32, t)?;
                    acc = acc + &c * &(&PAdic::from_int(p, n, kt as i128) * &s);
                }
                if l > 0 {
                    let s = chain_sum(&integrand(l - 1), inp.w, kt, l as u32 - 1, t)?;
                    acc = acc + &c * &ew(&PAdic::from_int(p, n, l as i128) * &s);
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::TreeWiener;
    use crate::sde::Builtin;

    #[test]
    fn partial_derivatives() {
        let c = |k| PAdic::from_int(5, 6, k);
        let f = PolyF { coeffs: vec![vec![c(0), c(0), c(1)], vec![c(0), c(2)]] };
        let (t, x) = (c(3), c(4));
        assert!(f.eval(&t, &x).agrees_with(&c(16 + 24)));
        assert!(f.partial(0, 1, &t, &x).agrees_with(&c(8 + 6)));
        assert!(f.partial(1, 1, &t, &x).agrees_with(&c(2)));
        assert!(f.partial(0, 2, &t, &x).agrees_with(&c(2)));
    }

    #[test]
    fn linear_representation() {
        let d = BallSpec::unit_ball(3, 8, 3);
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(5);
        let a = Builtin::Linear { slope: PAdic::from_int(3, 8, 9), offset: PAdic::zero(3, 8) };
        let e = Builtin::Linear { slope: PAdic::from_int(3, 8, 18), offset: PAdic::zero(3, 8) };
        let pr = SdeProblem::new(d, PAdic::one(3, 8), a, e);
        let xs: Vec<_> = [1, 2, 7].iter().map(|&k| PAdic::from_int(3, 8, k)).collect();
        assert_eq!(representation_residual(&pr, &w, &xs).unwrap(), 0.0);
    }
}
