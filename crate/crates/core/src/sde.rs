//! Picard solvers for stochastic antiderivational equations
//! `xi = xi_0 + P_u a(u, xi) + P_w E(u, xi)` and their finite series
//! generalization, with moment and stability diagnostics.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::antider::{antider_mixed, antider_u_all, antider_w_all, MixedTerm};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::measure::{derive_seed, WienerPath, WienerSampler};
use crate::padic::{BallSpec, PAdic};

/// What a coefficient program sees at one grid point.
pub struct Ctx<'a> {
    pub index: u64,
    pub t: &'a PAdic,
    pub x: &'a PAdic,
    /// The whole current iterate on the ball being solved.
    pub iterate: &'a GridFunction<PAdic>,
}

/// A deterministic coefficient `(t, xi) -> K`.
pub trait Coefficient: Send + Sync + fmt::Debug {
    fn eval(&self, ctx: &Ctx<'_>) -> PAdic;
}

/// The built-in coefficient programs.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Constant(PAdic),
    /// `slope * x + offset`.
    Linear { slope: PAdic, offset: PAdic },
    /// `sum_k c_k x^k`.
    Polynomial(Vec<PAdic>),
    /// Constant on each sub-ball of radius `p^(radius_exp - depth)` of the
    /// ball `|t - center| <= p^radius_exp`; `values` is indexed by the first
    /// `depth` digits of `(t - center) p^radius_exp`.
    ByBall { center: PAdic, radius_exp: i64, depth: u32, values: Vec<PAdic> },
}

impl Coefficient for Builtin {
    fn eval(&self, c: &Ctx<'_>) -> PAdic {
        match self {
            Builtin::Constant(v) => v.clone(),
            Builtin::Linear { slope, offset } => slope * c.x + offset.clone(),
            Builtin::Polynomial(cs) => {
                let mut acc = PAdic::zero(c.x.prime(), c.x.precision());
                for k in cs.iter().rev() {
                    acc = &(&acc * c.x) + k;
                }
                acc
            }
            Builtin::ByBall { center, radius_exp, depth, values } => {
                let d = (c.t - center).shift(*radius_exp);
                let p = c.t.prime() as usize;
                let mut k = 0usize;
                for e in (0..*depth as i64).rev() {
                    k = k * p + d.digit_at_exponent(e) as usize;
                }
                values[k % values.len()].clone()
            }
        }
    }
}

/// One term `(b, m, l, a_{m-l+b,l})` of a series equation. The integrand is
/// `coef(u, xi) a(u, xi)^{m-l} E(u, xi)^l` integrated against
/// `du^{b+m-l} dw^l`.
#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub b: u32,
    pub m: u32,
    pub l: u32,
    pub coef: Arc<dyn Coefficient>,
}

/// Right-hand side of the equation.
#[derive(Debug, Clone)]
pub enum Equation {
    /// `P_u a + P_w E`.
    Standard,
    /// A finite family of series terms.
    Series(Vec<SeriesTerm>),
}

#[derive(Debug, Clone)]
pub struct SdeProblem {
    pub domain: BallSpec,
    pub xi0: PAdic,
    pub drift: Arc<dyn Coefficient>,
    pub diffusion: Arc<dyn Coefficient>,
    pub equation: Equation,
}

impl SdeProblem {
    pub fn new(domain: BallSpec, xi0: PAdic, drift: Builtin, diffusion: Builtin) -> Self {
        SdeProblem {
            domain,
            xi0,
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            equation: Equation::Standard,
        }
    }

    pub fn with_series(mut self, terms: Vec<SeriesTerm>) -> Self {
        self.equation = Equation::Series(terms);
        self
    }

    fn restricted(&self, d: u32, xi0: PAdic) -> SdeProblem {
        SdeProblem { domain: self.domain.child(d), xi0, ..self.clone() }
    }
}

fn coef_grid(c: &dyn Coefficient, x: &GridFunction<PAdic>) -> GridFunction<PAdic> {
    let d = x.domain();
    x.map(|i, v| c.eval(&Ctx { index: i, t: &d.point(i), x: v, iterate: x }))
}

/// Apply the right-hand side to an iterate.
pub fn apply_rhs(problem: &SdeProblem, w: &WienerPath, x: &GridFunction<PAdic>) -> Result<GridFunction<PAdic>> {
    let d = &problem.domain;
    match &problem.equation {
        Equation::Standard => {
            let u = antider_u_all(&coef_grid(problem.drift.as_ref(), x))?;
            let e = antider_w_all(&coef_grid(problem.diffusion.as_ref(), x), w)?;
            Ok(GridFunction::from_fn(d.clone(), |i, _| {
                problem.xi0.clone() + u.get(i).unwrap().clone() + e.get(i).unwrap().clone()
            }))
        }
        Equation::Series(terms) => {
            let a = coef_grid(problem.drift.as_ref(), x);
            let e = coef_grid(problem.diffusion.as_ref(), x);
            let coefs: Vec<_> = terms.iter().map(|t| coef_grid(t.coef.as_ref(), x)).collect();
            let vals = (0..d.len())
                .into_par_iter()
                .map(|i| {
                    let mut acc = problem.xi0.clone();
                    for (t, c) in terms.iter().zip(&coefs) {
                        let term = MixedTerm { fderiv: c, a: Some(&a), e: Some(&e), b: t.b, m: t.m, l: t.l };
                        acc = acc + antider_mixed(&term, w, i)?;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            GridFunction::from_values(d.clone(), vals)
        }
    }
}

/// `max_t |x(t) - y(t)|`, zero when all values agree at precision.
pub fn sup_distance(x: &GridFunction<PAdic>, y: &GridFunction<PAdic>) -> f64 {
    x.defined_indices()
        .map(|i| {
            let d = x.get(i).unwrap() - y.get(i).unwrap();
            if d.is_zero() {
                0.0
            } else {
                d.norm()
            }
        })
        .fold(0.0, f64::max)
}

/// Convergence record of one ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallReport {
    pub center: String,
    pub radius_exp: i64,
    pub iterations: u32,
    pub defect_trace: Vec<f64>,
    /// Largest ratio `d_{n+1} / d_n` along the trace.
    pub contraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeSolution {
    pub xi: GridFunction<PAdic>,
    /// Solved balls in patching order.
    pub balls: Vec<BallReport>,
    /// `max_t |xi - rhs(xi)|`.
    pub residual: f64,
}

impl SdeSolution {
    pub fn iterations(&self) -> u32 {
        self.balls.iter().map(|b| b.iterations).sum()
    }

    pub fn contraction(&self) -> f64 {
        self.balls.iter().map(|b| b.contraction).fold(0.0, f64::max)
    }

    pub fn defect_trace(&self) -> Vec<f64> {
        self.balls.first().map(|b| b.defect_trace.clone()).unwrap_or_default()
    }
}

fn restrict_path(w: &WienerPath, d: u32) -> WienerPath {
    WienerPath { values: w.values.restrict_child(d), tag: w.tag, seed: w.seed }
}

/// Picard iteration on the whole ball without subdivision. Fails with
/// `NoContraction` as soon as the defect does not strictly decrease.
pub fn picard_on_ball(
    problem: &SdeProblem,
    w: &WienerPath,
    start: Option<&GridFunction<PAdic>>,
    max_iter: u32,
) -> Result<(GridFunction<PAdic>, BallReport)> {
    let d = &problem.domain;
    let mut x = match start {
        Some(s) => {
            s.same_grid(&w.values)?;
            s.clone()
        }
        None => GridFunction::constant(d.clone(), problem.xi0.clone()),
    };
    let mut trace = Vec::new();
    let mut contraction: f64 = 0.0;
    for it in 1..=max_iter {
        let next = apply_rhs(problem, w, &x)?;
        let defect = sup_distance(&next, &x);
        if let Some(&prev) = trace.last() {
            if defect >= prev {
                return Err(Error::NoContraction(format!(
                    "center {} radius p^{} (defect {prev} -> {defect})",
                    d.center, d.radius_exp
                )));
            }
            contraction = contraction.max(defect / prev);
        }
        trace.push(defect);
        x = next;
        if defect == 0.0 {
            let report = BallReport {
                center: d.center.to_string(),
                radius_exp: d.radius_exp,
                iterations: it,
                defect_trace: trace,
                contraction,
            };
            return Ok((x, report));
        }
    }
    Err(Error::NoContraction(format!(
        "center {} radius p^{}: no fixed point after {max_iter} iterations",
        d.center, d.radius_exp
    )))
}

fn solve_rec(
    problem: &SdeProblem,
    w: &WienerPath,
    start: Option<&GridFunction<PAdic>>,
    max_iter: u32,
    reports: &mut Vec<BallReport>,
) -> Result<GridFunction<PAdic>> {
    let d = &problem.domain;
    if d.levels() == 0 {
        reports.push(BallReport {
            center: d.center.to_string(),
            radius_exp: d.radius_exp,
            iterations: 0,
            defect_trace: vec![],
            contraction: 0.0,
        });
        return Ok(GridFunction::constant(d.clone(), problem.xi0.clone()));
    }
    match picard_on_ball(problem, w, start, max_iter) {
        Ok((x, r)) => {
            reports.push(r);
            Ok(x)
        }
        Err(Error::NoContraction(_)) => {
            // Value of the equation at each child center, with xi = xi_0 at
            // the parent center.
            let flat = GridFunction::constant(d.clone(), problem.xi0.clone());
            let init = apply_rhs(problem, w, &flat)?;
            let mut out = GridFunction::empty(d.clone());
            for k in 0..d.prime() {
                let child = problem.restricted(k, init.get(k as u64)?.clone());
                let cw = restrict_path(w, k);
                let cs = start.map(|s| s.restrict_child(k));
                let sol = solve_rec(&child, &cw, cs.as_ref(), max_iter, reports)?;
                out.fill_from_child(k, &sol);
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

fn check_decay(problem: &SdeProblem) -> Result<()> {
    let Equation::Series(terms) = &problem.equation else {
        return Ok(());
    };
    let flat = GridFunction::constant(problem.domain.clone(), problem.xi0.clone());
    let mut by_order: Vec<(u32, f64)> = Vec::new();
    for t in terms {
        if t.l > t.m {
            return Err(Error::Index { l: t.l, m: t.m });
        }
        let g = coef_grid(t.coef.as_ref(), &flat);
        let sup = g.defined_indices().map(|i| g.get(i).unwrap().norm()).fold(0.0, f64::max);
        let order = t.m + t.b;
        if order == 0 {
            return Err(Error::Decay("series terms need m + b >= 1".into()));
        }
        match by_order.iter_mut().find(|(o, _)| *o == order) {
            Some(e) => e.1 = e.1.max(sup),
            None => by_order.push((order, sup)),
        }
    }
    by_order.sort_by_key(|e| e.0);
    if by_order.windows(2).any(|w| w[1].1 > w[0].1) {
        return Err(Error::Decay(format!("sup norms by order are not decreasing: {by_order:?}")));
    }
    Ok(())
}

/// Solve by Picard iteration, subdividing balls where the iteration does
/// not contract. `start` replaces the initial iterate `X_0 = xi_0`.
pub fn solve_from(
    problem: &SdeProblem,
    w: &WienerPath,
    start: Option<&GridFunction<PAdic>>,
) -> Result<SdeSolution> {
    if problem.domain != *w.domain() {
        return Err(Error::GridMismatch("path and problem live on different grids".into()));
    }
    check_decay(problem)?;
    let max_iter = problem.domain.precision() * problem.domain.prime();
    let mut balls = Vec::new();
    let xi = solve_rec(problem, w, start, max_iter, &mut balls)?;
    let residual = sup_distance(&xi, &apply_rhs(problem, w, &xi)?);
    Ok(SdeSolution { xi, balls, residual })
}

/// `xi = xi_0 + P_u a(u, xi) + P_w E(u, xi)`.
pub fn solve_picard(problem: &SdeProblem, w: &WienerPath) -> Result<SdeSolution> {
    let mut p = problem.clone();
    p.equation = Equation::Standard;
    solve_from(&p, w, None)
}

/// Series equation with the problem's term family.
pub fn solve_general(problem: &SdeProblem, w: &WienerPath) -> Result<SdeSolution> {
    if !matches!(problem.equation, Equation::Series(_)) {
        return Err(Error::Parameters("no series terms given".into()));
    }
    solve_from(problem, w, None)
}

/// Solve on `count` paths drawn from `sampler`; path `i` uses seed
/// `derive_seed(master, i)`.
pub fn solve_ensemble(
    problem: &SdeProblem,
    sampler: &WienerSampler,
    master: u64,
    count: u64,
) -> Result<Vec<SdeSolution>> {
    (0..count)
        .into_par_iter()
        .map(|i| solve_from(problem, &sampler.sample(derive_seed(master, i)), None))
        .collect()
}

/// Largest observed `|f(x) - f(y)| / |x - y|` over pairs of sample states at
/// each grid point. Used to spot-check a declared Lipschitz constant.
pub fn lipschitz_estimate(c: &dyn Coefficient, domain: &BallSpec, states: &[PAdic]) -> f64 {
    let dummy = GridFunction::constant(domain.clone(), states[0].clone());
    let mut best: f64 = 0.0;
    for i in 0..domain.len() {
        let t = domain.point(i);
        let f = |x: &PAdic| c.eval(&Ctx { index: i, t: &t, x, iterate: &dummy });
        for (k, x) in states.iter().enumerate() {
            for y in &states[k + 1..] {
                let dx = x - y;
                if dx.is_zero() {
                    continue;
                }
                let df = f(x) - f(y);
                if !df.is_zero() {
                    best = best.max(df.norm() / dx.norm());
                }
            }
        }
    }
    best
}

/// One radius level of a moment or stability report.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheck {
    /// `|t - t_0|`.
    pub radius: f64,
    pub value: f64,
    pub bound: f64,
    /// Monte Carlo allowance added to the bound.
    pub allowance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub s: u32,
    pub c1: f64,
    pub c2: f64,
    pub levels: Vec<LevelCheck>,
    /// Every pointwise quantity was exactly zero.
    pub identically_zero: bool,
}

impl DiagnosticReport {
    pub fn pass(&self) -> bool {
        self.levels.iter().all(|l| l.pass)
    }
}

/// Radius `|t - t_0|` of each grid index; `0` at the center.
fn radius_of(d: &BallSpec, i: u64) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let j = (0..d.levels()).find(|&j| d.digit(i, j) != 0).unwrap();
    (d.prime() as f64).powi((d.radius_exp - j as i64) as i32)
}

fn level_report(
    d: &BallSpec,
    norms: &[Vec<f64>],
    s: u32,
    c1: f64,
    c2: f64,
    sigmas: f64,
) -> DiagnosticReport {
    let count = norms.len() as f64;
    let n_pts = d.len() as usize;
    let mut mean = vec![0.0; n_pts];
    let mut sq = vec![0.0; n_pts];
    let mut zero = true;
    for path in norms {
        for (i, v) in path.iter().enumerate() {
            let x = v.powi(s as i32);
            zero &= *v == 0.0;
            mean[i] += x / count;
            sq[i] += x * x / count;
        }
    }
    let se: Vec<f64> = (0..n_pts)
        .map(|i| ((sq[i] - mean[i] * mean[i]).max(0.0) / count).sqrt())
        .collect();
    let mut radii: Vec<f64> = (0..d.len()).map(|i| radius_of(d, i)).collect();
    let base = mean[0];
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let levels = radii
        .into_iter()
        .filter(|&r| r > 0.0)
        .map(|r| {
            let (mut value, mut allowance) = (0.0f64, 0.0f64);
            for i in 0..n_pts {
                if radius_of(d, i as u64) <= r && mean[i] >= value {
                    value = mean[i];
                    allowance = sigmas * se[i];
                }
            }
            let bound = base.max(r * (c1 + c2 * value));
            LevelCheck { radius: r, value, bound, allowance, pass: value <= bound + allowance }
        })
        .collect();
    DiagnosticReport { s, c1, c2, levels, identically_zero: zero }
}

fn norms_of(x: &GridFunction<PAdic>) -> Vec<f64> {
    x.defined_indices()
        .map(|i| {
            let v = x.get(i).unwrap();
            if v.is_zero() {
                0.0
            } else {
                v.norm()
            }
        })
        .collect()
}

/// Empirical `q(t) = sup_{|u - t_0| <= |t - t_0|} M ||xi(u)||^s` against
/// `max(M ||xi_0||^s, |t - t_0| (C_1 + C_2 q(t)))` per radius level. The
/// bound is relaxed by `sigmas` standard errors of the ensemble mean.
pub fn moment_diagnostic(solutions: &[SdeSolution], s: u32, c1: f64, c2: f64, sigmas: f64) -> DiagnosticReport {
    let d = solutions[0].xi.domain();
    let norms: Vec<_> = solutions.iter().map(|x| norms_of(&x.xi)).collect();
    level_report(d, &norms, s, c1, c2, sigmas)
}

/// Empirical `y(t) = sup M ||xi_1(u) - xi_2(u)||^s` for coupled solutions
/// against `max(M ||xi_{1,0} - xi_{2,0}||^s, |t - t_0| (C_1 + C_2 y(t)))`.
pub fn stability_diagnostic(
    first: &[SdeSolution],
    second: &[SdeSolution],
    s: u32,
    c1: f64,
    c2: f64,
    sigmas: f64,
) -> Result<DiagnosticReport> {
    if first.len() != second.len() {
        return Err(Error::Parameters("ensembles differ in size".into()));
    }
    let d = first[0].xi.domain();
    let mut norms = Vec::with_capacity(first.len());
    let mut identical = true;
    for (a, b) in first.iter().zip(second) {
        a.xi.same_grid(&b.xi)?;
        identical &= a.xi == b.xi;
        let diff = GridFunction::from_fn(d.clone(), |i, _| a.xi.get(i).unwrap() - b.xi.get(i).unwrap());
        norms.push(norms_of(&diff));
    }
    let mut r = level_report(d, &norms, s, c1, c2, sigmas);
    r.identically_zero &= identical;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::TreeWiener;

    fn setup(p: u32, n: u32, depth: u32) -> (BallSpec, WienerPath) {
        let d = BallSpec::unit_ball(p, n, depth);
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(11);
        (d, w)
    }

    fn c(p: u32, n: u32, k: i128) -> PAdic {
        PAdic::from_int(p, n, k)
    }

    #[test]
    fn zero_coefficients() {
        let (d, w) = setup(3, 6, 3);
        let pr = SdeProblem::new(d, c(3, 6, 4), Builtin::Constant(PAdic::zero(3, 6)), Builtin::Constant(PAdic::zero(3, 6)));
        let s = solve_picard(&pr, &w).unwrap();
        assert_eq!(s.iterations(), 1);
        assert!(s.xi.defined_indices().all(|i| s.xi.get(i).unwrap().agrees_with(&c(3, 6, 4))));
    }

    #[test]
    fn drift_one_gives_shift_by_t() {
        let (d, w) = setup(3, 6, 3);
        let pr = SdeProblem::new(d.clone(), c(3, 6, 4), Builtin::Constant(c(3, 6, 1)), Builtin::Constant(PAdic::zero(3, 6)));
        let s = solve_picard(&pr, &w).unwrap();
        assert_eq!(s.residual, 0.0);
        for i in 0..d.len() {
            assert!(s.xi.get(i).unwrap().agrees_with(&(c(3, 6, 4) + d.point(i))));
        }
    }

    #[test]
    fn diffusion_one_gives_path() {
        let (d, w) = setup(3, 6, 3);
        let pr = SdeProblem::new(d.clone(), c(3, 6, 4), Builtin::Constant(PAdic::zero(3, 6)), Builtin::Constant(c(3, 6, 1)));
        let s = solve_picard(&pr, &w).unwrap();
        for i in 0..d.len() {
            assert!(s.xi.get(i).unwrap().agrees_with(&(c(3, 6, 4) + w.at(i).unwrap().clone())));
        }
    }

    #[test]
    fn large_slope_needs_subdivision() {
        let (d, w) = setup(3, 6, 3);
        let slope = PAdic::from_rational(3, 6, 1, 9).unwrap();
        let lin = Builtin::Linear { slope, offset: PAdic::zero(3, 6) };
        let pr = SdeProblem::new(d, c(3, 6, 1), lin, Builtin::Constant(PAdic::zero(3, 6)));
        assert!(matches!(picard_on_ball(&pr, &w, None, 18), Err(Error::NoContraction(_))));
        let s = solve_picard(&pr, &w).unwrap();
        assert_eq!(s.residual, 0.0);
        assert!(s.balls.len() > 1);
        assert!(s.contraction() < 1.0);
    }

    #[test]
    fn by_ball_coefficient() {
        let b = Builtin::ByBall {
            center: PAdic::zero(5, 4),
            radius_exp: 0,
            depth: 1,
            values: (0..5).map(|k| c(5, 4, k)).collect(),
        };
        let g = GridFunction::constant(BallSpec::unit_ball(5, 4, 1), c(5, 4, 0));
        let t = c(5, 4, 13);
        let v = b.eval(&Ctx { index: 0, t: &t, x: &t, iterate: &g });
        assert!(v.agrees_with(&c(5, 4, 3)));
    }
}
