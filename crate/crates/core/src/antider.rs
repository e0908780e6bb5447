//! Antiderivation operators on the digit grid.
//!
//! All sums run over the prefix chain `t_j = sigma_j(t)` of a grid point.
//! Levels with a zero digit have `t_{j+1} = t_j`; their terms vanish
//! identically and are skipped. In `P_X Y` the increment of `X` stands to
//! the left of the integrand value.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::measure::WienerPath;
use crate::padic::{BallSpec, PAdic};

/// One nonzero step of a prefix chain.
#[derive(Debug, Clone)]
pub struct Step {
    pub level: u32,
    /// Index of `t_j`.
    pub lo: u64,
    /// Index of `t_{j+1}`.
    pub hi: u64,
    /// `t_{j+1} - t_j`.
    pub dt: PAdic,
}

/// The nonzero steps of the chain of grid index `t`, ascending in level.
pub fn steps(domain: &BallSpec, t: u64) -> Vec<Step> {
    (0..domain.levels())
        .filter(|&j| domain.digit(t, j) != 0)
        .map(|j| Step {
            level: j,
            lo: domain.sigma_index(t, j),
            hi: domain.sigma_index(t, j + 1),
            dt: domain.increment(t, j),
        })
        .collect()
}

fn zero(d: &BallSpec) -> PAdic {
    PAdic::zero(d.prime(), d.precision())
}

/// `P_u f |_t = sum_j f(t_j) (t_{j+1} - t_j)`.
pub fn antider_u(f: &GridFunction<PAdic>, t: u64) -> Result<PAdic> {
    let mut acc = zero(f.domain());
    for s in steps(f.domain(), t) {
        acc = &acc + &(f.get(s.lo)? * &s.dt);
    }
    Ok(acc)
}

/// `P_w E |_t = sum_j E(t_j) (w(t_{j+1}) - w(t_j))`.
pub fn antider_w(e: &GridFunction<PAdic>, w: &WienerPath, t: u64) -> Result<PAdic> {
    e.same_grid(&w.values)?;
    let mut acc = zero(e.domain());
    for s in steps(e.domain(), t) {
        let dw = w.at(s.hi)? - w.at(s.lo)?;
        acc = &acc + &(e.get(s.lo)? * &dw);
    }
    Ok(acc)
}

/// Integrands of the mixed operator.
pub struct MixedTerm<'a> {
    /// `d^{m+b} f / du^b dx^m` evaluated along the solution.
    pub fderiv: &'a GridFunction<PAdic>,
    pub a: Option<&'a GridFunction<PAdic>>,
    pub e: Option<&'a GridFunction<PAdic>>,
    pub b: u32,
    pub m: u32,
    pub l: u32,
}

/// `sum_j f'(t_j) (dt_j)^{b+m-l} a(t_j)^{m-l} (E(t_j) dw_j)^l`.
/// A missing `a` or `E` counts as the constant 1.
pub fn antider_mixed(term: &MixedTerm<'_>, w: &WienerPath, t: u64) -> Result<PAdic> {
    let MixedTerm { fderiv, a, e, b, m, l } = *term;
    if l > m {
        return Err(Error::Index { l, m });
    }
    fderiv.same_grid(&w.values)?;
    let d = fderiv.domain();
    let mut acc = zero(d);
    for s in steps(d, t) {
        let mut v = fderiv.get(s.lo)?.clone();
        if b + m - l > 0 {
            v = &v * &s.dt.pow(b + m - l);
        }
        if m > l {
            if let Some(a) = a {
                v = &v * &a.get(s.lo)?.pow(m - l);
            }
        }
        if l > 0 {
            let mut ed = w.at(s.hi)? - w.at(s.lo)?;
            if let Some(e) = e {
                ed = e.get(s.lo)? * &ed;
            }
            v = &v * &ed.pow(l);
        }
        acc = &acc + &v;
    }
    Ok(acc)
}

fn increments(x: &GridFunction<PAdic>, s: &Step) -> Result<PAdic> {
    Ok(x.get(s.hi)? - x.get(s.lo)?)
}

/// `P_(X,Y) 1 |_t = sum_j dX_j dY_j`.
pub fn covariation(x: &GridFunction<PAdic>, y: &GridFunction<PAdic>, t: u64) -> Result<PAdic> {
    x.same_grid(y)?;
    let mut acc = zero(x.domain());
    for s in steps(x.domain(), t) {
        acc = &acc + &(increments(x, &s)? * increments(y, &s)?);
    }
    Ok(acc)
}

/// `P_X Y |_t = sum_j dX_j Y(t_j)`.
pub fn antider_by(x: &GridFunction<PAdic>, y: &GridFunction<PAdic>, t: u64) -> Result<PAdic> {
    x.same_grid(y)?;
    let mut acc = zero(x.domain());
    for s in steps(x.domain(), t) {
        acc = &acc + &(increments(x, &s)? * y.get(s.lo)?.clone());
    }
    Ok(acc)
}

/// Residual `X_t Y_t - X_0 Y_0 - P_X Y - P_Y X - P_(X,Y) 1`.
pub fn by_parts_residual(x: &GridFunction<PAdic>, y: &GridFunction<PAdic>, t: u64) -> Result<PAdic> {
    let o = x.domain().sigma_index(t, 0);
    let lhs = x.get(t)? * y.get(t)? - x.get(o)? * y.get(o)?;
    Ok(lhs - antider_by(x, y, t)? - antider_by(y, x, t)? - covariation(x, y, t)?)
}

/// Norm of the by-parts residual; zero at working precision.
pub fn check_by_parts(x: &GridFunction<PAdic>, y: &GridFunction<PAdic>, t: u64) -> Result<f64> {
    let r = by_parts_residual(x, y, t)?;
    Ok(if r.is_zero() { 0.0 } else { r.norm() })
}

/// Parent in the chain recursion: `t` with its top digit cleared.
fn chain_parent(d: &BallSpec, t: u64) -> (u64, u32) {
    let j = (0..d.levels()).rev().find(|&j| d.digit(t, j) != 0).unwrap();
    (d.sigma_index(t, j), j)
}

/// `P_u f` at every grid point. Bit-identical to pointwise `antider_u`.
pub fn antider_u_all(f: &GridFunction<PAdic>) -> Result<GridFunction<PAdic>> {
    let d = f.domain().clone();
    let mut out = GridFunction::empty(d.clone());
    out.set(0, zero(&d));
    for t in 1..d.len() {
        let (par, j) = chain_parent(&d, t);
        let v = out.get(par)? + &(f.get(par)? * &d.increment(t, j));
        out.set(t, v);
    }
    Ok(out)
}

/// `P_w E` at every grid point. Bit-identical to pointwise `antider_w`.
pub fn antider_w_all(e: &GridFunction<PAdic>, w: &WienerPath) -> Result<GridFunction<PAdic>> {
    e.same_grid(&w.values)?;
    let d = e.domain().clone();
    let mut out = GridFunction::empty(d.clone());
    out.set(0, zero(&d));
    for t in 1..d.len() {
        let (par, _) = chain_parent(&d, t);
        let dw = w.at(t)? - w.at(par)?;
        let v = out.get(par)? + &(e.get(par)? * &dw);
        out.set(t, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::TreeWiener;
    use crate::padic::mahler;

    fn grid(p: u32, n: u32, depth: u32) -> BallSpec {
        BallSpec::unit_ball(p, n, depth)
    }

    #[test]
    fn constant_integrand_telescopes() {
        let d = grid(5, 4, 3);
        let one = GridFunction::constant(d.clone(), PAdic::one(5, 4));
        for t in [0u64, 1, 11, 124] {
            let v = antider_u(&one, t).unwrap();
            assert!(v.agrees_with(&d.point(t)));
        }
        assert!(antider_u(&one, 0).unwrap().is_exact_zero());
    }

    #[test]
    fn mahler_one_example() {
        let d = grid(5, 4, 4);
        let f = GridFunction::from_fn(d.clone(), |_, x| mahler(1, x).unwrap());
        let v = antider_u(&f, 11).unwrap();
        assert!(v.agrees_with(&PAdic::from_int(5, 4, 10)));
    }

    #[test]
    fn wiener_telescopes() {
        let d = grid(3, 6, 3);
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(3);
        let one = GridFunction::constant(d.clone(), PAdic::one(3, 6));
        let zero = GridFunction::constant(d.clone(), PAdic::zero(3, 6));
        for t in 0..d.len() {
            assert!(antider_w(&one, &w, t).unwrap().agrees_with(w.at(t).unwrap()));
            assert!(antider_w(&zero, &w, t).unwrap().is_zero());
        }
    }

    #[test]
    fn mixed_index_error() {
        let d = grid(3, 6, 2);
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(0);
        let f = GridFunction::constant(d, PAdic::one(3, 6));
        let term = MixedTerm { fderiv: &f, a: None, e: None, b: 0, m: 1, l: 2 };
        assert_eq!(antider_mixed(&term, &w, 1), Err(Error::Index { l: 2, m: 1 }));
    }

    #[test]
    fn full_grid_matches_pointwise() {
        let d = grid(3, 6, 3);
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(8);
        let f = GridFunction::from_fn(d.clone(), |_, x| x * x + PAdic::one(3, 6));
        let u = antider_u_all(&f).unwrap();
        let e = antider_w_all(&f, &w).unwrap();
        for t in 0..d.len() {
            assert_eq!(u.get(t).unwrap(), &antider_u(&f, t).unwrap());
            assert_eq!(e.get(t).unwrap(), &antider_w(&f, &w, t).unwrap());
        }
    }
}
