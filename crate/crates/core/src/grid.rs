//! Functions on the canonical digit grid of a ball.

use crate::error::{Error, Result};
use crate::padic::{BallSpec, PAdic};

/// Values of a function at the grid points of a ball. Entries may be absent
/// when only some prefix chains are needed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    domain: BallSpec,
    values: Vec<Option<T>>,
}

impl<T: Clone> GridFunction<T> {
    /// A function with no values yet.
    pub fn empty(domain: BallSpec) -> Self {
        let n = domain.len() as usize;
        GridFunction { domain, values: vec![None; n] }
    }

    pub fn from_fn(domain: BallSpec, mut f: impl FnMut(u64, &PAdic) -> T) -> Self {
        let values = (0..domain.len()).map(|i| Some(f(i, &domain.point(i)))).collect();
        GridFunction { domain, values }
    }

    /// Fill only the listed indices.
    pub fn from_fn_on(
        domain: BallSpec,
        indices: impl IntoIterator<Item = u64>,
        mut f: impl FnMut(u64, &PAdic) -> T,
    ) -> Self {
        let mut g = Self::empty(domain);
        for i in indices {
            let x = g.domain.point(i);
            g.values[i as usize] = Some(f(i, &x));
        }
        g
    }

    pub fn constant(domain: BallSpec, c: T) -> Self {
        let n = domain.len() as usize;
        GridFunction { domain, values: vec![Some(c); n] }
    }

    pub fn from_values(domain: BallSpec, values: Vec<T>) -> Result<Self> {
        if values.len() as u64 != domain.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                domain.len()
            )));
        }
        Ok(GridFunction { domain, values: values.into_iter().map(Some).collect() })
    }

    pub fn domain(&self) -> &BallSpec {
        &self.domain
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: u64) -> Result<&T> {
        self.values
            .get(i as usize)
            .and_then(|v| v.as_ref())
            .ok_or(Error::GridIncomplete(i))
    }

    pub fn try_get(&self, i: u64) -> Option<&T> {
        self.values.get(i as usize).and_then(|v| v.as_ref())
    }

    pub fn set(&mut self, i: u64, v: T) {
        self.values[i as usize] = Some(v);
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Indices that carry a value, ascending.
    pub fn defined_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.values.iter().enumerate().filter(|(_, v)| v.is_some()).map(|(i, _)| i as u64)
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(u64, &T) -> U) -> GridFunction<U> {
        GridFunction {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.as_ref().map(|x| f(i as u64, x)))
                .collect(),
        }
    }

    /// The part of `self` on the grid of child ball `d`.
    pub fn restrict_child(&self, d: u32) -> GridFunction<T> {
        let child = self.domain.child(d);
        let values = (0..child.len())
            .map(|i| self.values[self.domain.parent_index(d, i) as usize].clone())
            .collect();
        GridFunction { domain: child, values }
    }

    /// Copy the values of a child-ball function into `self`.
    pub fn fill_from_child(&mut self, d: u32, child: &GridFunction<T>) {
        for i in 0..child.len() {
            if let Some(v) = child.try_get(i) {
                self.values[self.domain.parent_index(d, i) as usize] = Some(v.clone());
            }
        }
    }

    pub fn same_grid<U>(&self, other: &GridFunction<U>) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.domain, other.domain)))
        }
    }
}

/// The prefix chain `sigma_0(t), ..., sigma_L(t) = t` of grid index `i`.
pub fn chain_indices(domain: &BallSpec, i: u64) -> Vec<u64> {
    (0..=domain.levels()).map(|j| domain.sigma_index(i, j)).collect()
}

/// Union of the prefix chains of several indices, ascending and deduplicated.
pub fn chain_closure(domain: &BallSpec, points: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = points.iter().flat_map(|&i| chain_indices(domain, i)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains() {
        let d = BallSpec::unit_ball(5, 4, 3);
        assert_eq!(chain_indices(&d, 11), vec![0, 1, 11, 11]);
        let g = GridFunction::from_fn_on(d.clone(), chain_indices(&d, 11), |i, _| i);
        assert_eq!(g.get(11), Ok(&11));
        assert_eq!(g.get(12), Err(Error::GridIncomplete(12)));
        assert!(!g.is_complete());
    }

    #[test]
    fn mismatch() {
        assert!(GridFunction::from_values(BallSpec::unit_ball(2, 4, 2), vec![0; 3]).is_err());
        let a = GridFunction::constant(BallSpec::unit_ball(2, 4, 2), 1);
        let b = GridFunction::constant(BallSpec::unit_ball(3, 4, 2), 1);
        assert!(a.same_grid(&b).is_err());
    }
}
