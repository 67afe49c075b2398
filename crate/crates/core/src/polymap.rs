//! Polynomial map germs `f: (ℝⁿ,0) → (ℝᵖ,0)` with exact symbolic Jacobians.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::poly::{CompiledPoly, ComplexPoly, Poly};

/// A polynomial map germ with `n > p ≥ 2` and `f(0) = 0`.
#[derive(Clone, Debug)]
pub struct PolyMap {
    n: usize,
    components: Vec<Poly>,
    partials: Vec<Vec<Poly>>,
    compiled: Vec<CompiledPoly>,
    compiled_partials: Vec<Vec<CompiledPoly>>,
}

impl PolyMap {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let p = components.len();
        let n = components
            .first()
            .map(Poly::nvars)
            .ok_or_else(|| Error::InvalidGerm("no components".into()))?;
        if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.nvars(),
            });
        }
        if p < 2 || n <= p {
            return Err(Error::InvalidGerm(format!(
                "need n > p >= 2, got n = {n}, p = {p}"
            )));
        }
        if components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        let partials: Vec<Vec<Poly>> = components
            .iter()
            .map(|c| (0..n).map(|j| c.derivative(j)).collect())
            .collect();
        let compiled = components.iter().map(Poly::compile).collect();
        let compiled_partials = partials
            .iter()
            .map(|row| row.iter().map(Poly::compile).collect())
            .collect();
        Ok(Self {
            n,
            components,
            partials,
            compiled,
            compiled_partials,
        })
    }

    /// Realification of a single complex polynomial in `m` variables:
    /// the map `ℝ^{2m} → ℝ²`, `x ↦ (Re f, Im f)` with `z_k = x_{2k-1} + i·x_{2k}`.
    pub fn realify(f: &ComplexPoly) -> Result<Self> {
        if !f.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let (re, im) = f.realify();
        Self::new(vec![re, im])
    }

    /// Domain dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Codomain dimension.
    pub fn p(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn partial(&self, i: usize, j: usize) -> &Poly {
        &self.partials[i][j]
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_raw(x))
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.n, x.len())?;
        Ok(self.jacobian_raw(x))
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> Vec<f64> {
        self.compiled.iter().map(|c| c.eval(x)).collect()
    }

    pub(crate) fn jacobian_raw(&self, x: &[f64]) -> DMatrix<f64> {
        let p = self.p();
        DMatrix::from_fn(p, self.n, |i, j| self.compiled_partials[i][j].eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    fn projection() -> PolyMap {
        PolyMap::new(vec![Poly::var(3, 0), Poly::var(3, 1)]).unwrap()
    }

    #[test]
    fn projection_eval_and_jacobian() {
        let f = projection();
        assert_eq!(f.eval(&[0.3, -0.1, 7.0]).unwrap(), vec![0.3, -0.1]);
        let j = f.jacobian(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(j.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        assert_eq!(j.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = projection();
        assert!(matches!(
            f.eval(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(f.jacobian(&[1.0; 4]).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        // n = p
        assert!(PolyMap::new(vec![Poly::var(2, 0), Poly::var(2, 1)]).is_err());
        // p = 1
        assert!(PolyMap::new(vec![Poly::var(3, 0)]).is_err());
        // f(0) != 0
        let shifted = Poly::var(3, 0).add(&Poly::constant(3, rational(1, 1)));
        assert!(matches!(
            PolyMap::new(vec![shifted, Poly::var(3, 1)]),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn realified_square_jacobian_is_cauchy_riemann() {
        // z^2 on C^1 is n = p = 2, so embed as z^2 + 0*w on C^2
        let z = ComplexPoly::var(2, 0);
        let f = PolyMap::realify(&z.mul(&z)).unwrap();
        let (x, y) = (0.7, -0.4);
        let j = f.jacobian(&[x, y, 0.1, 0.2]).unwrap();
        assert_eq!(j[(0, 0)], 2.0 * x);
        assert_eq!(j[(0, 1)], -2.0 * y);
        assert_eq!(j[(1, 0)], 2.0 * y);
        assert_eq!(j[(1, 1)], 2.0 * x);
    }

    #[test]
    fn realify_rejects_constant_term() {
        let f = ComplexPoly::var(2, 0).add(&ComplexPoly::one(2));
        assert!(matches!(PolyMap::realify(&f), Err(Error::NonzeroConstantTerm)));
    }
}
