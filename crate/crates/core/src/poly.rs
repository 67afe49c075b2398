//! Exact multivariate polynomials over ℚ and ℚ(i).
//!
//! Coefficients are arbitrary-precision rationals so that symbolic
//! derivatives and realification are exact; every polynomial can be
//! compiled into a floating-point evaluator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Exponents = Vec<u32>;
pub type ComplexRational = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn complex_rational(re: BigRational, im: BigRational) -> ComplexRational {
    Complex::new(re, im)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in `nvars` real variables with rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_j` (zero-based).
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Exponents, c: BigRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·x^e` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, exponents: Exponents, c: BigRational) {
        assert_eq!(exponents.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(exponents)
            .or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Exact partial derivative with respect to `x_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j] -= 1;
            out.add_term(d, c * BigRational::from_integer(BigInt::from(e[j])));
        }
        out
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (to_f64(c), e.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compile().eval(x)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    write!(f, " ")?;
                }
            }
            let mag = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, k)
                    }
                })
                .collect();
            if vars.is_empty() || !mag.is_one() {
                write!(f, "{mag}")?;
                if !vars.is_empty() {
                    write!(f, "*")?;
                }
            }
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

/// Floating-point evaluator for a [`Poly`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Exponents)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut m = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m *= xi.powi(k as i32);
                }
            }
            acc += m;
        }
        acc
    }
}

/// Polynomial in `nvars` complex variables with complex-rational
/// coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, ComplexRational>,
}

impl ComplexPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], Complex::new(BigRational::one(), BigRational::zero()))
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, Complex::new(BigRational::one(), BigRational::zero()))
    }

    pub fn monomial(exponents: Exponents, c: ComplexRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// `Σ_j coeffs[j]·z_j`.
    pub fn linear(coeffs: &[ComplexRational]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; coeffs.len()];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exponents: Exponents, c: ComplexRational) {
        assert_eq!(exponents.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert_with(Complex::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn constant_term(&self) -> ComplexRational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Complex::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    pub fn eval(&self, z: &[Complex<f64>]) -> Complex<f64> {
        debug_assert_eq!(z.len(), self.nvars);
        let mut acc = Complex::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex::new(to_f64(&c.re), to_f64(&c.im));
            for (zi, &k) in z.iter().zip(e) {
                if k > 0 {
                    m *= zi.powu(k);
                }
            }
            acc += m;
        }
        acc
    }

    /// Expands into `(Re, Im)` as real polynomials in `2·nvars` variables
    /// under `z_k = x_{2k-1} + i·x_{2k}`.
    pub fn realify(&self) -> (Poly, Poly) {
        let n = 2 * self.nvars;
        // (re, im) pairs for each complex coordinate
        let coords: Vec<(Poly, Poly)> = (0..self.nvars)
            .map(|k| (Poly::var(n, 2 * k), Poly::var(n, 2 * k + 1)))
            .collect();
        let cmul = |a: &(Poly, Poly), b: &(Poly, Poly)| {
            (
                a.0.mul(&b.0).sub(&a.1.mul(&b.1)),
                a.0.mul(&b.1).add(&a.1.mul(&b.0)),
            )
        };
        let mut re = Poly::zero(n);
        let mut im = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut acc = (
                Poly::constant(n, c.re.clone()),
                Poly::constant(n, c.im.clone()),
            );
            for (k, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    acc = cmul(&acc, &coords[k]);
                }
            }
            re = re.add(&acc.0);
            im = im.add(&acc.1);
        }
        (re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_is_exact() {
        // 3 x1^2 x2 - x2^3/2
        let mut p = Poly::zero(2);
        p.add_term(vec![2, 1], rational(3, 1));
        p.add_term(vec![0, 3], rational(-1, 2));
        let dx = p.derivative(0);
        let dy = p.derivative(1);
        assert_eq!(dx, Poly::monomial(vec![1, 1], rational(6, 1)));
        let mut want = Poly::zero(2);
        want.add_term(vec![2, 0], rational(3, 1));
        want.add_term(vec![0, 2], rational(-3, 2));
        assert_eq!(dy, want);
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Poly::var(2, 0);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn realify_square() {
        let z = ComplexPoly::var(1, 0);
        let (re, im) = z.mul(&z).realify();
        let mut want_re = Poly::zero(2);
        want_re.add_term(vec![2, 0], rational(1, 1));
        want_re.add_term(vec![0, 2], rational(-1, 1));
        assert_eq!(re, want_re);
        assert_eq!(im, Poly::monomial(vec![1, 1], rational(2, 1)));
    }

    #[test]
    fn complex_coefficient_realifies() {
        // i·z  ->  (-y, x)
        let p = ComplexPoly::monomial(vec![1], complex_rational(rational(0, 1), rational(1, 1)));
        let (re, im) = p.realify();
        assert_eq!(re, Poly::monomial(vec![0, 1], rational(-1, 1)));
        assert_eq!(im, Poly::var(2, 0));
    }

    #[test]
    fn display_is_readable() {
        let mut p = Poly::zero(2);
        p.add_term(vec![2, 0], rational(1, 1));
        p.add_term(vec![0, 1], rational(-3, 2));
        assert_eq!(p.to_string(), "x1^2 - 3/2*x2");
    }
}
