//! Central hyperplane arrangements in ℂ^{d+1} and their defining polynomial.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{ComplexPoly, ComplexRational};
use crate::polymap::PolyMap;

/// A central arrangement given by one linear form per hyperplane.
#[derive(Clone, Debug)]
pub struct Arrangement {
    forms: Vec<Vec<ComplexRational>>,
}

impl Arrangement {
    pub fn new(forms: Vec<Vec<ComplexRational>>) -> Result<Self> {
        let dim = forms
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArrangement("no hyperplanes".into()))?;
        if dim == 0 {
            return Err(Error::InvalidArrangement("ambient dimension 0".into()));
        }
        for (i, f) in forms.iter().enumerate() {
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
            if f.iter().all(Zero::is_zero) {
                return Err(Error::InvalidArrangement(format!("form {i} is zero")));
            }
        }
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                if proportional(&forms[i], &forms[j]) {
                    return Err(Error::ProportionalForms(i, j));
                }
            }
        }
        Ok(Self { forms })
    }

    /// `d` such that the arrangement lives in ℂ^{d+1}.
    pub fn d(&self) -> usize {
        self.forms[0].len() - 1
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[Vec<ComplexRational>] {
        &self.forms
    }

    /// The defining polynomial `Q = ∏ L_H`.
    pub fn defining_polynomial(&self) -> DefiningPolynomial {
        let nvars = self.d() + 1;
        let q = self
            .forms
            .iter()
            .fold(ComplexPoly::one(nvars), |acc, f| acc.mul(&ComplexPoly::linear(f)));
        DefiningPolynomial {
            degree: self.len() as u32,
            poly: q,
        }
    }
}

/// `Q(𝒜)` together with its degree `|𝒜|`.
#[derive(Clone, Debug)]
pub struct DefiningPolynomial {
    pub poly: ComplexPoly,
    pub degree: u32,
}

impl DefiningPolynomial {
    /// Realified map `ℝ^{2(d+1)} → ℝ²`; fails for `d = 0`, where `n = p`.
    pub fn realified(&self) -> Result<PolyMap> {
        PolyMap::realify(&self.poly)
    }
}

/// Exact test of `a ∥ b` via vanishing 2×2 minors.
fn proportional(a: &[ComplexRational], b: &[ComplexRational]) -> bool {
    (0..a.len()).all(|i| {
        (0..a.len()).all(|j| (a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()).is_zero())
    })
}
