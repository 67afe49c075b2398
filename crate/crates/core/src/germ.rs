//! Germ specifications: a polynomial map plus tube radii, and the
//! built-in catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::poly::{complex_rational, rational, ComplexPoly, ComplexRational, Poly};
use crate::polymap::PolyMap;

pub const DEFAULT_DELTA: f64 = 1e-2;
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Provenance of a germ, which fixes its topological-complexity class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermKind {
    ComplexHolomorphic,
    RealIsolatedSingularity,
    Arrangement,
    TrivialProjection,
}

impl GermKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ComplexHolomorphic => "complex-holomorphic",
            Self::RealIsolatedSingularity => "real-isolated-singularity",
            Self::Arrangement => "arrangement",
            Self::TrivialProjection => "trivial-projection",
        }
    }
}

impl fmt::Display for GermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GermKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex-holomorphic" => Ok(Self::ComplexHolomorphic),
            "real-isolated-singularity" => Ok(Self::RealIsolatedSingularity),
            "arrangement" => Ok(Self::Arrangement),
            "trivial-projection" => Ok(Self::TrivialProjection),
            other => Err(Error::InvalidGerm(format!("unknown kind `{other}`"))),
        }
    }
}

/// A map germ together with the tube radii `0 < δ < ε`.
#[derive(Clone, Debug)]
pub struct GermSpec {
    pub name: String,
    pub map: PolyMap,
    pub delta: f64,
    pub epsilon: f64,
    pub kind: GermKind,
}

impl GermSpec {
    pub fn new(
        name: impl Into<String>,
        map: PolyMap,
        delta: f64,
        epsilon: f64,
        kind: GermKind,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < epsilon && epsilon.is_finite()) {
            return Err(Error::InvalidGerm(format!(
                "radii must satisfy 0 < delta < epsilon, got delta = {delta}, epsilon = {epsilon}"
            )));
        }
        if matches!(kind, GermKind::ComplexHolomorphic | GermKind::Arrangement) && map.p() != 2 {
            return Err(Error::InvalidGerm(format!("kind {kind} requires p = 2")));
        }
        Ok(Self {
            name: name.into(),
            map,
            delta,
            epsilon,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    pub fn p(&self) -> usize {
        self.map.p()
    }

    /// Same germ with different radii.
    pub fn with_radii(&self, delta: f64, epsilon: f64) -> Result<Self> {
        Self::new(self.name.clone(), self.map.clone(), delta, epsilon, self.kind)
    }

    /// Loads a germ from its JSON document form.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GermDocument = serde_json::from_str(text)?;
        doc.into_spec()
    }
}

/// JSON document for a custom germ.
///
/// `components` holds one list of `[exponents, numerator, denominator]`
/// terms per codomain coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub p: usize,
    pub components: Vec<Vec<(Vec<u32>, i64, i64)>>,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub kind: Option<GermKind>,
}

impl GermDocument {
    pub fn into_spec(self) -> Result<GermSpec> {
        if self.components.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: self.components.len(),
            });
        }
        let mut comps = Vec::with_capacity(self.p);
        for terms in &self.components {
            let mut poly = Poly::zero(self.n);
            for (exps, num, den) in terms {
                if exps.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: exps.len(),
                    });
                }
                if *den == 0 {
                    return Err(Error::InvalidGerm("zero denominator".into()));
                }
                poly.add_term(exps.clone(), rational(*num, *den));
            }
            comps.push(poly);
        }
        let map = PolyMap::new(comps)?;
        GermSpec::new(
            self.name.unwrap_or_else(|| "custom".into()),
            map,
            self.delta,
            self.epsilon,
            self.kind.unwrap_or(GermKind::RealIsolatedSingularity),
        )
    }
}

/// Names accepted by [`builtin_germ`].
pub const CATALOG: &[&str] = &[
    "projection3to2",
    "complex-z2w2",
    "complex-z2w3",
    "arrangement-braid2",
    "arrangement-single",
    "projection4to3",
    "real-twist4to3",
];

fn cr(re: i64) -> ComplexRational {
    complex_rational(rational(re, 1), rational(0, 1))
}

fn projection(n: usize, p: usize) -> PolyMap {
    PolyMap::new((0..p).map(|j| Poly::var(n, j)).collect()).expect("valid projection")
}

fn complex_germ(poly: &ComplexPoly) -> PolyMap {
    PolyMap::realify(poly).expect("catalog polynomial has no constant term")
}

fn arrangement_germ(forms: Vec<Vec<ComplexRational>>) -> PolyMap {
    let arr = Arrangement::new(forms).expect("catalog arrangement is valid");
    arr.defining_polynomial()
        .realified()
        .expect("catalog arrangement has d >= 1")
}

/// Looks up a catalog germ with the default radii.
pub fn builtin_germ(name: &str) -> Result<GermSpec> {
    let (map, kind) = match name {
        "projection3to2" => (projection(3, 2), GermKind::TrivialProjection),
        "projection4to3" => (projection(4, 3), GermKind::TrivialProjection),
        "complex-z2w2" => {
            let z = ComplexPoly::var(2, 0);
            let w = ComplexPoly::var(2, 1);
            (complex_germ(&z.mul(&z).add(&w.mul(&w))), GermKind::ComplexHolomorphic)
        }
        "complex-z2w3" => {
            let z = ComplexPoly::var(2, 0);
            let w = ComplexPoly::var(2, 1);
            let w3 = w.mul(&w).mul(&w);
            (complex_germ(&z.mul(&z).add(&w3)), GermKind::ComplexHolomorphic)
        }
        "arrangement-braid2" => (
            arrangement_germ(vec![vec![cr(1), cr(0)], vec![cr(0), cr(1)], vec![cr(1), cr(-1)]]),
            GermKind::Arrangement,
        ),
        "arrangement-single" => (arrangement_germ(vec![vec![cr(1), cr(0)]]), GermKind::Arrangement),
        "real-twist4to3" => {
            // (x1 + x4^2, x2 + x3 x4, x3 + x4^3): a submersion germ whose fibers are
            // curved arcs parametrized by x4
            let v = |j| Poly::var(4, j);
            let f1 = v(0).add(&v(3).mul(&v(3)));
            let f2 = v(1).add(&v(2).mul(&v(3)));
            let f3 = v(2).add(&v(3).mul(&v(3)).mul(&v(3)));
            (
                PolyMap::new(vec![f1, f2, f3]).expect("valid germ"),
                GermKind::RealIsolatedSingularity,
            )
        }
        other => return Err(Error::UnknownGerm(other.to_string())),
    };
    GermSpec::new(name, map, DEFAULT_DELTA, DEFAULT_EPSILON, kind)
}

/// Every catalog germ with default radii.
pub fn catalog() -> Vec<GermSpec> {
    CATALOG
        .iter()
        .map(|n| builtin_germ(n).expect("catalog entries resolve"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_entry() {
        let g = builtin_germ("projection3to2").unwrap();
        assert_eq!(g.kind, GermKind::TrivialProjection);
        assert_eq!((g.n(), g.p()), (3, 2));
        assert_eq!((g.delta, g.epsilon), (1e-2, 0.5));
        assert_eq!(g.map.eval(&[0.3, -0.1, 7.0]).unwrap(), vec![0.3, -0.1]);
    }

    #[test]
    fn z2w2_components() {
        let g = builtin_germ("complex-z2w2").unwrap();
        assert_eq!(g.kind, GermKind::ComplexHolomorphic);
        let c = g.map.components();
        assert_eq!(c[0].to_string(), "x1^2 - x2^2 + x3^2 - x4^2");
        assert_eq!(c[1].to_string(), "2*x1*x2 + 2*x3*x4");
        assert_eq!(g.map.eval(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn braid_is_arrangement() {
        let g = builtin_germ("arrangement-braid2").unwrap();
        assert_eq!(g.kind, GermKind::Arrangement);
        assert_eq!((g.n(), g.p()), (4, 2));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_germ("nope"), Err(Error::UnknownGerm(_))));
    }

    #[test]
    fn catalog_is_complete() {
        assert_eq!(catalog().len(), CATALOG.len());
    }

    #[test]
    fn radii_validated() {
        let g = builtin_germ("projection3to2").unwrap();
        assert!(g.with_radii(0.5, 0.5).is_err());
        assert!(g.with_radii(0.0, 0.5).is_err());
        assert!(g.with_radii(0.4, 0.5).is_ok());
    }

    #[test]
    fn json_document() {
        let text = r#"{
            "n": 3, "p": 2,
            "components": [[[[1,0,0], 1, 1]], [[[0,1,0], 1, 1], [[0,0,2], -1, 2]]],
            "delta": 0.01, "epsilon": 0.5
        }"#;
        let g = GermSpec::from_json(text).unwrap();
        assert_eq!(g.kind, GermKind::RealIsolatedSingularity);
        let v = g.map.eval(&[1.0, 2.0, 2.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
    }

    #[test]
    fn json_rejects_constant_term() {
        let text = r#"{"n": 3, "p": 2,
            "components": [[[[0,0,0], 1, 1]], [[[0,1,0], 1, 1]]],
            "delta": 0.01, "epsilon": 0.5}"#;
        assert!(GermSpec::from_json(text).is_err());
    }
}
