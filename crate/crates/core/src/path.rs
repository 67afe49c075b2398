//! Lazy path combinators on `[0,1] → ℝᵏ`.
//!
//! Paths are trees of primitive curves joined by concatenation, reversal,
//! reparametrization and pointwise maps. Nothing is sampled until a caller
//! evaluates. Endpoints are stored explicitly and returned bitwise at
//! `t = 0` and `t = 1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::dist;

/// Junction tolerance for [`Path::concat`].
pub const CONCAT_TOL: f64 = 1e-9;

/// A primitive curve, evaluated only on the open interval `(0,1)`.
pub trait Curve: Send + Sync {
    fn eval(&self, t: f64) -> Vec<f64>;
}

impl<F> Curve for F
where
    F: Fn(f64) -> Vec<f64> + Send + Sync,
{
    fn eval(&self, t: f64) -> Vec<f64> {
        self(t)
    }
}

#[derive(Clone)]
enum Node {
    Constant,
    Prim(Arc<dyn Curve>),
    Concat(Path, Path),
    Reverse(Path),
    Reparam(Path, Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Map(Path, Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>),
}

/// A continuous path with declared endpoints.
#[derive(Clone)]
pub struct Path {
    start: Arc<[f64]>,
    end: Arc<[f64]>,
    node: Arc<Node>,
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.node {
            Node::Constant => "constant",
            Node::Prim(_) => "primitive",
            Node::Concat(..) => "concat",
            Node::Reverse(_) => "reverse",
            Node::Reparam(..) => "reparam",
            Node::Map(..) => "map",
        };
        f.debug_struct("Path")
            .field("kind", &kind)
            .field("start", &&*self.start)
            .field("end", &&*self.end)
            .finish()
    }
}

impl Path {
    /// Wraps a curve whose limits at 0 and 1 are `start` and `end`.
    pub fn from_curve(start: Vec<f64>, end: Vec<f64>, curve: impl Curve + 'static) -> Self {
        assert_eq!(start.len(), end.len(), "endpoint dimensions");
        Self {
            start: start.into(),
            end: end.into(),
            node: Arc::new(Node::Prim(Arc::new(curve))),
        }
    }

    pub fn constant(x: Vec<f64>) -> Self {
        let x: Arc<[f64]> = x.into();
        Self {
            start: x.clone(),
            end: x,
            node: Arc::new(Node::Constant),
        }
    }

    /// `a` on `[0,½]` then `b` on `[½,1]`; requires `a(1) = b(0)` within
    /// [`CONCAT_TOL`].
    pub fn concat(a: &Path, b: &Path) -> Result<Self> {
        Self::concat_within(a, b, CONCAT_TOL)
    }

    pub fn concat_within(a: &Path, b: &Path, tol: f64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let gap = dist(&a.end, &b.start);
        if !(gap <= tol) {
            return Err(Error::EndpointMismatch { gap });
        }
        Ok(Self {
            start: a.start.clone(),
            end: b.end.clone(),
            node: Arc::new(Node::Concat(a.clone(), b.clone())),
        })
    }

    pub fn reverse(&self) -> Self {
        Self {
            start: self.end.clone(),
            end: self.start.clone(),
            node: Arc::new(Node::Reverse(self.clone())),
        }
    }

    /// `t ↦ self(φ(t))` for a monotone `φ` with `φ(0) = 0`, `φ(1) = 1`.
    pub fn reparam(&self, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            start: self.start.clone(),
            end: self.end.clone(),
            node: Arc::new(Node::Reparam(self.clone(), Arc::new(phi))),
        }
    }

    /// Pointwise image `t ↦ g(self(t))`.
    pub fn map(&self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            start: g(&self.start).into(),
            end: g(&self.end).into(),
            node: Arc::new(Node::Map(self.clone(), Arc::new(g))),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(move |x| x.iter().map(|v| c * v).collect())
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn end(&self) -> &[f64] {
        &self.end
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        if t <= 0.0 {
            return self.start.to_vec();
        }
        if t >= 1.0 {
            return self.end.to_vec();
        }
        match &*self.node {
            Node::Constant => self.start.to_vec(),
            Node::Prim(c) => c.eval(t),
            // the first half owns the junction
            Node::Concat(a, b) => {
                if t <= 0.5 {
                    a.eval(2.0 * t)
                } else {
                    b.eval(2.0 * t - 1.0)
                }
            }
            Node::Reverse(a) => a.eval(1.0 - t),
            Node::Reparam(a, phi) => a.eval(phi(t)),
            Node::Map(a, g) => g(&a.eval(t)),
        }
    }

    /// `count ≥ 2` uniformly spaced samples including both endpoints.
    pub fn sample(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        sample_times(count)
            .into_iter()
            .map(|t| (t, self.eval(t)))
            .collect()
    }
}

/// `count` uniformly spaced parameters from 0 to 1 inclusive.
pub fn sample_times(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { 1.0 } else { i as f64 / last })
                .collect()
        }
    }
}
