//! Points of the unit sphere `Sᵐ ⊂ ℝ^{m+1}`, the two tangent fields used
//! by the planners, and stereographic charts from the north pole.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Tolerance on `‖x‖ = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// Guard band around the north pole for [`stereo_p`].
pub const POLE_GUARD: f64 = 1e-12;

/// A point on `Sᵐ`, stored with `m + 1` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Accepts `coords` only if already unit within [`UNIT_TOL`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let r = norm(&coords);
        if coords.len() < 2 || !((r - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::NotUnit { norm: r });
        }
        Ok(Self(coords))
    }

    /// Radial projection of a nonzero vector.
    pub fn normalize(coords: &[f64]) -> Result<Self> {
        let r = norm(coords);
        if coords.len() < 2 || !(r > 0.0) || !r.is_finite() {
            return Err(Error::NotUnit { norm: r });
        }
        Ok(Self(coords.iter().map(|x| x / r).collect()))
    }

    /// Basis vector `e_{i+1}` of `Sᵐ` (zero-based `i`).
    pub fn basis(m: usize, i: usize) -> Self {
        let mut v = vec![0.0; m + 1];
        v[i] = 1.0;
        Self(v)
    }

    pub fn north_pole(m: usize) -> Self {
        Self::basis(m, m)
    }

    /// Sphere dimension `m`.
    pub fn m(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn neg(&self) -> SpherePoint {
        SpherePoint(self.0.iter().map(|x| -x).collect())
    }
}

/// The unit field `v(x₁,y₁,…,x_ℓ,y_ℓ) = (−y₁,x₁,…,−y_ℓ,x_ℓ)` on odd spheres.
pub fn v_field(x: &SpherePoint) -> Result<Vec<f64>> {
    let c = x.coords();
    if c.len() % 2 != 0 {
        return Err(Error::ParityMismatch { m: x.m() });
    }
    Ok(c.chunks_exact(2).flat_map(|p| [-p[1], p[0]]).collect())
}

/// The field `ν(x₁,x₂,x₃,…,x_m,x_{m+1}) = (0,−x₃,x₂,…,−x_{m+1},x_m)` on even
/// spheres, vanishing exactly at `±e₁`.
pub fn nu_field(x: &SpherePoint) -> Result<Vec<f64>> {
    let c = x.coords();
    if c.len() % 2 != 1 {
        return Err(Error::ParityMismatch { m: x.m() });
    }
    let mut out = Vec::with_capacity(c.len());
    out.push(0.0);
    out.extend(c[1..].chunks_exact(2).flat_map(|p| [-p[1], p[0]]));
    Ok(out)
}

/// Stereographic projection `Sᵐ ∖ {p_N} → ℝᵐ` from `p_N = (0,…,0,1)`.
pub fn stereo_p(x: &SpherePoint) -> Result<Vec<f64>> {
    let c = x.coords();
    let last = c[c.len() - 1];
    if !(last < 1.0 - POLE_GUARD) {
        return Err(Error::NearNorthPole);
    }
    let d = 1.0 - last;
    Ok(c[..c.len() - 1].iter().map(|v| v / d).collect())
}

/// Inverse chart `ℝᵐ → Sᵐ ∖ {p_N}`.
pub fn stereo_q(y: &[f64]) -> SpherePoint {
    let r2 = dot(y, y);
    let d = r2 + 1.0;
    let mut out: Vec<f64> = y.iter().map(|v| 2.0 * v / d).collect();
    out.push((r2 - 1.0) / d);
    SpherePoint(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_on_s3() {
        let e1 = SpherePoint::basis(3, 0);
        assert_eq!(v_field(&e1).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(v_field(&SpherePoint::basis(2, 0)).is_err());
    }

    #[test]
    fn nu_zeros_and_sample() {
        let e1 = SpherePoint::basis(2, 0);
        assert_eq!(nu_field(&e1).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(nu_field(&e1.neg()).unwrap().iter().all(|v| *v == 0.0));
        let top = SpherePoint::basis(2, 2);
        assert_eq!(nu_field(&top).unwrap(), vec![0.0, -1.0, 0.0]);
        assert!(nu_field(&SpherePoint::basis(3, 0)).is_err());
    }

    #[test]
    fn stereo_fixed_points() {
        assert_eq!(stereo_p(&SpherePoint::basis(2, 0)).unwrap(), vec![1.0, 0.0]);
        let south = SpherePoint::basis(2, 2).neg();
        assert!(stereo_p(&south).unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(stereo_q(&[0.0, 0.0]).coords(), &[0.0, 0.0, -1.0]);
        assert!(matches!(
            stereo_p(&SpherePoint::north_pole(2)),
            Err(Error::NearNorthPole)
        ));
    }

    #[test]
    fn construction_checks_norm() {
        assert!(SpherePoint::new(vec![1.0, 1e-5]).is_err());
        assert!(SpherePoint::new(vec![0.6, 0.8]).is_ok());
        assert!(SpherePoint::normalize(&[0.0, 0.0]).is_err());
        let p = SpherePoint::normalize(&[3.0, 4.0]).unwrap();
        assert_eq!(p.coords(), &[0.6, 0.8]);
    }
}
