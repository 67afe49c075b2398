//! Constructive cross-sections of the Milnor fibration.
//!
//! Over `S¹_δ` a naive loop lift does not close because of the monodromy
//! `M`. Instead we pick `x₀` over `b₀ = (δ,0)`, compute `y = M⁻¹(x₀)`, join
//! `x₀` to `y` by a path `β` inside the fiber, and set
//! `s(θ) = P_θ(β(θ/2π))` with `P_θ` the horizontal transport along the arc
//! from `b₀` to `δe^{iθ}`. Then `s(0) = x₀` and `s(2π) = M(y) = x₀`.
//!
//! Over `S^{p−1}_δ` with `p ≥ 3` only the radial construction is provided:
//! transport of `x₀` along meridians from a pole, which is continuous away
//! from the antipodal pole. Its failure to close there is reported.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::germ::GermSpec;
use crate::linalg::{dist, dot, lerp, norm, scale};
use crate::path::{sample_times, Path};
use crate::sampling::{random_in_ball, rng_for};
use crate::sphere_geom::SpherePoint;
use crate::sphere_planner::geodesic_section;
use crate::transport::{circle_arc, horizontal_lift, monodromy, LIFT_STEPS};
use crate::tube::{in_tube, newton_level, project_to_level, TubePoint, TOL_TUBE};

/// Allowed distance of fiber-path endpoints from the fiber.
pub const FIBER_ENDPOINT_TOL: f64 = 1e-8;
/// Retraction residual required at every validated fiber-path sample.
pub const FIBER_PATH_TOL: f64 = 1e-6;
pub const FIBER_PATH_ATTEMPTS: usize = 20;
const FIBER_PATH_CHECKS: usize = 1024;
/// Largest ratio of projected to straight-line spacing between samples.
const FIBER_PATH_STRETCH: f64 = 10.0;

/// A map `s` from base points to tube points with `f∘s ≈ id`.
pub trait CrossSection: Send + Sync {
    fn germ(&self) -> &GermSpec;

    fn eval(&self, b: &[f64]) -> Result<Vec<f64>>;

    /// Value at `δe^{iθ}` (base circle only). Sections built by transport
    /// distinguish `θ = 0` from `θ = 2π`.
    fn eval_angle(&self, theta: f64) -> Result<Vec<f64>> {
        let d = self.germ().delta;
        self.eval(&[d * theta.cos(), d * theta.sin()])
    }
}

/// Angle of `b` in `[0, 2π)`.
fn angle_of(b: &[f64]) -> f64 {
    let a = b[1].atan2(b[0]);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// A path inside the fiber over `b` from `x_start` to `x_end`.
///
/// The straight segment is retracted pointwise onto the fiber. If that
/// fails validation, polylines through `waypoints` random fiber points are
/// tried, up to [`FIBER_PATH_ATTEMPTS`] times.
pub fn fiber_path(
    g: &GermSpec,
    b: &[f64],
    x_start: &TubePoint,
    x_end: &TubePoint,
    waypoints: usize,
    seed: u64,
) -> Result<Path> {
    check_dim(g.p(), b.len())?;
    for pt in [x_start, x_end] {
        let gap = dist(&g.map.eval(&pt.x)?, b);
        if !(gap <= FIBER_ENDPOINT_TOL) {
            return Err(Error::ResidualBlowUp { residual: gap });
        }
    }
    if x_start.x == x_end.x {
        return Ok(Path::constant(x_start.x.clone()));
    }
    for attempt in 0..FIBER_PATH_ATTEMPTS {
        let mut nodes = vec![x_start.x.clone()];
        if attempt > 0 {
            let mut rng = rng_for(seed, attempt as u64);
            let mut found = 0;
            while found < waypoints.max(1) {
                let cand = random_in_ball(g.n(), 0.5 * g.epsilon, &mut rng);
                if let Ok(w) = project_to_level(g, &cand, b) {
                    nodes.push(w);
                    found += 1;
                }
            }
        }
        nodes.push(x_end.x.clone());
        if let Some(path) = projected_polyline(g, b, nodes) {
            return Ok(path);
        }
    }
    Err(Error::FiberPath {
        attempts: FIBER_PATH_ATTEMPTS,
    })
}

/// Pointwise retraction of a polyline, or `None` if any check sample fails.
fn projected_polyline(g: &GermSpec, b: &[f64], nodes: Vec<Vec<f64>>) -> Option<Path> {
    let segs = nodes.len() - 1;
    let straight = {
        let nodes = nodes.clone();
        move |t: f64| {
            let u = (t * segs as f64).min(segs as f64);
            let k = (u.floor() as usize).min(segs - 1);
            lerp(&nodes[k], &nodes[k + 1], u - k as f64)
        }
    };
    let map = g.map.clone();
    let target = b.to_vec();
    let eps = g.epsilon;
    let retract = move |y: &[f64]| newton_level(&map, y, &target, Some(eps)).ok();

    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for t in sample_times(FIBER_PATH_CHECKS) {
        let y = straight(t);
        let x = retract(&y)?;
        if dist(&g.map.eval_raw(&x), b) > FIBER_PATH_TOL {
            return None;
        }
        if let Some((py, px)) = &prev {
            if dist(px, &x) > FIBER_PATH_STRETCH * dist(py, &y) + 1e-12 {
                return None;
            }
        }
        prev = Some((y, x));
    }
    let start = nodes[0].clone();
    let end = nodes[segs].clone();
    Some(Path::from_curve(start, end, move |t: f64| {
        let y = straight(t);
        // validated samples converge; an unexpected failure surfaces as NaN
        retract(&y).unwrap_or_else(|| vec![f64::NAN; y.len()])
    }))
}

/// A cross-section over `S¹_δ` built by monodromy correction.
#[derive(Clone, Debug)]
pub struct SectionS1 {
    germ: GermSpec,
    x0: TubePoint,
    reverse_image: TubePoint,
    beta: Path,
    steps_per_loop: usize,
}

impl SectionS1 {
    pub fn base_point(&self) -> &TubePoint {
        &self.x0
    }

    /// `M⁻¹(x₀)`.
    pub fn reverse_image(&self) -> &TubePoint {
        &self.reverse_image
    }

    /// The correction path inside the fiber over `b₀`.
    pub fn correction_path(&self) -> &Path {
        &self.beta
    }

    /// `s(θ) = P_θ(β(θ/2π))` for `θ ∈ [0, 2π]`.
    pub fn eval_at(&self, theta: f64) -> Result<TubePoint> {
        let theta = theta.clamp(0.0, TAU);
        let start = self.beta.eval(theta / TAU);
        let start = TubePoint {
            fx: self.germ.map.eval_raw(&start),
            x: start,
        };
        if theta == 0.0 {
            return Ok(start);
        }
        let arc = circle_arc(self.germ.delta, 0.0, theta);
        let steps = ((self.steps_per_loop as f64) * theta / TAU).ceil().max(1.0) as usize;
        let (_, rep) = horizontal_lift(&self.germ, &arc, &start, steps)?;
        Ok(rep.endpoint)
    }
}

impl CrossSection for SectionS1 {
    fn germ(&self) -> &GermSpec {
        &self.germ
    }

    fn eval(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(2, b.len())?;
        Ok(self.eval_at(angle_of(b))?.x)
    }

    fn eval_angle(&self, theta: f64) -> Result<Vec<f64>> {
        Ok(self.eval_at(theta)?.x)
    }
}

const SECTION_CANDIDATES: u64 = 8;

/// Builds an S¹ cross-section; candidate base points are drawn from the
/// fiber over `(δ, 0)` until the monodromy and the fiber join succeed.
pub fn build_section_s1(g: &GermSpec, seed: u64) -> Result<SectionS1> {
    build_section_s1_with(g, seed, LIFT_STEPS)
}

pub fn build_section_s1_with(g: &GermSpec, seed: u64, steps_per_loop: usize) -> Result<SectionS1> {
    if g.p() != 2 {
        return Err(Error::Unsupported("a germ with p = 2".into()));
    }
    let b0 = vec![g.delta, 0.0];
    let mut last_err = None;
    for c in 0..SECTION_CANDIDATES {
        let attempt = || -> Result<SectionS1> {
            let cand_seed = seed.wrapping_add(c.wrapping_mul(0x2545_f491_4f6c_dd1d));
            let x0 = crate::tube::sample_fiber(g, &b0, 1, cand_seed)?.remove(0);
            let back = monodromy(g, &x0, -1, steps_per_loop)?;
            // pull the endpoint back onto the fiber over b₀ exactly
            let y = newton_level(&g.map, &back.endpoint.x, &b0, Some(g.epsilon))?;
            let y = TubePoint::new(g, y)?;
            let beta = fiber_path(g, &b0, &x0, &y, 2, cand_seed)?;
            Ok(SectionS1 {
                germ: g.clone(),
                x0,
                reverse_image: y,
                beta,
                steps_per_loop,
            })
        };
        match attempt() {
            Ok(s) => return Ok(s),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one candidate"))
}

/// A section given in closed form.
pub struct ExplicitSection<F> {
    germ: GermSpec,
    f: F,
}

impl<F> ExplicitSection<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(germ: GermSpec, f: F) -> Self {
        Self { germ, f }
    }
}

impl<F> CrossSection for ExplicitSection<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn germ(&self) -> &GermSpec {
        &self.germ
    }

    fn eval(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.germ.p(), b.len())?;
        Ok((self.f)(b))
    }
}

/// A section displaced by a fixed vector; used for fault injection.
pub struct OffsetSection<'a> {
    inner: &'a dyn CrossSection,
    offset: Vec<f64>,
}

impl<'a> OffsetSection<'a> {
    pub fn new(inner: &'a dyn CrossSection, offset: Vec<f64>) -> Self {
        Self { inner, offset }
    }
}

impl CrossSection for OffsetSection<'_> {
    fn germ(&self) -> &GermSpec {
        self.inner.germ()
    }

    fn eval(&self, b: &[f64]) -> Result<Vec<f64>> {
        let x = self.inner.eval(b)?;
        Ok(x.iter().zip(&self.offset).map(|(a, d)| a + d).collect())
    }

    fn eval_angle(&self, theta: f64) -> Result<Vec<f64>> {
        let x = self.inner.eval_angle(theta)?;
        Ok(x.iter().zip(&self.offset).map(|(a, d)| a + d).collect())
    }
}

/// Residuals of a section over the base circle.
#[derive(Clone, Debug, Serialize)]
pub struct SectionCheck {
    pub samples: usize,
    /// `max ‖f(s(θ)) − δe^{iθ}‖`
    pub max_residual: f64,
    /// `‖s(0) − s(2π)‖`
    pub closure_defect: f64,
    /// Every sampled value satisfies the tube invariants.
    pub in_tube: bool,
}

/// Evaluates `f∘s − id` at `samples` equally spaced angles of `S¹_δ`.
pub fn verify_section(s: &dyn CrossSection, samples: usize) -> Result<SectionCheck> {
    let g = s.germ();
    if g.p() != 2 {
        return Err(Error::Unsupported("a germ with p = 2".into()));
    }
    let mut max_residual: f64 = 0.0;
    let mut all_in = true;
    for k in 0..samples {
        let theta = TAU * k as f64 / samples as f64;
        let x = s.eval_angle(theta)?;
        let b = [g.delta * theta.cos(), g.delta * theta.sin()];
        let r = dist(&g.map.eval(&x)?, &b);
        max_residual = max_residual.max(if r.is_nan() { f64::INFINITY } else { r });
        all_in &= in_tube(g, &x)?.inside;
    }
    let closure_defect = dist(&s.eval_angle(0.0)?, &s.eval_angle(TAU)?);
    Ok(SectionCheck {
        samples,
        max_residual,
        closure_defect,
        in_tube: all_in,
    })
}

/// Meridian transport of `x₀` from a pole of `S^{p−1}_δ`.
#[derive(Clone, Debug)]
pub struct RadialSection {
    germ: GermSpec,
    pole: SpherePoint,
    x0: TubePoint,
    steps: usize,
}

impl RadialSection {
    pub fn pole(&self) -> &SpherePoint {
        &self.pole
    }

    fn transport_between(&self, from: &SpherePoint, to: &SpherePoint, x: &TubePoint) -> Result<TubePoint> {
        let base = geodesic_section(from, to)?.scale(self.germ.delta);
        let (_, rep) = horizontal_lift(&self.germ, &base, x, self.steps)?;
        Ok(rep.endpoint)
    }

    /// Value at a base point other than the antipode of the pole.
    pub fn eval_point(&self, b: &[f64]) -> Result<TubePoint> {
        check_dim(self.germ.p(), b.len())?;
        let target = SpherePoint::normalize(b)?;
        if target == self.pole {
            return Ok(self.x0.clone());
        }
        self.transport_between(&self.pole, &target, &self.x0)
    }

    /// Limits at the antipode along a ring of angular radius `eta` around
    /// it: each ring value is carried on to the antipode and the diameter
    /// of the resulting set in the antipodal fiber is reported.
    pub fn closure_defect(&self, eta: f64, ring: usize) -> Result<RadialReport> {
        let p = self.germ.p();
        let pole = self.pole.coords();
        let anti = self.pole.neg();
        let (u, w) = orthonormal_pair(pole);
        let mut limits = Vec::with_capacity(ring);
        for k in 0..ring {
            let phi = TAU * k as f64 / ring as f64;
            let dir: Vec<f64> = (0..p)
                .map(|i| eta.cos() * anti.coords()[i] + eta.sin() * (phi.cos() * u[i] + phi.sin() * w[i]))
                .collect();
            let r = SpherePoint::normalize(&dir)?;
            let on_ring = self.transport_between(&self.pole, &r, &self.x0)?;
            limits.push(self.transport_between(&r, &anti, &on_ring)?.x);
        }
        let mut defect: f64 = 0.0;
        for i in 0..limits.len() {
            for j in i + 1..limits.len() {
                defect = defect.max(dist(&limits[i], &limits[j]));
            }
        }
        Ok(RadialReport { eta, ring, defect })
    }
}

impl CrossSection for RadialSection {
    fn germ(&self) -> &GermSpec {
        &self.germ
    }

    fn eval(&self, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval_point(b)?.x)
    }
}

/// Spread of the radial section at the antipodal pole.
#[derive(Clone, Debug, Serialize)]
pub struct RadialReport {
    pub eta: f64,
    pub ring: usize,
    pub defect: f64,
}

/// Two unit vectors orthogonal to `v` and to each other (`len(v) ≥ 3`).
fn orthonormal_pair(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let vn = scale(1.0 / norm(v), v);
    let mut basis = Vec::new();
    for i in 0..v.len() {
        let mut e = vec![0.0; v.len()];
        e[i] = 1.0;
        let mut r = e.clone();
        for q in std::iter::once(&vn).chain(basis.iter()) {
            let c = dot(&e, q);
            r = r.iter().zip(q.iter()).map(|(a, b)| a - c * b).collect();
        }
        let rn = norm(&r);
        if rn > 1e-6 {
            basis.push(scale(1.0 / rn, &r));
        }
        if basis.len() == 2 {
            break;
        }
    }
    (basis[0].clone(), basis[1].clone())
}

/// Radial section from `pole` (a point of `S^{p−1}_δ`) with `x₀` over it.
pub fn radial_section(g: &GermSpec, pole: &[f64], x0: &TubePoint, steps: usize) -> Result<RadialSection> {
    if g.p() < 3 {
        return Err(Error::Unsupported("a germ with p >= 3".into()));
    }
    check_dim(g.p(), pole.len())?;
    let gap = dist(&x0.fx, pole);
    if !(gap <= TOL_TUBE) {
        return Err(Error::ResidualBlowUp { residual: gap });
    }
    Ok(RadialSection {
        germ: g.clone(),
        pole: SpherePoint::normalize(pole)?,
        x0: x0.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::builtin_germ;
    use crate::tube::sample_fiber;

    #[test]
    fn fiber_path_constant_and_straight() {
        let g = builtin_germ("projection3to2").unwrap();
        let b = [g.delta, 0.0];
        let a = TubePoint::new(&g, vec![g.delta, 0.0, -0.2]).unwrap();
        let c = TubePoint::new(&g, vec![g.delta, 0.0, 0.3]).unwrap();
        let same = fiber_path(&g, &b, &a, &a, 2, 0).unwrap();
        assert_eq!(same.eval(0.4), a.x);
        let line = fiber_path(&g, &b, &a, &c, 2, 0).unwrap();
        assert!(dist(&line.eval(0.5), &[g.delta, 0.0, 0.05]) < 1e-15);
    }

    #[test]
    fn fiber_path_rejects_off_fiber_endpoints() {
        let g = builtin_germ("projection3to2").unwrap();
        let a = TubePoint::new(&g, vec![g.delta, 0.0, 0.0]).unwrap();
        let c = TubePoint::new(&g, vec![0.0, g.delta, 0.0]).unwrap();
        assert!(fiber_path(&g, &[g.delta, 0.0], &a, &c, 2, 0).is_err());
    }

    #[test]
    fn projection_section_is_explicit_lift() {
        let g = builtin_germ("projection3to2").unwrap();
        let s = build_section_s1_with(&g, 4, 512).unwrap();
        let c = s.base_point().x[2];
        for theta in [0.3, 2.0, 5.5] {
            let x = s.eval_angle(theta).unwrap();
            let want = [g.delta * theta.cos(), g.delta * theta.sin(), c];
            assert!(dist(&x, &want) < 1e-9);
        }
    }

    #[test]
    fn offset_section_is_flagged() {
        let g = builtin_germ("projection3to2").unwrap();
        let exact = ExplicitSection::new(g.clone(), |b: &[f64]| vec![b[0], b[1], 0.1]);
        let ok = verify_section(&exact, 36).unwrap();
        assert!(ok.max_residual <= 1e-12);
        let bad = OffsetSection::new(&exact, vec![1e-2, 0.0, 0.0]);
        assert!(verify_section(&bad, 36).unwrap().max_residual >= 1e-3);
    }

    #[test]
    fn radial_projection_closes() {
        let g = builtin_germ("projection4to3").unwrap();
        let pole = [0.0, 0.0, g.delta];
        let x0 = TubePoint::new(&g, vec![0.0, 0.0, g.delta, 0.1]).unwrap();
        let s = radial_section(&g, &pole, &x0, 256).unwrap();
        assert_eq!(s.eval_point(&pole).unwrap().x, x0.x);
        let rep = s.closure_defect(1e-2, 8).unwrap();
        assert!(rep.defect <= 1e-6, "{}", rep.defect);
    }

    #[test]
    fn radial_requires_p3() {
        let g = builtin_germ("complex-z2w2").unwrap();
        let x0 = sample_fiber(&g, &[g.delta, 0.0], 1, 0).unwrap().remove(0);
        assert!(radial_section(&g, &[g.delta, 0.0], &x0, 16).is_err());
    }

    #[test]
    fn orthonormal_pair_is_orthonormal() {
        let (u, w) = orthonormal_pair(&[1.0, 2.0, 2.0]);
        assert!(dot(&u, &w).abs() < 1e-15);
        assert!(dot(&u, &[1.0, 2.0, 2.0]).abs() < 1e-14);
        assert!((norm(&w) - 1.0).abs() < 1e-15);
    }
}
