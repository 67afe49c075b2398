//! Tasking planners for `f|: M(δ,ε) → S^{p−1}_δ`.
//!
//! A task `(a, A)` asks for a path `α` in the tube with `α(0) = a` and
//! `f(α(1)) = A`. The sphere planner on `S^{p−1}` connects `f(a)/δ` to
//! `A/δ`; the resulting base path is scaled by `δ` and lifted horizontally
//! from `a`. Regions are preimages of the sphere regions under
//! `(f| × 1)`, so the planner uses as many regions as the sphere one.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::germ::{GermKind, GermSpec};
use crate::linalg::{dist, norm};
use crate::path::Path;
use crate::section::CrossSection;
use crate::sphere_geom::SpherePoint;
use crate::sphere_planner::{self, region_member, tc_sphere, Style};
use crate::transport::{horizontal_lift, TransportReport, TubePath};
use crate::tube::TubePoint;

/// Allowed `|‖A‖ − δ|` for a target.
pub const TARGET_TOL: f64 = 1e-9;
/// Allowed `‖f(α(1)) − A‖`.
pub const TASK_END_TOL: f64 = 1e-6;

/// Sphere dimension and planner family for a germ with codomain `ℝᵖ`.
///
/// The base is `S^{p−1}`, so even `p` gives an odd sphere.
pub fn base_sphere(p: usize) -> (usize, Style) {
    let m = p - 1;
    (m, Style::for_dim(m))
}

/// Topological complexity of `f|` for a catalog kind: 2 for complex and
/// arrangement germs, and `TC(S^{p−1})` (2 for even `p`, 3 for odd `p`)
/// for real germs.
pub fn tc_value(g: &GermSpec) -> usize {
    match g.kind {
        GermKind::ComplexHolomorphic | GermKind::Arrangement => 2,
        GermKind::RealIsolatedSingularity | GermKind::TrivialProjection => tc_sphere(g.p() - 1),
    }
}

#[derive(Clone, Debug)]
pub struct TaskPlan {
    pub region: usize,
    pub margin: f64,
    /// The lift `α` in the tube.
    pub path: TubePath,
    /// The sphere-planner path it lifts, scaled to `S^{p−1}_δ`.
    pub base_path: Path,
    pub report: TransportReport,
}

fn unit_image(a: &TubePoint) -> Result<SpherePoint> {
    SpherePoint::normalize(&a.fx).map_err(|_| Error::InvalidGerm("tube point maps to 0".into()))
}

/// Membership of `(f(a)/δ, A/δ)` in sphere region `i`.
pub fn task_region(g: &GermSpec, a: &TubePoint, target: &[f64], i: usize) -> Result<(bool, f64)> {
    let (m, style) = base_sphere(g.p());
    let from = unit_image(a)?;
    let to = SpherePoint::normalize(target)?;
    region_member(m, style, i, &from, &to)
}

/// Plans the task `(a, A)` with `steps` RK4 steps for the lift.
pub fn plan_task(g: &GermSpec, a: &TubePoint, target: &[f64], steps: usize) -> Result<TaskPlan> {
    if target.len() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: g.p(),
            got: target.len(),
        });
    }
    let r = norm(target);
    if !((r - g.delta).abs() <= TARGET_TOL) {
        return Err(Error::InvalidGerm(format!(
            "target norm {r} is not delta = {}",
            g.delta
        )));
    }
    let from = unit_image(a)?;
    let to = SpherePoint::normalize(target)?;
    let plan = sphere_planner::plan(&from, &to)?;
    let base_path = plan.path.scale(g.delta);
    let (path, report) = horizontal_lift(g, &base_path, a, steps)?;
    Ok(TaskPlan {
        region: plan.region,
        margin: plan.margin,
        path,
        base_path,
        report,
    })
}

/// The base planner recovered from a section `s` and the task planner:
/// stay at `b` for the first half, then follow `f` along the task plan
/// for `(s(b), b′)`.
pub struct BasePlanner {
    germ: GermSpec,
    section: Arc<dyn CrossSection>,
    steps: usize,
    /// Junction tolerance between `b` and `f(s(b))`.
    tol: f64,
}

impl BasePlanner {
    pub fn plan(&self, b: &[f64], b_prime: &[f64]) -> Result<(usize, Path)> {
        let g = &self.germ;
        let e = TubePoint::new(g, self.section.eval(b)?)?;
        let task = plan_task(g, &e, b_prime, self.steps)?;
        let map = g.map.clone();
        let lifted = task.path.to_path().map(move |x| map.eval_raw(x));
        let path = Path::concat_within(&Path::constant(b.to_vec()), &lifted, self.tol)?;
        Ok((task.region, path))
    }
}

/// Builds the recovered base planner; `steps` is used for every lift.
pub fn project_planner(
    g: &GermSpec,
    section: Arc<dyn CrossSection>,
    steps: usize,
) -> Result<BasePlanner> {
    if section.germ().name != g.name || section.germ().p() != g.p() {
        return Err(Error::Unsupported("a section of the same germ".into()));
    }
    Ok(BasePlanner {
        germ: g.clone(),
        section,
        steps,
        tol: TASK_END_TOL,
    })
}

/// `‖f(α(1)) − A‖` for a finished plan.
pub fn end_residual(g: &GermSpec, plan: &TaskPlan, target: &[f64]) -> f64 {
    dist(&g.map.eval_raw(plan.path.end()), target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::builtin_germ;
    use crate::tube::sample_tube_point;

    #[test]
    fn tc_values_follow_kind_and_parity() {
        assert_eq!(tc_value(&builtin_germ("complex-z2w2").unwrap()), 2);
        assert_eq!(tc_value(&builtin_germ("arrangement-braid2").unwrap()), 2);
        assert_eq!(tc_value(&builtin_germ("projection3to2").unwrap()), 2);
        assert_eq!(tc_value(&builtin_germ("real-twist4to3").unwrap()), 3);
        assert_eq!(tc_value(&builtin_germ("projection4to3").unwrap()), 3);
    }

    #[test]
    fn parity_flip_is_central() {
        assert_eq!(base_sphere(2), (1, Style::Odd));
        assert_eq!(base_sphere(3), (2, Style::Even));
    }

    #[test]
    fn projection_task_is_explicit() {
        let g = builtin_germ("projection3to2").unwrap();
        let a = TubePoint::new(&g, vec![g.delta, 0.0, 0.25]).unwrap();
        let target = [0.0, g.delta];
        let plan = plan_task(&g, &a, &target, 512).unwrap();
        assert_eq!(plan.region, 1);
        assert_eq!(plan.path.start(), a.x.as_slice());
        for t in [0.2, 0.5, 0.8] {
            let x = plan.path.eval(t);
            let b = plan.base_path.eval(t);
            assert!(dist(&x[..2], &b) < 1e-9);
            assert!((x[2] - 0.25).abs() < 1e-12);
        }
        assert!(end_residual(&g, &plan, &target) < 1e-12);
    }

    #[test]
    fn same_target_is_constant() {
        let g = builtin_germ("complex-z2w2").unwrap();
        let a = sample_tube_point(&g, 3, 0).unwrap();
        let target = a.fx.iter().map(|v| v * g.delta / norm(&a.fx)).collect::<Vec<_>>();
        let plan = plan_task(&g, &a, &target, 128).unwrap();
        assert_eq!(plan.region, 1);
        assert!(task_region(&g, &a, &target, 1).unwrap().0);
        assert!(dist(plan.path.end(), &a.x) < 1e-9);
    }

    #[test]
    fn antipodal_target_uses_region_two() {
        let g = builtin_germ("complex-z2w2").unwrap();
        let a = sample_tube_point(&g, 5, 1).unwrap();
        let target: Vec<f64> = a.fx.iter().map(|v| -v * g.delta / norm(&a.fx)).collect();
        assert!(!task_region(&g, &a, &target, 1).unwrap().0);
        assert!(task_region(&g, &a, &target, 2).unwrap().0);
        let plan = plan_task(&g, &a, &target, 2048).unwrap();
        assert_eq!(plan.region, 2);
        assert!(end_residual(&g, &plan, &target) <= TASK_END_TOL);
    }

    #[test]
    fn target_norm_checked() {
        let g = builtin_germ("projection3to2").unwrap();
        let a = TubePoint::new(&g, vec![g.delta, 0.0, 0.0]).unwrap();
        assert!(plan_task(&g, &a, &[0.0, 2.0 * g.delta], 16).is_err());
        assert!(plan_task(&g, &a, &[0.0, g.delta, 0.0], 16).is_err());
    }
}
