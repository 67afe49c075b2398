//! Horizontal lifting of base paths into the Milnor tube.
//!
//! The horizontal space at `x` is the row space of `J(x)` (the Euclidean
//! normal connection), so a lift of `b(t)` solves
//! `ẋ = Jᵀ(JJᵀ)⁻¹ ḃ(t)`. Each RK4 step is followed by a Newton retraction
//! onto the level `f = b(t_{k+1})`.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::germ::GermSpec;
use crate::linalg::{axpy, dist, kernel_component, min_norm_solve, norm, sub, SIGMA_MIN};
use crate::path::Path;
use crate::tube::{newton_level, TubePoint, BALL_SLACK};

/// Default RK4 steps per unit of base parameter.
pub const LIFT_STEPS: usize = 2048;
/// Maximum `‖f(x0) − base(0)‖` accepted at the start of a lift.
pub const LIFT_START_TOL: f64 = 1e-8;
/// Maximum tracking residual `‖f(x(t)) − b(t)‖` before a lift is aborted.
pub const LIFT_RESIDUAL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug)]
enum Side {
    Forward,
    Central,
    Backward,
}

/// Derivative of the base path by second-order finite differences,
/// one-sided toward the interior of the current step.
fn base_velocity(base: &Path, t: f64, h: f64, side: Side) -> Vec<f64> {
    let side = match side {
        Side::Central if t - h < 0.0 => Side::Forward,
        Side::Central if t + h > 1.0 => Side::Backward,
        Side::Forward if t + 2.0 * h > 1.0 => Side::Backward,
        Side::Backward if t - 2.0 * h < 0.0 => Side::Forward,
        s => s,
    };
    match side {
        Side::Central => {
            let (a, b) = (base.eval(t - h), base.eval(t + h));
            a.iter().zip(&b).map(|(l, r)| (r - l) / (2.0 * h)).collect()
        }
        Side::Forward => {
            let (b0, b1, b2) = (base.eval(t), base.eval(t + h), base.eval(t + 2.0 * h));
            (0..b0.len())
                .map(|i| (-3.0 * b0[i] + 4.0 * b1[i] - b2[i]) / (2.0 * h))
                .collect()
        }
        Side::Backward => {
            let (b0, b1, b2) = (base.eval(t), base.eval(t - h), base.eval(t - 2.0 * h));
            (0..b0.len())
                .map(|i| (3.0 * b0[i] - 4.0 * b1[i] + b2[i]) / (2.0 * h))
                .collect()
        }
    }
}

/// Outcome of a lift.
#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    #[serde(serialize_with = "ser_point")]
    pub endpoint: TubePoint,
    /// Largest `‖f(x_k) − b(t_k)‖` over accepted nodes.
    pub max_level_residual: f64,
    /// Largest `‖x_k‖ − ε` over nodes (negative when strictly inside).
    pub max_ball_excess: f64,
    /// Largest residual of an RK4 prediction before its Newton correction.
    pub max_drift: f64,
    /// Largest ratio of the vertical (kernel) part of a step to its length.
    pub max_vertical_ratio: f64,
    pub steps: usize,
}

fn ser_point<S: serde::Serializer>(p: &TubePoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.x.serialize(s)
}

/// A lifted path: nodes of the integrator plus one-sided velocities,
/// evaluated by cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct TubePath {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
    /// `(velocity at the left node, velocity at the right node)` per step
    vels: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TubePath {
    pub fn nodes(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.points.iter().map(Vec::as_slice))
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        self.points.last().expect("nonempty lift")
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        if t <= 0.0 || self.points.len() == 1 {
            return self.points[0].clone();
        }
        if t >= 1.0 {
            return self.end().to_vec();
        }
        let k = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let k = k.min(self.points.len() - 2);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (p0, p1) = (&self.points[k], &self.points[k + 1]);
        let (v0, v1) = &self.vels[k];
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        (0..p0.len())
            .map(|i| h00 * p0[i] + h10 * h * v0[i] + h01 * p1[i] + h11 * h * v1[i])
            .collect()
    }

    pub fn to_path(&self) -> Path {
        let me = Arc::new(self.clone());
        Path::from_curve(self.start().to_vec(), self.end().to_vec(), move |t: f64| me.eval(t))
    }
}

fn horizontal_velocity(g: &GermSpec, x: &[f64], bdot: &[f64]) -> Result<Vec<f64>> {
    if bdot.iter().all(|v| *v == 0.0) {
        return Ok(vec![0.0; x.len()]);
    }
    min_norm_solve(&g.map.jacobian_raw(x), bdot, SIGMA_MIN)
}

/// Lifts `base` (a path on `S^{p−1}_δ`) horizontally from `x0`.
pub fn horizontal_lift(
    g: &GermSpec,
    base: &Path,
    x0: &TubePoint,
    steps: usize,
) -> Result<(TubePath, TransportReport)> {
    check_dim(g.p(), base.dim())?;
    check_dim(g.n(), x0.x.len())?;
    let start_gap = dist(&g.map.eval_raw(&x0.x), base.start());
    if !(start_gap <= LIFT_START_TOL) {
        return Err(Error::ResidualBlowUp {
            residual: start_gap,
        });
    }
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let fd = FD_STEP.min(0.25 * h);

    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut vels = Vec::with_capacity(steps);
    times.push(0.0);
    points.push(x0.x.clone());

    let mut max_level_residual = start_gap;
    let mut max_ball_excess = norm(&x0.x) - g.epsilon;
    let mut max_drift: f64 = 0.0;
    let mut max_vertical_ratio: f64 = 0.0;

    let mut x = x0.x.clone();
    for k in 0..steps {
        let t0 = k as f64 * h;
        let t1 = if k + 1 == steps { 1.0 } else { (k + 1) as f64 * h };
        let dt = t1 - t0;
        let tm = t0 + 0.5 * dt;
        let wrap = |e: Error| Error::Lift {
            t0,
            t1,
            source: Box::new(e),
        };
        let step = || -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, f64)> {
            let k1 = horizontal_velocity(g, &x, &base_velocity(base, t0, fd, Side::Forward))?;
            let bm = base_velocity(base, tm, fd, Side::Central);
            let k2 = horizontal_velocity(g, &axpy(&x, 0.5 * dt, &k1), &bm)?;
            let k3 = horizontal_velocity(g, &axpy(&x, 0.5 * dt, &k2), &bm)?;
            let b1dot = base_velocity(base, t1, fd, Side::Backward);
            let k4 = horizontal_velocity(g, &axpy(&x, dt, &k3), &b1dot)?;
            let pred: Vec<f64> = (0..x.len())
                .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
            let b1 = base.eval(t1);
            let drift = dist(&g.map.eval_raw(&pred), &b1);
            let next = newton_level(&g.map, &pred, &b1, Some(g.epsilon))?;
            let v_end = horizontal_velocity(g, &next, &b1dot)?;
            Ok((next, k1, v_end, drift))
        };
        let (next, v_start, v_end, drift) = step().map_err(wrap)?;
        max_drift = max_drift.max(drift);

        let disp = sub(&next, &x);
        let len = norm(&disp);
        if len > 0.0 {
            let mid: Vec<f64> = x.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
            let vert = kernel_component(&g.map.jacobian_raw(&mid), &disp).map_err(wrap)?;
            max_vertical_ratio = max_vertical_ratio.max(norm(&vert) / len);
        }

        let res = dist(&g.map.eval_raw(&next), &base.eval(t1));
        if !(res <= LIFT_RESIDUAL_TOL) {
            return Err(wrap(Error::ResidualBlowUp { residual: res }));
        }
        let excess = norm(&next) - g.epsilon;
        if excess > BALL_SLACK {
            return Err(wrap(Error::BallExit {
                norm: norm(&next),
                radius: g.epsilon,
            }));
        }
        max_level_residual = max_level_residual.max(res);
        max_ball_excess = max_ball_excess.max(excess);

        times.push(t1);
        points.push(next.clone());
        vels.push((v_start, v_end));
        x = next;
    }

    let endpoint = TubePoint::unchecked(g, x);
    let path = TubePath {
        times,
        points,
        vels,
    };
    let report = TransportReport {
        endpoint,
        max_level_residual,
        max_ball_excess,
        max_drift,
        max_vertical_ratio,
        steps,
    };
    Ok((path, report))
}

/// `t ↦ δ(cos(φ₀ + sweep·t), sin(φ₀ + sweep·t))`.
pub fn circle_arc(delta: f64, phi0: f64, sweep: f64) -> Path {
    let at = move |phi: f64| vec![delta * phi.cos(), delta * phi.sin()];
    Path::from_curve(at(phi0), at(phi0 + sweep), move |t: f64| at(phi0 + sweep * t))
}

/// Lift around the full base circle starting from `x0`; `direction` is
/// `+1` (counterclockwise) or `−1`.
pub fn monodromy(g: &GermSpec, x0: &TubePoint, direction: i32, steps: usize) -> Result<TransportReport> {
    if g.p() != 2 {
        return Err(Error::Unsupported("a germ with p = 2".into()));
    }
    if direction != 1 && direction != -1 {
        return Err(Error::Unsupported("direction +1 or -1".into()));
    }
    let phi0 = x0.fx[1].atan2(x0.fx[0]);
    let base = circle_arc(g.delta, phi0, TAU * f64::from(direction));
    horizontal_lift(g, &base, x0, steps).map(|(_, r)| r)
}

/// Endpoint of the horizontal lift of `arc` from `x`.
pub fn parallel_transport(g: &GermSpec, arc: &Path, x: &TubePoint, steps: usize) -> Result<TubePoint> {
    horizontal_lift(g, arc, x, steps).map(|(_, r)| r.endpoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::builtin_germ;
    use crate::tube::sample_fiber;

    #[test]
    fn projection_loop_is_explicit() {
        let g = builtin_germ("projection3to2").unwrap();
        let x0 = TubePoint::new(&g, vec![g.delta, 0.0, 0.2]).unwrap();
        let base = circle_arc(g.delta, 0.0, TAU);
        let (path, rep) = horizontal_lift(&g, &base, &x0, 256).unwrap();
        for t in [0.1, 0.37, 0.5, 0.9] {
            let want = [g.delta * (TAU * t).cos(), g.delta * (TAU * t).sin(), 0.2];
            assert!(dist(&path.eval(t), &want) < 1e-9, "t = {t}");
        }
        assert!(dist(&rep.endpoint.x, &x0.x) < 1e-12);
        assert_eq!(path.start(), x0.x.as_slice());
    }

    #[test]
    fn constant_base_gives_constant_lift() {
        let g = builtin_germ("complex-z2w2").unwrap();
        let x0 = sample_fiber(&g, &[g.delta, 0.0], 1, 5).unwrap().remove(0);
        let base = Path::constant(vec![g.delta, 0.0]);
        let (path, rep) = horizontal_lift(&g, &base, &x0, 64).unwrap();
        assert!(path.nodes().all(|(_, x)| x == x0.x.as_slice()));
        assert_eq!(rep.endpoint.x, x0.x);
        assert!(rep.max_drift <= crate::tube::NEWTON_TOL);
    }

    #[test]
    fn bad_start_rejected() {
        let g = builtin_germ("projection3to2").unwrap();
        let x0 = TubePoint::new(&g, vec![0.0, g.delta, 0.0]).unwrap();
        let base = circle_arc(g.delta, 0.0, 1.0);
        assert!(horizontal_lift(&g, &base, &x0, 16).is_err());
    }

    #[test]
    fn monodromy_needs_circle_base() {
        let g = builtin_germ("projection4to3").unwrap();
        let x0 = TubePoint::new(&g, vec![g.delta, 0.0, 0.0, 0.1]).unwrap();
        assert!(matches!(monodromy(&g, &x0, 1, 16), Err(Error::Unsupported(_))));
    }

    #[test]
    fn z2w2_monodromy_moves_point_on_fiber() {
        let g = builtin_germ("complex-z2w2").unwrap();
        let x0 = sample_fiber(&g, &[g.delta, 0.0], 1, 9).unwrap().remove(0);
        let r = monodromy(&g, &x0, 1, LIFT_STEPS).unwrap();
        let fx = g.map.eval(&r.endpoint.x).unwrap();
        assert!(dist(&fx, &[g.delta, 0.0]) <= 1e-6);
        assert!(dist(&r.endpoint.x, &x0.x) > 0.1 * norm(&x0.x));
        assert!(r.max_level_residual <= 1e-6);
    }

    #[test]
    fn lifting_is_deterministic() {
        let g = builtin_germ("complex-z2w3").unwrap();
        let x0 = sample_fiber(&g, &[g.delta, 0.0], 1, 2).unwrap().remove(0);
        let a = monodromy(&g, &x0, -1, 300).unwrap();
        let b = monodromy(&g, &x0, -1, 300).unwrap();
        assert_eq!(a.endpoint.x, b.endpoint.x);
    }
}
