//! The Milnor tube `M(δ,ε) = f⁻¹(S^{p−1}_δ) ∩ Dⁿ_ε` as a constraint set:
//! membership, Newton retraction onto a level, fiber sampling and an
//! empirical validity check for the radii.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::germ::GermSpec;
use crate::linalg::{dist, min_norm_solve, norm, sigma_min, sub, SIGMA_MIN};
use crate::polymap::PolyMap;
use crate::sampling::{random_in_ball, random_unit, rng_for};

/// Allowed `|‖f(x)‖ − δ|` for tube points.
pub const TOL_TUBE: f64 = 1e-8;
/// Allowed `‖x‖ − ε`.
pub const BALL_SLACK: f64 = 1e-9;
/// Newton stops once `‖f(x) − b‖` is at most this.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;
/// `check_tube` acceptance: smallest singular value over samples.
pub const CHECK_MIN_SIGMA: f64 = 1e-6;
/// `check_tube` acceptance: largest fraction of samples beyond `0.9ε`.
pub const CHECK_MAX_CROWDING: f64 = 0.01;

/// A point of the tube with its cached image.
#[derive(Clone, Debug, PartialEq)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
}

impl TubePoint {
    /// Validates `x` against the tube invariants at [`TOL_TUBE`].
    pub fn new(g: &GermSpec, x: Vec<f64>) -> Result<Self> {
        let m = in_tube(g, &x)?;
        if !m.inside {
            if m.ball_excess > BALL_SLACK {
                return Err(Error::BallExit {
                    norm: norm(&x),
                    radius: g.epsilon,
                });
            }
            return Err(Error::ResidualBlowUp {
                residual: m.level_residual.abs(),
            });
        }
        let fx = g.map.eval_raw(&x);
        Ok(Self { x, fx })
    }

    pub(crate) fn unchecked(g: &GermSpec, x: Vec<f64>) -> Self {
        let fx = g.map.eval_raw(&x);
        debug_assert!(
            ((norm(&fx) - g.delta).abs() <= TOL_TUBE) && norm(&x) <= g.epsilon + BALL_SLACK,
            "tube invariant violated at {x:?}"
        );
        Self { x, fx }
    }
}

/// Residuals of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TubeMembership {
    pub inside: bool,
    /// `‖f(x)‖ − δ`
    pub level_residual: f64,
    /// `‖x‖ − ε`
    pub ball_excess: f64,
}

pub fn in_tube(g: &GermSpec, x: &[f64]) -> Result<TubeMembership> {
    in_tube_with_tol(g, x, TOL_TUBE)
}

pub fn in_tube_with_tol(g: &GermSpec, x: &[f64], tol: f64) -> Result<TubeMembership> {
    let fx = g.map.eval(x)?;
    let level_residual = norm(&fx) - g.delta;
    let ball_excess = norm(x) - g.epsilon;
    Ok(TubeMembership {
        inside: level_residual.abs() <= tol && ball_excess <= BALL_SLACK,
        level_residual,
        ball_excess,
    })
}

/// Damped minimal-norm Newton toward `f(x) = target`, optionally confined
/// to a ball.
pub(crate) fn newton_level(
    map: &PolyMap,
    x: &[f64],
    target: &[f64],
    ball: Option<f64>,
) -> Result<Vec<f64>> {
    let mut x = x.to_vec();
    let mut r = sub(&map.eval_raw(&x), target);
    let mut res = norm(&r);
    for _ in 0..NEWTON_MAX_ITER {
        if res <= NEWTON_TOL {
            return Ok(x);
        }
        let j = map.jacobian_raw(&x);
        let step = min_norm_solve(&j, &r, SIGMA_MIN)?;
        // backtrack on the full step only if the residual grows
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - lambda * s).collect();
            let rc = sub(&map.eval_raw(&cand), target);
            let nc = norm(&rc);
            if nc < res {
                accepted = Some((cand, rc, nc));
                break;
            }
            lambda *= 0.5;
        }
        let Some((cand, rc, nc)) = accepted else {
            return Err(Error::NoConvergence { residual: res });
        };
        if let Some(radius) = ball {
            let r_norm = norm(&cand);
            if r_norm > radius + BALL_SLACK {
                return Err(Error::BallExit {
                    norm: r_norm,
                    radius,
                });
            }
        }
        x = cand;
        r = rc;
        res = nc;
    }
    if res <= NEWTON_TOL {
        Ok(x)
    } else {
        Err(Error::NoConvergence { residual: res })
    }
}

/// Retracts `x` onto the level `f = b` with minimal-norm Newton steps,
/// staying inside the ε-ball.
pub fn project_to_level(g: &GermSpec, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_dim(g.n(), x.len())?;
    check_dim(g.p(), b.len())?;
    newton_level(&g.map, x, b, Some(g.epsilon))
}

/// `count` points of the fiber over `b`, retracted from uniform draws in
/// the `ε/2`-ball. Draw `k` uses stream `k` of `seed`.
pub fn sample_fiber(g: &GermSpec, b: &[f64], count: usize, seed: u64) -> Result<Vec<TubePoint>> {
    check_dim(g.p(), b.len())?;
    let attempts = 100 * count;
    let mut out = Vec::with_capacity(count);
    for k in 0..attempts {
        if out.len() == count {
            break;
        }
        let mut rng = rng_for(seed, k as u64);
        let x0 = random_in_ball(g.n(), 0.5 * g.epsilon, &mut rng);
        if let Ok(x) = project_to_level(g, &x0, b) {
            if let Ok(tp) = TubePoint::new(g, x) {
                out.push(tp);
            }
        }
    }
    if out.len() < count {
        return Err(Error::FiberSampling {
            found: out.len(),
            wanted: count,
            attempts,
        });
    }
    Ok(out)
}

/// One random tube point: a random base point and a fiber point over it.
pub fn sample_tube_point(g: &GermSpec, seed: u64, stream: u64) -> Result<TubePoint> {
    let mut rng = rng_for(seed, stream);
    let b: Vec<f64> = random_unit(g.p(), &mut rng)
        .into_iter()
        .map(|v| g.delta * v)
        .collect();
    let mut pts = sample_fiber(g, &b, 1, seed ^ (stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)))?;
    Ok(pts.remove(0))
}

/// Empirical validation of the radii.
#[derive(Clone, Debug, Serialize)]
pub struct TubeReport {
    pub germ: String,
    pub delta: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub retracted: usize,
    pub newton_failures: usize,
    pub min_sigma: f64,
    /// Fraction of retracted samples with `‖x‖ > 0.9ε`.
    pub crowding: f64,
    pub pass: bool,
}

/// Samples the tube by radial retraction from the `ε/2`-ball and checks
/// that the Jacobian stays well conditioned and the tube stays clear of
/// the ball boundary.
pub fn check_tube(g: &GermSpec, trials: usize, seed: u64) -> TubeReport {
    let mut retracted = 0;
    let mut crowded = 0;
    let mut min_sigma = f64::INFINITY;
    for k in 0..trials {
        let mut rng = rng_for(seed, k as u64);
        let x0 = random_in_ball(g.n(), 0.5 * g.epsilon, &mut rng);
        let f0 = g.map.eval_raw(&x0);
        let r0 = norm(&f0);
        let target: Vec<f64> = if r0 > 1e-300 {
            f0.iter().map(|v| g.delta * v / r0).collect()
        } else {
            random_unit(g.p(), &mut rng)
                .into_iter()
                .map(|v| g.delta * v)
                .collect()
        };
        match newton_level(&g.map, &x0, &target, None) {
            Ok(x) => {
                retracted += 1;
                if norm(&x) > 0.9 * g.epsilon {
                    crowded += 1;
                }
                min_sigma = min_sigma.min(sigma_min(&g.map.jacobian_raw(&x)));
            }
            Err(_) => {}
        }
    }
    let crowding = if retracted > 0 {
        crowded as f64 / retracted as f64
    } else {
        1.0
    };
    let pass = retracted > 0 && min_sigma >= CHECK_MIN_SIGMA && crowding < CHECK_MAX_CROWDING;
    TubeReport {
        germ: g.name.clone(),
        delta: g.delta,
        epsilon: g.epsilon,
        trials,
        retracted,
        newton_failures: trials - retracted,
        min_sigma: if min_sigma.is_finite() { min_sigma } else { 0.0 },
        crowding,
        pass,
    }
}

/// Distance moved by re-projecting an already projected point.
pub fn reprojection_shift(g: &GermSpec, x: &[f64]) -> Result<f64> {
    let b = g.map.eval(x)?;
    let r = norm(&b);
    let target: Vec<f64> = b.iter().map(|v| g.delta * v / r).collect();
    let y = project_to_level(g, x, &target)?;
    Ok(dist(x, &y))
}
