//! Optimal motion planners on spheres.
//!
//! Odd `m` uses two regions: `U₁ = {θ₁ ≠ −θ₂}` with the normalized chord
//! `s₁`, and `U₂ = {θ₁ ≠ θ₂}` with `s₂`, which runs `s₁` to `−θ₂` and then
//! detours through the unit field `v`. Even `m` uses three regions: the
//! same chord `κ₁`, a detour `κ₂` through the normalized field `ν` (valid
//! when `θ₂ ≠ ±e₁`), and `κ₃`, a straight line in the stereographic chart
//! from the north pole.

use crate::error::{Error, Result};
use crate::linalg::{lerp, norm};
use crate::path::Path;
use crate::sphere_geom::{nu_field, stereo_p, stereo_q, v_field, SpherePoint};

/// A pair belongs to a region iff its margin exceeds this.
pub const MEMBER_ETA: f64 = 1e-12;

/// Planner family, fixed by the parity of the sphere dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Odd,
    Even,
}

impl Style {
    pub fn for_dim(m: usize) -> Self {
        if m % 2 == 1 {
            Self::Odd
        } else {
            Self::Even
        }
    }

    pub fn region_count(self) -> usize {
        match self {
            Self::Odd => 2,
            Self::Even => 3,
        }
    }
}

/// Topological complexity of `Sᵐ`: 2 for odd `m`, 3 for even `m`.
pub fn tc_sphere(m: usize) -> usize {
    Style::for_dim(m).region_count()
}

#[derive(Clone, Debug)]
pub struct PlanResult {
    /// 1-based region index.
    pub region: usize,
    pub path: Path,
    pub margin: f64,
}

fn check_pair(m: usize, style: Style, a: &SpherePoint, b: &SpherePoint) -> Result<()> {
    if a.m() != m || b.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m + 1,
            got: if a.m() != m { a.m() + 1 } else { b.m() + 1 },
        });
    }
    if Style::for_dim(m) != style {
        return Err(Error::ParityMismatch { m });
    }
    Ok(())
}

/// Margin of `(θ₁, θ₂)` in region `i`; the pair is a member iff the
/// margin exceeds [`MEMBER_ETA`].
pub fn region_margin(
    m: usize,
    style: Style,
    i: usize,
    a: &SpherePoint,
    b: &SpherePoint,
) -> Result<f64> {
    check_pair(m, style, a, b)?;
    let c = a.dot(b);
    match (style, i) {
        (_, 1) => Ok(1.0 + c),
        (Style::Odd, 2) => Ok(1.0 - c),
        (Style::Even, 2) => Ok((1.0 - c).min(1.0 - b.coords()[0].abs())),
        (Style::Even, 3) => Ok((1.0 - a.coords()[m]).min(1.0 - b.coords()[m])),
        _ => Err(Error::RegionIndex { index: i }),
    }
}

/// Membership test together with its margin.
pub fn region_member(
    m: usize,
    style: Style,
    i: usize,
    a: &SpherePoint,
    b: &SpherePoint,
) -> Result<(bool, f64)> {
    let margin = region_margin(m, style, i, a, b)?;
    Ok((margin > MEMBER_ETA, margin))
}

/// `s₁ = κ₁`: the normalized chord `((1−t)θ₁ + tθ₂)/‖·‖`.
pub fn geodesic_section(a: &SpherePoint, b: &SpherePoint) -> Result<Path> {
    if a.m() != b.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m() + 1,
            got: b.m() + 1,
        });
    }
    let margin = 1.0 + a.dot(b);
    if !(margin > MEMBER_ETA) {
        return Err(Error::Antipodal { margin });
    }
    let (x, y) = (a.coords().to_vec(), b.coords().to_vec());
    Ok(Path::from_curve(x.clone(), y.clone(), move |t: f64| {
        let p = lerp(&x, &y, t);
        let r = norm(&p);
        p.into_iter().map(|v| v / r).collect()
    }))
}

/// Two chords through an intermediate unit vector `w`, run at double speed.
fn detour(a: &SpherePoint, w: &SpherePoint, b: &SpherePoint) -> Result<Path> {
    Path::concat(&geodesic_section(a, w)?, &geodesic_section(w, b)?)
}

/// `α(θ, −θ)`: from `θ` through `v(θ)` to `−θ`.
fn odd_detour(theta: &SpherePoint) -> Result<Path> {
    let w = SpherePoint::normalize(&v_field(theta)?)?;
    detour(theta, &w, &theta.neg())
}

/// `β(θ, −θ)`: from `θ` through `ν(θ)/‖ν(θ)‖` to `−θ`; needs `θ ≠ ±e₁`.
fn even_detour(theta: &SpherePoint) -> Result<Path> {
    let w = SpherePoint::normalize(&nu_field(theta)?)?;
    detour(theta, &w, &theta.neg())
}

/// `s₂` (odd) or `κ₂` (even): chord to `−θ₂`, then the detour from `−θ₂`.
fn second_section(style: Style, a: &SpherePoint, b: &SpherePoint) -> Result<Path> {
    let anti = b.neg();
    let head = geodesic_section(a, &anti)?;
    let tail = match style {
        Style::Odd => odd_detour(&anti)?,
        Style::Even => even_detour(&anti)?,
    };
    Path::concat(&head, &tail)
}

/// `κ₃`: image under `q` of the chart segment from `p(θ₁)` to `p(θ₂)`.
fn chart_section(a: &SpherePoint, b: &SpherePoint) -> Result<Path> {
    let ya = stereo_p(a)?;
    let yb = stereo_p(b)?;
    Ok(Path::from_curve(
        a.coords().to_vec(),
        b.coords().to_vec(),
        move |t: f64| stereo_q(&lerp(&ya, &yb, t)).into_coords(),
    ))
}

/// The local section of region `i`, defined only on that region.
pub fn local_section(m: usize, i: usize, a: &SpherePoint, b: &SpherePoint) -> Result<Path> {
    let style = Style::for_dim(m);
    let (inside, margin) = region_member(m, style, i, a, b)?;
    if !inside {
        return Err(Error::OutsideRegion { region: i, margin });
    }
    match (style, i) {
        (_, 1) => geodesic_section(a, b),
        (_, 2) => second_section(style, a, b),
        (Style::Even, 3) => chart_section(a, b),
        _ => Err(Error::RegionIndex { index: i }),
    }
}

fn plan_with(style: Style, m: usize, a: &SpherePoint, b: &SpherePoint) -> Result<PlanResult> {
    check_pair(m, style, a, b)?;
    for region in 1..=style.region_count() {
        let (inside, margin) = region_member(m, style, region, a, b)?;
        if inside {
            let path = local_section(m, region, a, b)?;
            return Ok(PlanResult {
                region,
                path,
                margin,
            });
        }
    }
    unreachable!("sphere regions cover Sᵐ × Sᵐ")
}

/// Two-region planner on an odd sphere.
pub fn plan_odd(m: usize, a: &SpherePoint, b: &SpherePoint) -> Result<PlanResult> {
    plan_with(Style::Odd, m, a, b)
}

/// Three-region planner on an even sphere.
pub fn plan_even(m: usize, a: &SpherePoint, b: &SpherePoint) -> Result<PlanResult> {
    plan_with(Style::Even, m, a, b)
}

/// Dispatches on the parity of the sphere dimension.
pub fn plan(a: &SpherePoint, b: &SpherePoint) -> Result<PlanResult> {
    let m = a.m();
    plan_with(Style::for_dim(m), m, a, b)
}
