//! Motion planners on spheres and tasking planners for Milnor fibrations.
//!
//! A polynomial germ `f: (ℝⁿ,0) → (ℝᵖ,0)` restricted to its Milnor tube
//! `M(δ,ε) = f⁻¹(S^{p−1}_δ) ∩ Dⁿ_ε` is a locally trivial bundle over the
//! sphere `S^{p−1}_δ`. This crate plans on the base sphere with the
//! two- and three-region planners, lifts those plans horizontally into
//! the tube, builds cross-sections, and verifies the whole pipeline
//! numerically.

// `!(a <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrangement;
pub mod config;
pub mod error;
pub mod germ;
pub mod harness;
pub mod linalg;
pub mod path;
pub mod poly;
pub mod polymap;
pub mod sampling;
pub mod section;
pub mod sphere_geom;
pub mod sphere_planner;
pub mod taskplan;
pub mod trace;
pub mod transport;
pub mod tube;

pub use error::{Error, Result};
pub use germ::{builtin_germ, GermKind, GermSpec};
pub use path::Path;
pub use polymap::PolyMap;
pub use sphere_geom::SpherePoint;
pub use sphere_planner::PlanResult;
pub use tube::TubePoint;
