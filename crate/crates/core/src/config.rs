//! Run settings shared by the harness and the CLI, loadable from JSON.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::germ::GermSpec;
use crate::transport::LIFT_STEPS;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Overrides the germ's tube radius δ.
    pub delta: Option<f64>,
    /// Overrides the germ's ball radius ε.
    pub epsilon: Option<f64>,
    pub seed: u64,
    /// RK4 steps per unit base parameter.
    pub lift_steps: usize,
    pub sphere_trials: usize,
    pub tube_trials: usize,
    pub task_trials: usize,
    pub section_samples: usize,
    /// Samples per path for pointwise checks.
    pub path_samples: usize,
    /// In-tube tolerance for samples of lifted task paths.
    pub task_tube_tol: f64,
    /// `‖f(α(1)) − A‖` and tracking tolerance for task plans.
    pub task_end_tol: f64,
    pub section_residual_tol: f64,
    pub section_closure_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            delta: None,
            epsilon: None,
            seed: 0x5eed,
            lift_steps: LIFT_STEPS,
            sphere_trials: 10_000,
            tube_trials: 1_000,
            task_trials: 100,
            section_samples: 360,
            path_samples: 256,
            task_tube_tol: 1e-5,
            task_end_tol: 1e-6,
            section_residual_tol: 1e-6,
            section_closure_tol: 1e-5,
        }
    }
}

impl Settings {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The germ with any radius overrides applied.
    pub fn apply(&self, g: &GermSpec) -> Result<GermSpec> {
        if self.delta.is_none() && self.epsilon.is_none() {
            return Ok(g.clone());
        }
        g.with_radii(
            self.delta.unwrap_or(g.delta),
            self.epsilon.unwrap_or(g.epsilon),
        )
    }
}
