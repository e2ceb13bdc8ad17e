use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization of `x -> inf` along a direction: radius ladder
/// `R_k = r0 * rho^k` for `k = 0..=rungs`, angular slack, sample budget,
/// clustering and escape thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorParams {
    pub r0: f64,
    pub rho: f64,
    pub rungs: usize,
    pub delta: f64,
    pub samples: usize,
    pub eps_c: f64,
    pub escape: f64,
    pub seed: u64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams { r0: 10.0, rho: 4.0, rungs: 8, delta: 0.05, samples: 256, eps_c: 1e-3, escape: 1e6, seed: 42 }
    }
}

/// Norm below which a representative counts as bounded without a growth test.
pub const BOUNDED_NORM: f64 = 10.0;

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r0 > 0.0
            && self.r0.is_finite()
            && self.rho > 1.0
            && self.rho.is_finite()
            && self.rungs >= 2
            && self.delta > 0.0
            && self.delta <= 2.0
            && self.samples >= 8
            && self.eps_c > 0.0
            && self.escape > BOUNDED_NORM;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("estimator parameters out of range".into()))
        }
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.r0 * self.rho.powi(k as i32)
    }

    /// Angular slack at rung `k`; shrinks so that sampled sequences converge
    /// in direction.
    pub fn delta_at(&self, k: usize) -> f64 {
        self.delta * self.rho.powf(-(k as f64) / 2.0)
    }

    /// First rung that takes part in persistence checks.
    pub fn first_persistent(&self) -> usize {
        self.rungs / 2
    }

    /// Growth factor between a sample and its companion at `t / rho` above
    /// which the sample counts as escaping. Power growth `t^a` gives `rho^a`.
    pub fn growth_threshold(&self) -> f64 {
        self.rho.powf(0.25)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.rungs).map(|k| self.radius(k)).collect()
    }
}
