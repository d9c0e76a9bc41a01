//! The system type and sampling/tolerance configuration shared by checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exterior::{FiberedChart, FormField};

/// A fibered chart together with an evaluable `(m+1)`-form.
///
/// The form is premultisymplectic when closed; closedness is checked
/// numerically by the model fact tables, not enforced here.
#[derive(Clone)]
pub struct PremultisymplecticSystem {
    name: String,
    chart: FiberedChart,
    omega: FormField,
}

impl PremultisymplecticSystem {
    /// Panics when the form degree is not `m + 1` or the charts disagree.
    pub fn new(name: impl Into<String>, omega: FormField) -> Self {
        let chart = omega.chart().clone();
        assert_eq!(
            omega.degree(),
            chart.base_dim() + 1,
            "system form must have degree m + 1"
        );
        PremultisymplecticSystem {
            name: name.into(),
            chart,
            omega,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    pub fn omega(&self) -> &FormField {
        &self.omega
    }

    pub fn base_dim(&self) -> usize {
        self.chart.base_dim()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

/// Tolerances used across checks.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Algebraic residual tolerance (exact-arithmetic checks).
    pub algebraic: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Residual tolerance for finite-difference derivative checks.
    pub fd: f64,
    /// Span residual tolerance for involutivity (FD brackets are noisier).
    pub involutive: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-8,
            rank: 1e-9,
            fd: 1e-6,
            involutive: 1e-5,
            fd_step: 1e-5,
        }
    }
}

/// Sampling plan plus tolerances for a batch of checks.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub points: usize,
    pub seed: u64,
    pub box_lo: f64,
    pub box_hi: f64,
    pub jobs: usize,
    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            points: 8,
            seed: 0,
            box_lo: -1.0,
            box_hi: 1.0,
            jobs: 1,
            tol: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Deterministic box sample of `self.points` points in `dim` coordinates.
    pub fn sample_box(&self, dim: usize) -> Vec<Vec<f64>> {
        let mut rng = self.rng();
        (0..self.points)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.gen_range(self.box_lo..=self.box_hi))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_seed_deterministic() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.sample_box(5), cfg.sample_box(5));
        let other = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_ne!(cfg.sample_box(5), other.sample_box(5));
    }
}
