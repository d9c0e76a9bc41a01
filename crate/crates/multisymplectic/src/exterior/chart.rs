use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One velocity coordinate of a first-jet chart: `velocity` holds the value
/// of `∂(field)/∂(base)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetPairing {
    pub velocity: usize,
    pub field: usize,
    pub base: usize,
}

/// Jet-bundle structure on a chart: which coordinates are velocities and the
/// (field, base) pair each one differentiates. Pairings are injective per
/// (field, base).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetChartMeta {
    pub pairings: Vec<JetPairing>,
}

impl JetChartMeta {
    pub fn new(pairings: Vec<JetPairing>) -> Self {
        JetChartMeta { pairings }
    }

    /// All velocity pairings whose field coordinate is `field`.
    pub fn velocities_of(&self, field: usize) -> impl Iterator<Item = &JetPairing> {
        self.pairings.iter().filter(move |p| p.field == field)
    }

    pub fn is_field_coordinate(&self, idx: usize) -> bool {
        self.pairings.iter().any(|p| p.field == idx)
    }

    pub fn is_velocity_coordinate(&self, idx: usize) -> bool {
        self.pairings.iter().any(|p| p.velocity == idx)
    }
}

/// Coordinate chart adapted to a fibration: `m` base coordinates first, then
/// `n` fiber coordinates. The implied volume form is `dx^1∧…∧dx^m` (index
/// set `0..m`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberedChart {
    m: usize,
    n: usize,
    names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jet: Option<JetChartMeta>,
}

impl FiberedChart {
    /// Panics unless `names.len() == m + n`.
    pub fn new(m: usize, n: usize, names: Vec<String>) -> Self {
        assert_eq!(names.len(), m + n, "chart needs m + n coordinate names");
        FiberedChart {
            m,
            n,
            names,
            jet: None,
        }
    }

    /// Convenience constructor from name lists.
    pub fn from_names(base: &[&str], fiber: &[&str]) -> Self {
        let names = base
            .iter()
            .chain(fiber.iter())
            .map(|s| s.to_string())
            .collect();
        FiberedChart::new(base.len(), fiber.len(), names)
    }

    pub fn with_jet(mut self, jet: JetChartMeta) -> Self {
        self.jet = Some(jet);
        self
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn fiber_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_vertical_index(&self, idx: usize) -> bool {
        idx >= self.m
    }

    pub fn vertical_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.m..self.dim()
    }

    pub fn jet(&self) -> Option<&JetChartMeta> {
        self.jet.as_ref()
    }

    pub fn require_jet(&self) -> Result<&JetChartMeta> {
        self.jet.as_ref().ok_or(Error::MissingJetMeta)
    }

    /// Zero out the base components of a vector; used when projecting onto
    /// the vertical subspace.
    pub fn verticalize(&self, v: &mut crate::exterior::VectorValue) {
        for i in 0..self.m {
            v.components_mut()[i] = 0.0;
        }
    }
}
