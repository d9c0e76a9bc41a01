//! Sparse exterior algebra over a finite-dimensional tangent space at a
//! point, plus form fields over a chart with finite-difference calculus.
//!
//! Conventions used throughout the crate:
//!
//! * A degree-`k` form stores coefficients on strictly increasing index
//!   tuples; the coefficient on `{i1 < … < ik}` is the value of the form on
//!   `(e_{i1}, …, e_{ik})`.
//! * Base coordinates occupy indices `0..m`; the vertical subspace is the
//!   span of the remaining coordinate directions.
//! * Iterated contraction order: `i(v1∧…∧vk)ω = i(v1)∘i(v2)∘…∘i(vk)ω`,
//!   rightmost factor contracted first. Kernel-membership verdicts do not
//!   depend on this choice (it only flips signs).

mod chart;
mod field;
mod form;

pub use chart::{FiberedChart, JetChartMeta, JetPairing};
pub use field::{
    contact_substitute, exterior_derivative_fd, lie_bracket_fd, FormField, ScalarField, VectorField,
};
pub use form::{
    interior, interior_decomposable, pullback_linear, wedge, FormValue, IndexSet, MultivectorValue,
    VectorValue,
};
