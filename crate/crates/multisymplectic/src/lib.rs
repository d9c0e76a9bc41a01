// Index-notation loops mirror the tensor formulas and read better that way.
#![allow(clippy::needless_range_loop)]

//! Premultisymplectic systems on coordinate charts of fibered manifolds.
//!
//! A system is a chart `(x^1..x^m; y^1..y^n)` together with an evaluable
//! closed `(m+1)`-form `Ω`. This crate classifies its solutions numerically:
//!
//! * [`exterior`] — sparse exterior algebra at a point (wedge, interior
//!   products, linear pullback) plus form fields over a chart with
//!   finite-difference calculus and contact-ideal substitution.
//! * [`kernels`] — pointwise linear algebra of the flat map `v ↦ i(v)Ω`:
//!   kernel bases, the vertical kernel distribution `K`, nondegeneracy and
//!   variationality tests, and the vertical-extension solver.
//! * [`solutions`] — distribution-level classification: transversality,
//!   `H + B` decomposition, expanded solutions, kernel-relatedness, the
//!   equivalence-relation probe, and finite-difference involutivity.
//! * [`sections`] — section-level solution checks, holonomic prolongation,
//!   kernel-relatedness of sections, and the weak-kernel test.
//! * [`reduction`] — quotients by coordinate-adapted kernel directions:
//!   reduced charts and forms, projectability certificates, section
//!   transport, and the slice-dependent weak quotient.
//! * [`models`] — built-in systems (three low-dimensional examples, a
//!   mechanics demo, electromagnetism, metric-affine gravity) with known
//!   kernels, solution families, and expected-fact tables.
//! * [`cli`] / [`systemfile`] — the `msym` command-line front end and its
//!   TOML system-file format with a small coordinate-expression grammar.
//!
//! Every operation is a pure function of point data; values are immutable
//! after construction and safe to share across threads.
//!
//! The `examples/` directory has one runnable walk-through per capability;
//! start with `cargo run --example r8_counterexample`.

pub mod cli;
pub mod error;
pub mod exterior;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod reduction;
pub mod report;
pub mod sections;
pub mod solutions;
pub mod system;
pub mod systemfile;

pub use error::{Error, Result};
pub use exterior::{
    FiberedChart, FormField, FormValue, IndexSet, JetChartMeta, MultivectorValue, ScalarField,
    VectorField, VectorValue,
};
pub use report::Verdict;
pub use sections::Section;
pub use solutions::Distribution;
pub use system::{PremultisymplecticSystem, RunConfig, Tolerances};
