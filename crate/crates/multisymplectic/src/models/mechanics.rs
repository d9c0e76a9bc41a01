//! Mechanics over a one-dimensional base: a closed 2-form whose kernel
//! contains one transverse direction (the dynamics) plus vertical gauge
//! directions. Quotienting by the vertical part `G = ker¹Ω ∩ V(π)` leaves a
//! reduced 2-form whose kernel is exactly the one-dimensional dynamics and
//! whose vertical kernel is trivial.

use serde_json::json;

use crate::error::{Error, Result};
use crate::exterior::{exterior_derivative_fd, FiberedChart, FormField, FormValue};
use crate::kernels;
use crate::models::{closedness_fact, Fact, ModelSpec};
use crate::reduction;
use crate::report::Verdict;
use crate::system::PremultisymplecticSystem;

/// One 2-form term `c(ξ)·dξ_i∧dξ_j` with an affine coefficient
/// `c(ξ) = c0 + Σ grad_k ξ_k`.
#[derive(Debug, Clone)]
pub struct MechTerm {
    pub c0: f64,
    pub grad: Vec<f64>,
    pub i: usize,
    pub j: usize,
}

impl MechTerm {
    pub fn constant(c0: f64, i: usize, j: usize) -> Self {
        MechTerm {
            c0,
            grad: vec![],
            i,
            j,
        }
    }
}

/// Parameters of the mechanics demo on the chart `(t; q, p, z, w)`.
#[derive(Debug, Clone)]
pub struct Params {
    pub terms: Vec<MechTerm>,
}

impl Default for Params {
    /// `Ω = dp∧dq + dq∧dt`: kernel `⟨∂t + ∂p, ∂z, ∂w⟩` (transverse, dim 3),
    /// vertical part `G = ⟨∂z, ∂w⟩`.
    fn default() -> Self {
        Params {
            terms: vec![MechTerm::constant(1.0, 2, 1), MechTerm::constant(1.0, 1, 0)],
        }
    }
}

pub fn chart() -> FiberedChart {
    FiberedChart::from_names(&["t"], &["q", "p", "z", "w"])
}

/// Build the demo model; errors when the supplied 2-form is not closed
/// (checked by finite differences at scattered points).
pub fn model(params: &Params) -> Result<ModelSpec> {
    let ch = chart();
    let dim = ch.dim();
    let terms = params.terms.clone();
    for t in &terms {
        if t.i >= dim || t.j >= dim || t.i == t.j {
            return Err(Error::InvalidInput(format!(
                "bad term indices ({}, {})",
                t.i, t.j
            )));
        }
    }
    let omega = FormField::new(ch.clone(), 2, move |p| {
        let mut w = FormValue::zero(dim, 2);
        for t in &terms {
            let mut c = t.c0;
            for (k, g) in t.grad.iter().enumerate() {
                c += g * p[k];
            }
            w.add_term(&[t.i, t.j], c);
        }
        w
    });

    // closedness gate before the model is handed out
    for p in [
        [0.0; 5],
        [0.3, -0.4, 0.8, 0.1, -0.9],
        [1.1, 0.7, -0.2, 0.5, 0.3],
    ] {
        let d = exterior_derivative_fd(&omega, &p, 1e-5);
        if d.max_norm() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "supplied 2-form is not closed (dΩ residual {:.3e})",
                d.max_norm()
            )));
        }
    }

    let system = PremultisymplecticSystem::new("mechanics", omega);
    let mut model = ModelSpec::new("mechanics", system);
    model.facts = vec![
        closedness_fact(),
        Fact::new(
            "gauge codimension",
            "the vertical kernel G has codimension 1 in ker¹Ω",
            |model, cfg| {
                let chart = model.system.chart();
                let mut pass = true;
                let mut worst: f64 = 0.0;
                let mut dims = (0usize, 0usize);
                for p in model.sample(cfg) {
                    let omega = model.system.omega().at(&p);
                    let rep = kernels::kernel_distribution_point(&omega, chart, cfg.tol.rank);
                    pass &= rep.k_dim + 1 == rep.ker1_dim;
                    dims = (rep.ker1_dim, rep.k_dim);
                    worst = worst.max(rep.max_residual);
                }
                Verdict::new("gauge codimension", "", pass, worst)
                    .with_witness(json!({ "ker1_dim": dims.0, "vertical_dim": dims.1 }))
            },
        ),
        Fact::new(
            "gauge quotient",
            "quotient by G leaves exactly the 1-dimensional dynamics kernel",
            quotient_fact,
        ),
    ];
    Ok(model)
}

/// Fiber coordinate indices spanning `G = ker¹Ω ∩ V(π)` for the default
/// instance.
pub fn default_gauge_directions() -> Vec<usize> {
    vec![3, 4]
}

fn quotient_fact(model: &ModelSpec, cfg: &crate::system::RunConfig) -> Verdict {
    let points = model.sample(cfg);
    let dropped = default_gauge_directions();
    let beta = vec![0.0; dropped.len()];
    let reduced = match reduction::build_quotient(
        &model.system,
        &dropped,
        &beta,
        &points,
        cfg.tol.fd_step,
        cfg.tol.algebraic,
    ) {
        Ok(r) => r,
        Err(e) => {
            return Verdict::new("gauge quotient", "", false, f64::NAN)
                .with_witness(json!({ "error": e.to_string() }))
        }
    };
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for p in &points {
        let red = reduced.quotient.forget(p);
        let omega_red = reduced.system.omega().at(&red);
        let rep =
            kernels::kernel_distribution_point(&omega_red, reduced.system.chart(), cfg.tol.rank);
        // dynamics survives, gauge does not
        pass &= rep.ker1_dim == 1 && rep.k_dim == 0;
        worst = worst.max(rep.max_residual);
        let d = exterior_derivative_fd(reduced.system.omega(), &red, cfg.tol.fd_step);
        pass &= d.max_norm() <= cfg.tol.fd;
        worst = worst.max(d.max_norm());
    }
    Verdict::new("gauge quotient", "", pass, worst)
        .with_witness(json!({ "slice_dependence": reduced.certificate.slice_dependence }))
}
