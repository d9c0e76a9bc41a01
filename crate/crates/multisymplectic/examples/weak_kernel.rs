//! Weak kernel directions and the slice-dependent quotient.
//!
//! On jet charts, admissible sections are the holonomic ones; a vertical
//! direction is a *weak* kernel direction when its contraction with Ω lies
//! in the contact ideal, so that every holonomic pullback kills it. The
//! quotient by such directions exists but depends on the chosen slice.
//!
//! Run with `cargo run --example weak_kernel`.

use multisymplectic::exterior::{contact_substitute, interior};
use multisymplectic::models::em;
use multisymplectic::reduction::{recover_section, weak_quotient};
use multisymplectic::sections::{holonomy_residual, prolong_holonomic, section_is_solution};
use multisymplectic::system::RunConfig;
use multisymplectic::Section;

fn main() {
    let model = em::model();
    let cfg = RunConfig {
        points: 4,
        ..RunConfig::default()
    };
    let points = model.sample(&cfg);
    let p = &points[0];

    // the contact substitution sends i(∂A_(β,j))Ω to zero…
    let omega = model.system.omega().at(p);
    let velocity_dir = em::Indexing::velocity(2, 1);
    let contracted = interior(
        &multisymplectic::exterior::VectorValue::basis(em::DIM, velocity_dir),
        &omega,
    );
    let substituted = contact_substitute(&contracted, model.system.chart(), p).unwrap();
    println!(
        "i(∂A_(2,1))Ω has {} terms; after the contact substitution: {} terms (residual {:.1e})",
        contracted.coeffs().len(),
        substituted.coeffs().len(),
        substituted.max_norm()
    );

    // …but not i(∂A_α)Ω
    let field_dir = em::Indexing::field(0);
    let contracted = interior(
        &multisymplectic::exterior::VectorValue::basis(em::DIM, field_dir),
        &omega,
    );
    let substituted = contact_substitute(&contracted, model.system.chart(), p).unwrap();
    println!(
        "i(∂A_0)Ω after substitution: residual {:.2} — not a weak kernel direction",
        substituted.max_norm()
    );

    // quotient by all sixteen velocity directions
    let mut dropped: Vec<usize> = (0..4)
        .flat_map(|a| (0..4).map(move |m| em::Indexing::velocity(a, m)))
        .collect();
    dropped.sort_unstable();
    let reduced = weak_quotient(&model.system, &dropped, &[0.0; 16], &points, 1e-8).unwrap();
    println!(
        "\nweak quotient by the velocities: reduced chart dim {}, slice dependence {:.1e}",
        reduced.system.dim(),
        reduced.certificate.slice_dependence
    );
    println!(
        "Ω_β on the zero-velocity slice: {}",
        reduced.system.omega().at(&reduced.quotient.forget(p))
    );

    // recovered sections must be re-prolonged to become admissible
    let base_points: Vec<Vec<f64>> = points.iter().map(|q| q[..4].to_vec()).collect();
    let sloped = Section::from_fiber_map(reduced.quotient.reduced_chart().clone(), |x| {
        vec![x[1], 0.0, 0.0, 0.0]
    });
    let recovered = recover_section(&sloped, &reduced.quotient);
    println!(
        "\nβ-completion of the potential A₀ = x¹: contact residual {:.2} (not admissible)",
        holonomy_residual(&recovered, &base_points, 1e-5)
    );
    let prolonged = prolong_holonomic(&em::chart(), |x| vec![x[1], 0.0, 0.0, 0.0], 1e-5).unwrap();
    let contact = holonomy_residual(&prolonged, &base_points, 1e-5);
    let (solves, res) = section_is_solution(&prolonged, &model.system, &base_points, 1e-5, 1e-6);
    println!(
        "its holonomic prolongation: contact residual {contact:.1e}, solves the system: {solves} ({res:.1e})"
    );
}
