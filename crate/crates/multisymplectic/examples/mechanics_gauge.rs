//! Mechanics over a 1-dimensional base: the kernel of a presymplectic
//! 2-form splits into one transverse direction (the dynamics) and vertical
//! gauge directions; quotienting the gauge away leaves exactly the dynamics.
//!
//! Run with `cargo run --example mechanics_gauge`.

use multisymplectic::kernels::kernel_distribution_point;
use multisymplectic::models::mechanics;
use multisymplectic::reduction::build_quotient;
use multisymplectic::system::RunConfig;

fn main() {
    let model = mechanics::model(&mechanics::Params::default()).unwrap();
    let cfg = RunConfig::default();
    let points = model.sample(&cfg);
    let p = &points[0];

    println!("chart: {:?}", model.system.chart().names());
    println!("Ω = {}", model.system.omega().at(p));

    let omega = model.system.omega().at(p);
    let report = kernel_distribution_point(&omega, model.system.chart(), 1e-9);
    println!("\nker¹Ω dimension: {}", report.ker1_dim);
    println!("vertical part G = ker¹Ω ∩ V(π) dimension: {}", report.k_dim);
    for v in &report.ker1_basis {
        println!("  kernel vector: {:?}", v.components());
    }
    println!(
        "G has codimension {} in ker¹Ω",
        report.ker1_dim - report.k_dim
    );

    let reduced = build_quotient(
        &model.system,
        &mechanics::default_gauge_directions(),
        &[0.0, 0.0],
        &points,
        1e-5,
        1e-10,
    )
    .expect("gauge directions are kernel directions");
    println!("\nreduced chart: {:?}", reduced.system.chart().names());

    let red = reduced.quotient.forget(p);
    let rep = kernel_distribution_point(
        &reduced.system.omega().at(&red),
        reduced.system.chart(),
        1e-9,
    );
    println!(
        "reduced kernel: dimension {} with vertical part {} — the single surviving direction is the dynamics",
        rep.ker1_dim, rep.k_dim
    );
    for v in &rep.ker1_basis {
        println!("  reduced kernel vector: {:?}", v.components());
    }

    // a non-closed 2-form is rejected up front
    let bad = mechanics::Params {
        terms: vec![mechanics::MechTerm {
            c0: 0.0,
            grad: vec![0.0, 0.0, 1.0, 0.0, 0.0],
            i: 1,
            j: 0,
        }],
    };
    match mechanics::model(&bad) {
        Err(e) => println!("\nnon-closed input rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
