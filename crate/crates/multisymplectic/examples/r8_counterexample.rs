//! Kernel-relatedness is not transitive in general.
//!
//! The chart is `(x, y; q, px, py, u, v, w)` with
//! `Ω = dq∧dpˣ∧dy − dq∧dpʸ∧dx + dq∧du∧dw`. Three rank-3 expanded solutions
//! `D1, D2, D3` differ only in their vertical generator (`∂u`, `∂v`, `∂w`);
//! `D1 ∼ D2` and `D2 ∼ D3`, but `D1 + D3` is not an expanded solution.
//!
//! Run with `cargo run --example r8_counterexample`.

use multisymplectic::kernels::{self, kernel_distribution_point};
use multisymplectic::models::simple;
use multisymplectic::solutions::{equivalence_probe, is_expanded_solution_point, kernel_related};
use multisymplectic::system::RunConfig;

fn main() {
    let model = simple::r8();
    let cfg = RunConfig::default();
    let points = model.sample(&cfg);
    let origin = vec![0.0; 8];

    let omega = model.system.omega().at(&origin);
    println!("Ω at the origin: {omega}");

    let report = kernel_distribution_point(&omega, model.system.chart(), 1e-9);
    println!(
        "\nkernel distribution K = ker¹Ω ∩ V(π): dimension {} (residual {:.1e})",
        report.k_dim, report.max_residual
    );
    for b in &report.k_basis {
        println!("  basis vector: {:?}", b.components());
    }

    for name in ["D1", "D2", "D3"] {
        let d = model.distribution(name).unwrap();
        let (ok, _) = is_expanded_solution_point(&d, &omega, &origin, 1e-10);
        println!("{name} is an expanded solution: {ok}");
    }

    println!();
    for (a, b) in [("D1", "D2"), ("D2", "D3"), ("D1", "D3")] {
        let da = model.distribution(a).unwrap();
        let db = model.distribution(b).unwrap();
        let (related, witness) = kernel_related(&da, &db, &model.system, &points, 1e-10);
        match witness {
            None => println!("{a} ~ {b}: {related}"),
            Some(w) => println!(
                "{a} ~ {b}: {related}   witness wedge of generators {:?} contracts to {}",
                w.generator_indices, w.contraction
            ),
        }
    }

    let family: Vec<(String, _)> = ["D1", "D2", "D3"]
        .iter()
        .map(|n| (n.to_string(), model.distribution(n).unwrap()))
        .collect();
    let graph = equivalence_probe(&family, &model.system, &points, 1e-10);
    println!("\nrelation graph edges: {:?}", graph.edges);
    println!("transitivity failures: {:?}", graph.transitivity_failures);

    // the vertical extension space of the trivial solution ⟨∂x, ∂y⟩ is larger
    // than K: this form is not variational, so expanded solutions are not
    // exhausted by kernel augmentation.
    let ext = kernels::expanded_extension_space(
        &[
            multisymplectic::exterior::VectorValue::basis(8, 0),
            multisymplectic::exterior::VectorValue::basis(8, 1),
        ],
        &omega,
        model.system.chart(),
        1e-9,
    )
    .unwrap();
    println!(
        "\nvertical extensions of ⟨∂x, ∂y⟩: dimension {} vs dim K = {}",
        ext.len(),
        report.k_dim
    );
    let (variational, witness) = kernels::is_variational_point(&omega, model.system.chart(), 1e-10);
    println!(
        "variational: {variational} (witness triple {:?})",
        witness.map(|w| w.triple)
    );
}
