//! Classification of expanded solutions for a variational system.
//!
//! For forms of the local variational shape, triple vertical contractions
//! vanish; then every expanded solution splits as a rank-m solution plus a
//! piece of the kernel distribution, vertical extensions coincide with the
//! kernel, and kernel-relatedness is an equivalence relation. This example
//! draws a random variational system, builds a solution frame by a linear
//! solve, augments it with kernel directions, and checks all three facts.
//!
//! Run with `cargo run --example variational_classification`.

use multisymplectic::kernels;
use multisymplectic::linalg;
use multisymplectic::models::variational;
use multisymplectic::solutions::{equivalence_probe, theorem_decomposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed = 12;
    let inst = variational::random_instance(seed);
    println!(
        "system `{}`: base dim {}, fiber dim {}, designated kernel directions {:?}",
        inst.system.name(),
        inst.m,
        inst.n,
        inst.kernel_dirs
    );

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let points: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            (0..inst.system.dim())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect();

    let p = &points[0];
    let omega = inst.system.omega().at(p);
    let (variational, _) = kernels::is_variational_point(&omega, inst.system.chart(), 1e-10);
    println!("variational at the first sample point: {variational}");

    let (frame, lin_res) = inst.solve_frame_at(p);
    println!("\nminimum-norm solution frame (linear solve residual {lin_res:.2e}):");
    for (mu, v) in frame.iter().enumerate() {
        println!("  X_{mu} = {:?}", v.components());
    }

    // vertical extensions = span(K), an instance of the kernel
    // characterization of expanded solutions
    let ext = kernels::expanded_extension_space(&frame, &omega, inst.system.chart(), 1e-9).unwrap();
    let kernel = kernels::kernel_distribution_point(&omega, inst.system.chart(), 1e-9);
    let residual = linalg::span_equality_residual(
        &ext.iter().map(|v| v.as_dvector()).collect::<Vec<_>>(),
        &kernel
            .k_basis
            .iter()
            .map(|v| v.as_dvector())
            .collect::<Vec<_>>(),
    );
    println!(
        "\nextension space dim {} vs kernel dim {}; span residual {residual:.2e}",
        ext.len(),
        kernel.k_dim
    );

    // kernel augmentation generates an equivalence class
    let family = inst.expanded_family(5, 7);
    let graph = equivalence_probe(&family, &inst.system, &points, 1e-8);
    println!(
        "\nfamily of {} expanded solutions: {} related pairs, {} transitivity failures",
        family.len(),
        graph.edges.len(),
        graph.transitivity_failures.len()
    );

    // each member decomposes as H + (subset of K)
    for (label, dist) in &family {
        let rep = theorem_decomposition(dist, &inst.system, p, 1e-7).unwrap();
        println!(
            "  {label}: H solves ({}), B ⊂ K ({}, residual {:.2e})",
            rep.h_is_solution, rep.b_in_kernel, rep.b_kernel_residual
        );
    }
}
