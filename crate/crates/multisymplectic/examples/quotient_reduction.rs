//! Quotient by the kernel distribution in kernel-adapted coordinates.
//!
//! Dropping the kernel coordinate `v` of the 8-dimensional example produces
//! a 7-dimensional chart with a multisymplectic (closed, 1-nondegenerate)
//! reduced form; sections transport both ways, and any slice value recovers
//! a solution.
//!
//! Run with `cargo run --example quotient_reduction`.

use multisymplectic::exterior::{exterior_derivative_fd, pullback_linear};
use multisymplectic::kernels;
use multisymplectic::models::simple;
use multisymplectic::reduction::{build_quotient, project_section, recover_section};
use multisymplectic::sections::section_is_solution;
use multisymplectic::system::RunConfig;

fn main() {
    let model = simple::r8();
    let cfg = RunConfig::default();
    let points = model.sample(&cfg);

    let reduced = build_quotient(&model.system, &[6], &[0.0], &points, 1e-5, 1e-10)
        .expect("∂v spans the kernel distribution");
    println!(
        "built the quotient dropping `v`: kernel residual {:.1e}, slice dependence {:.1e}",
        reduced.certificate.kernel_residual, reduced.certificate.slice_dependence
    );
    println!("reduced chart: {:?}", reduced.system.chart().names());

    let p0 = &points[0];
    let red0 = reduced.quotient.forget(p0);
    println!(
        "\nΩ_K at a sample image: {}",
        reduced.system.omega().at(&red0)
    );

    let pulled = pullback_linear(
        &reduced.quotient.xi_jacobian(),
        &reduced.system.omega().at(&red0),
    );
    println!(
        "ξ*Ω_K − Ω coefficient difference: {:.1e}",
        pulled.sub(&model.system.omega().at(p0)).max_norm()
    );

    let d = exterior_derivative_fd(reduced.system.omega(), &red0, 1e-5);
    let (nondeg, _) = kernels::is_1_nondegenerate(&reduced.system.omega().at(&red0), 1e-9);
    println!(
        "dΩ_K residual {:.1e}; 1-nondegenerate: {nondeg}",
        d.max_norm()
    );

    // a parent solution projects to a reduced solution; any slice recovers
    let section = model.section("const").unwrap();
    let base_points: Vec<Vec<f64>> = points.iter().map(|p| p[..2].to_vec()).collect();
    let projected = project_section(&section, &reduced.quotient);
    let (ok, res) = section_is_solution(&projected, &reduced.system, &base_points, 1e-5, 1e-8);
    println!("\nprojected section solves the reduced system: {ok} (residual {res:.1e})");
    for beta in [0.0, 7.3] {
        let recovered = recover_section(&projected, &reduced.quotient.with_beta(vec![beta]));
        let (ok, res) = section_is_solution(&recovered, &model.system, &base_points, 1e-5, 1e-8);
        println!(
            "recovered with v = {beta}: solves the original system: {ok} (residual {res:.1e})"
        );
    }

    // dropping a non-kernel direction aborts with a witness
    match build_quotient(&model.system, &[5], &[0.0], &points, 1e-5, 1e-10) {
        Err(e) => println!("\ndropping `u` is rejected: {e}"),
        Ok(_) => unreachable!("∂u is not a kernel direction"),
    }
}
