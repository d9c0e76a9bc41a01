//! Metric-affine gravity: kernel freedom of the connection, solution
//! classes, the torsion-trace representative, and the trace quotient.
//!
//! Run with `cargo run --example metric_affine_gravity` (release profile
//! recommended for the quotient part).

use multisymplectic::exterior::interior;
use multisymplectic::models::metric_affine as ma;
use multisymplectic::reduction::{build_quotient, project_section, recover_section};
use multisymplectic::sections::section_is_solution;
use multisymplectic::solutions::{is_expanded_solution_point, kernel_related};
use multisymplectic::system::RunConfig;
use multisymplectic::Section;
use rand::Rng;

fn main() {
    let model = ma::model();
    let cfg = RunConfig {
        points: 3,
        ..RunConfig::default()
    };
    let points = model.sample(&cfg);
    println!(
        "sampled {} points on the torsion constraint locus (worst residual {:.1e})",
        points.len(),
        points
            .iter()
            .map(|p| ma::locus_residual(p))
            .fold(0.0f64, f64::max)
    );

    let p = &points[0];
    let omega = model.system.omega().at(p);
    println!(
        "Ω has {} sparse terms at the first point",
        omega.coeffs().len()
    );

    for (name, field) in ma::kernel_fields() {
        let res = interior(&field.at(p), &omega).max_norm();
        println!("kernel field {name}: contraction residual {res:.1e}");
    }

    // seeded solution family and its kernel-related classes
    let mut rng = cfg.rng();
    let k1 = ma::random_k_seed(&mut rng);
    let k2 = ma::random_k_seed(&mut rng);
    let c1 = ma::random_c(&mut rng);
    let c2 = ma::random_c(&mut rng);
    let member = ma::solution_family(c1, k1);
    let (ok, _) = is_expanded_solution_point(&member, &omega, p, 1e-6);
    println!("\nseeded (C, K) member solves on the locus: {ok}");
    let same_k = ma::solution_family(c2, k1);
    let diff_k = ma::solution_family(c1, k2);
    println!(
        "same K, different C related: {}",
        kernel_related(&member, &same_k, &model.system, &points, 1e-6).0
    );
    println!(
        "different K related: {}",
        kernel_related(&member, &diff_k, &model.system, &points, 1e-6).0
    );

    // the torsion-trace condition picks one C per class
    let (c_fix, rank, residual) = ma::fix_torsion_trace(&k1, p);
    println!(
        "\ntorsion-trace fix: linear map rank {rank}/16, residual after solving {residual:.1e}"
    );
    println!("  C[0] row of the representative: {:?}", c_fix[0]);

    // quotient by the four trace coordinates (kernel-adapted chart)
    let adapted = ma::adapted_system();
    let ad_points: Vec<Vec<f64>> = points.iter().map(|q| ma::parent_to_adapted(q)).collect();
    let reduced = build_quotient(
        &adapted,
        &[14, 15, 16, 17],
        &[0.0; 4],
        &ad_points,
        1e-6,
        1e-6,
    )
    .expect("trace directions are kernel directions");
    println!(
        "\ntrace quotient: reduced dim {}, kernel residual {:.1e}, slice dependence {:.1e}",
        reduced.system.dim(),
        reduced.certificate.kernel_residual,
        reduced.certificate.slice_dependence
    );

    // flat space transports through the quotient and back
    let flat = Section::from_fiber_map(ma::adapted_chart(), |_| {
        let mut fiber = vec![0.0; 74];
        fiber[0] = -1.0;
        fiber[4] = 1.0;
        fiber[7] = 1.0;
        fiber[9] = 1.0;
        fiber
    });
    let base: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    let projected = project_section(&flat, &reduced.quotient);
    let (ok_red, _) = section_is_solution(&projected, &reduced.system, &base, 1e-6, 1e-6);
    let recovered = recover_section(&projected, &reduced.quotient.with_beta(vec![0.3; 4]));
    let (ok_back, _) = section_is_solution(&recovered, &adapted, &base, 1e-6, 1e-6);
    println!(
        "flat section: solves reduced system {ok_red}, recovered with c = 0.3 solves {ok_back}"
    );
}
