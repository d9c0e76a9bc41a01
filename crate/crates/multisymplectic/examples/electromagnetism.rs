//! Electromagnetism on the first-jet chart: the kernel describes exactly the
//! `S`-multiplicity of the solution family, and the classical gauge
//! transformation is a Lagrangian symmetry without being a kernel direction.
//!
//! Run with `cargo run --example electromagnetism`.

use multisymplectic::kernels::kernel_distribution_point;
use multisymplectic::models::em;
use multisymplectic::sections::{lagrangian_symmetry_check, weak_kernel_test};
use multisymplectic::solutions::{is_expanded_solution_point, kernel_related};
use multisymplectic::system::RunConfig;

fn main() {
    let model = em::model();
    let cfg = RunConfig::default();
    let points = model.sample(&cfg);
    let p = &points[0];

    let omega = model.system.omega().at(p);
    println!(
        "Ω has {} sparse terms at a random point",
        omega.coeffs().len()
    );

    let report = kernel_distribution_point(&omega, model.system.chart(), 1e-9);
    println!(
        "kernel dimension: {} (the symmetric velocity pairs ∂A_(α,μ) + ∂A_(μ,α))",
        report.k_dim
    );

    // the three-function solution family
    let mut rng = cfg.rng();
    let a = em::Rst::random(&mut rng);
    let b = em::Rst::random(&mut rng);
    let da = em::solution_family(&a);
    let (ok, _) = is_expanded_solution_point(&da, &omega, p, 1e-8);
    println!("\nseeded (R,S,T) member solves the field equations: {ok}");

    let cases = [
        (
            "S changed",
            em::Rst {
                s: b.s,
                ..a.clone()
            },
        ),
        (
            "R changed",
            em::Rst {
                r: b.r,
                ..a.clone()
            },
        ),
        (
            "T changed",
            em::Rst {
                t: b.t,
                ..a.clone()
            },
        ),
    ];
    for (label, other) in cases {
        let (related, _) = kernel_related(
            &da,
            &em::solution_family(&other),
            &model.system,
            &points,
            1e-8,
        );
        println!("  {label}: kernel related = {related}");
    }

    // velocity directions are weak kernel directions; the gauge lift is not
    let dir = multisymplectic::exterior::VectorField::coordinate(
        em::chart(),
        em::Indexing::velocity(1, 2),
    );
    let (weak, _) = weak_kernel_test(&dir, &model.system, &points, 1e-8).unwrap();
    println!("\n∂/∂A_(1,2) is a weak kernel direction: {weak}");

    let yf = em::gauge_lift(|x| x[0] * x[1], 1e-4);
    let (weak, res) = weak_kernel_test(&yf, &model.system, &points, 1e-8).unwrap();
    println!("gauge lift Y_f (f = x⁰x¹) weak kernel: {weak} (residual {res:.2e})");
    let sym = lagrangian_symmetry_check(&yf, &em::lagrangian(), &model.system, &points, 1e-5, 1e-5);
    println!(
        "gauge lift is a Lagrangian symmetry: L_Y L ≈ 0 ({:.1e}), L_Y Ω ≈ 0 ({:.1e})",
        sym.lie_lagrangian_residual, sym.lie_omega_residual
    );

    // holonomy pins R = 0: the ∂A coefficients must equal the velocities
    let no_r = em::Rst {
        r: [[0.0; 4]; 4],
        ..a
    };
    let mut max_dev: f64 = 0.0;
    for (mu, g) in em::solution_family(&no_r).generators().iter().enumerate() {
        let v = g.at(p);
        for alpha in 0..4 {
            let dev = (v.components()[em::Indexing::field(alpha)]
                - p[em::Indexing::velocity(alpha, mu)])
            .abs();
            max_dev = max_dev.max(dev);
        }
    }
    println!("\nR = 0 member satisfies the holonomy condition G = A: deviation {max_dev:.1e}");
}
