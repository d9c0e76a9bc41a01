//! Three low-dimensional systems over a two-dimensional base that
//! together map out where kernel-relatedness behaves and where it breaks:
//!
//! * `r8` — kernel-relatedness is NOT transitive: `D1 ∼ D2`, `D2 ∼ D3`, yet
//!   `D1 + D3` is not an expanded solution.
//! * `r5` — non-variational, no non-trivial expanded solutions.
//! * `r6` — non-variational with trivial kernel, yet a non-trivial expanded
//!   solution exists: variationality is sufficient, not necessary.

use serde_json::json;

use crate::exterior::{FiberedChart, FormField, FormValue, VectorField, VectorValue};
use crate::kernels;
use crate::linalg;
use crate::models::{closedness_fact, Fact, ModelSpec};
use crate::report::Verdict;
use crate::sections::Section;
use crate::solutions::{self, Distribution};
use crate::system::PremultisymplecticSystem;

/// `Ω = dq∧dpˣ∧dy − dq∧dpʸ∧dx + dq∧du∧dw` on the chart
/// `(x, y; q, pˣ, pʸ, u, v, w)`.
pub fn r8() -> ModelSpec {
    let chart = FiberedChart::from_names(&["x", "y"], &["q", "px", "py", "u", "v", "w"]);
    let mut omega = FormValue::zero(8, 3);
    omega.add_term(&[2, 3, 1], 1.0);
    omega.add_term(&[2, 4, 0], -1.0);
    omega.add_term(&[2, 5, 7], 1.0);
    let system = PremultisymplecticSystem::new("r8", FormField::constant(chart.clone(), omega));

    let dist = |idx: usize| Distribution::from_coordinates(chart.clone(), &[0, 1, idx]);
    let mut model = ModelSpec::new("r8", system);
    model.known_kernel = vec![("dv".to_string(), VectorField::coordinate(chart.clone(), 6))];
    model.distributions = vec![
        ("D1".to_string(), dist(5)),
        ("D2".to_string(), dist(6)),
        ("D3".to_string(), dist(7)),
    ];
    model.sections = vec![
        (
            "const".to_string(),
            constant_section(&chart, &[0.5, -0.25, 1.0, 0.75, 7.0, -2.0]),
        ),
        (
            "const_v_shift".to_string(),
            constant_section(&chart, &[0.5, -0.25, 1.0, 0.75, 3.5, -2.0]),
        ),
        (
            "const_u_shift".to_string(),
            constant_section(&chart, &[0.5, -0.25, 1.0, 2.25, 7.0, -2.0]),
        ),
    ];

    model.facts = vec![
        closedness_fact(),
        kernel_fact("kernel", "K = ⟨∂v⟩", 1, vec![6]),
        related_fact("related D1 D2", "D1", "D2", true),
        related_fact("related D2 D3", "D2", "D3", true),
        related_fact("related D1 D3", "D1", "D3", false),
        Fact::new(
            "probe",
            "the only transitivity failure is (D1, D2, D3)",
            |model, cfg| {
                let points = model.sample(cfg);
                let graph = solutions::equivalence_probe(
                    &model.distributions,
                    &model.system,
                    &points,
                    1e-10,
                );
                let pass = graph.transitivity_failures == vec![(0, 1, 2)]
                    && graph.edges == vec![(0, 1), (1, 2)]
                    && graph.non_expanded.is_empty();
                Verdict::new("probe", "D1 D2 D3", pass, 0.0)
                    .with_witness(json!(graph.transitivity_failures))
            },
        ),
        variational_fact(false, Some([2, 5, 7])),
        Fact::new(
            "extension space",
            "vertical extensions of ⟨∂x,∂y⟩ span {∂u, ∂v, ∂w}",
            |model, cfg| {
                let chart = model.system.chart();
                let mut worst: f64 = 0.0;
                for p in model.sample(cfg) {
                    let omega = model.system.omega().at(&p);
                    let ext = kernels::expanded_extension_space(
                        &[VectorValue::basis(8, 0), VectorValue::basis(8, 1)],
                        &omega,
                        chart,
                        cfg.tol.rank,
                    )
                    .expect("transverse span");
                    let got: Vec<_> = ext.iter().map(|v| v.as_dvector()).collect();
                    let want: Vec<_> = [5usize, 6, 7]
                        .iter()
                        .map(|&i| VectorValue::basis(8, i).as_dvector())
                        .collect();
                    worst = worst.max(linalg::span_equality_residual(&got, &want));
                }
                Verdict::new("extension space", "span{dx,dy}", worst <= 1e-9, worst)
            },
        ),
        kernel_augmentation_fact(),
    ];
    model
}

/// `Ω = dq∧dpˣ∧dy − dq∧dpʸ∧dx + dq∧dpˣ∧dpʸ` on `(x, y; q, pˣ, pʸ)`:
/// multisymplectic, not variational, no non-trivial expanded solutions.
pub fn r5() -> ModelSpec {
    let chart = FiberedChart::from_names(&["x", "y"], &["q", "px", "py"]);
    let mut omega = FormValue::zero(5, 3);
    omega.add_term(&[2, 3, 1], 1.0);
    omega.add_term(&[2, 4, 0], -1.0);
    omega.add_term(&[2, 3, 4], 1.0);
    let system = PremultisymplecticSystem::new("r5", FormField::constant(chart.clone(), omega));

    let mut model = ModelSpec::new("r5", system);
    model.distributions = vec![(
        "D".to_string(),
        Distribution::from_coordinates(chart.clone(), &[0, 1]),
    )];
    model.facts = vec![
        closedness_fact(),
        kernel_fact("kernel", "ker¹ = {0}", 0, vec![]),
        variational_fact(false, Some([2, 3, 4])),
        Fact::new(
            "extension space",
            "no vertical extension of the trivial solution ⟨∂x,∂y⟩",
            |model, cfg| {
                let mut worst_dim = 0usize;
                for p in model.sample(cfg) {
                    let omega = model.system.omega().at(&p);
                    let ext = kernels::expanded_extension_space(
                        &[VectorValue::basis(5, 0), VectorValue::basis(5, 1)],
                        &omega,
                        model.system.chart(),
                        cfg.tol.rank,
                    )
                    .expect("transverse span");
                    worst_dim = worst_dim.max(ext.len());
                }
                Verdict::new(
                    "extension space",
                    "span{dx,dy}",
                    worst_dim == 0,
                    worst_dim as f64,
                )
            },
        ),
    ];
    model
}

/// `Ω = dq∧dpˣ∧dy − dq∧dpʸ∧dx + du∧dpˣ∧dpʸ` on `(x, y; q, pˣ, pʸ, u)`:
/// trivial kernel and non-variational, yet `⟨∂x, ∂y, ∂u⟩` is a non-trivial
/// expanded solution.
pub fn r6() -> ModelSpec {
    let chart = FiberedChart::from_names(&["x", "y"], &["q", "px", "py", "u"]);
    let mut omega = FormValue::zero(6, 3);
    omega.add_term(&[2, 3, 1], 1.0);
    omega.add_term(&[2, 4, 0], -1.0);
    omega.add_term(&[5, 3, 4], 1.0);
    let system = PremultisymplecticSystem::new("r6", FormField::constant(chart.clone(), omega));

    let mut model = ModelSpec::new("r6", system);
    model.distributions = vec![(
        "D".to_string(),
        Distribution::from_coordinates(chart.clone(), &[0, 1, 5]),
    )];
    model.facts = vec![
        closedness_fact(),
        kernel_fact("kernel", "K = {0}", 0, vec![]),
        variational_fact(false, Some([3, 4, 5])),
        Fact::new(
            "expanded D",
            "⟨∂x, ∂y, ∂u⟩ is a non-trivial expanded solution",
            |model, cfg| {
                let d = model.distribution("D").expect("D");
                let mut worst: f64 = 0.0;
                let mut pass = true;
                for p in model.sample(cfg) {
                    let omega = model.system.omega().at(&p);
                    let (ok, witness) =
                        solutions::is_expanded_solution_point(&d, &omega, &p, 1e-10);
                    pass &= ok;
                    if let Some(w) = witness {
                        worst = worst.max(w.residual);
                    }
                }
                Verdict::new("expanded D", "", pass, worst)
            },
        ),
    ];
    model
}

fn constant_section(chart: &FiberedChart, fiber: &[f64]) -> Section {
    let values = fiber.to_vec();
    Section::from_fiber_map(chart.clone(), move |_| values.clone())
}

fn kernel_fact(name: &str, detail: &str, expect_dim: usize, expect_dirs: Vec<usize>) -> Fact {
    let name_owned = name.to_string();
    Fact::new(name, detail, move |model, cfg| {
        let chart = model.system.chart();
        let mut pass = true;
        let mut worst: f64 = 0.0;
        for p in model.sample(cfg) {
            let omega = model.system.omega().at(&p);
            let report = kernels::kernel_distribution_point(&omega, chart, cfg.tol.rank);
            pass &= report.k_dim == expect_dim;
            worst = worst.max(report.max_residual);
            if !expect_dirs.is_empty() {
                let got: Vec<_> = report.k_basis.iter().map(|v| v.as_dvector()).collect();
                let want: Vec<_> = expect_dirs
                    .iter()
                    .map(|&i| VectorValue::basis(chart.dim(), i).as_dvector())
                    .collect();
                let r = linalg::span_equality_residual(&got, &want);
                pass &= r <= 1e-9;
                worst = worst.max(r);
            }
        }
        Verdict::new(name_owned.clone(), format!("dim {expect_dim}"), pass, worst)
    })
}

fn related_fact(name: &str, d1: &str, d2: &str, expect: bool) -> Fact {
    let (name_o, d1_o, d2_o) = (name.to_string(), d1.to_string(), d2.to_string());
    Fact::new(
        name,
        "kernel-relatedness matches the worked example",
        move |model, cfg| {
            let a = model.distribution(&d1_o).expect("distribution");
            let b = model.distribution(&d2_o).expect("distribution");
            let points = model.sample(cfg);
            let (got, witness) = solutions::kernel_related(&a, &b, &model.system, &points, 1e-10);
            let mut v = Verdict::new(
                name_o.clone(),
                "",
                got == expect,
                if got {
                    0.0
                } else {
                    witness.as_ref().map(|w| w.residual).unwrap_or(f64::NAN)
                },
            );
            if let Some(w) = witness {
                v = v.with_witness(json!({
                    "generators": w.generator_indices,
                    "contraction": w.contraction,
                }));
            }
            v
        },
    )
}

fn variational_fact(expect: bool, expect_triple: Option<[usize; 3]>) -> Fact {
    Fact::new(
        "variational",
        "triple-contraction scan over vertical directions",
        move |model, cfg| {
            let chart = model.system.chart();
            let mut pass = true;
            let mut worst: f64 = 0.0;
            let mut witness = None;
            for p in model.sample(cfg) {
                let omega = model.system.omega().at(&p);
                let (got, wit) = kernels::is_variational_point(&omega, chart, cfg.tol.algebraic);
                pass &= got == expect;
                if let Some(w) = wit {
                    worst = worst.max(w.residual);
                    if let Some(t) = expect_triple {
                        pass &= w.triple == t;
                    }
                    witness = Some(w);
                }
            }
            let mut v = Verdict::new("variational", format!("expect {expect}"), pass, worst);
            if let Some(w) = witness {
                v = v.with_witness(json!({ "triple": w.triple, "residual": w.residual }));
            }
            v
        },
    )
}

/// Adding a reported kernel vector to any generator of an expanded solution
/// preserves the expanded-solution property.
pub(crate) fn kernel_augmentation_fact() -> Fact {
    Fact::new(
        "kernel augmentation",
        "expanded solutions absorb kernel directions",
        |model, cfg| {
            let chart = model.system.chart();
            let points = model.sample(cfg);
            let mut pass = true;
            let mut worst: f64 = 0.0;
            for (_, dist) in &model.distributions {
                for p in &points {
                    let omega = model.system.omega().at(p);
                    if !solutions::is_expanded_solution_point(dist, &omega, p, 1e-10).0 {
                        continue;
                    }
                    let report = kernels::kernel_distribution_point(&omega, chart, cfg.tol.rank);
                    for kv in &report.k_basis {
                        for gi in 0..dist.generators().len() {
                            let shifted = shift_generator(dist, gi, kv.clone());
                            let (ok, wit) =
                                solutions::is_expanded_solution_point(&shifted, &omega, p, 1e-8);
                            pass &= ok;
                            if let Some(w) = wit {
                                worst = worst.max(w.residual);
                            }
                        }
                    }
                }
            }
            Verdict::new("kernel augmentation", "", pass, worst)
        },
    )
}

fn shift_generator(dist: &Distribution, idx: usize, delta: VectorValue) -> Distribution {
    let gens: Vec<VectorField> = dist
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if i == idx {
                let base = g.clone();
                let d = delta.clone();
                VectorField::new(dist.chart().clone(), move |p| base.at(p).add(&d))
            } else {
                g.clone()
            }
        })
        .collect();
    Distribution::new(dist.chart().clone(), gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::RunConfig;

    #[test]
    fn all_simple_fact_tables_pass() {
        let cfg = RunConfig::default();
        for model in [r8(), r5(), r6()] {
            for v in model.run_facts(&cfg, None) {
                assert!(
                    v.pass,
                    "{} fact `{} {}` failed: residual {:.3e}",
                    model.name, v.check, v.args, v.max_residual
                );
            }
        }
    }
}
