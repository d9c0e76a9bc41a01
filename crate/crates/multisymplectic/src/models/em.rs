//! Electromagnetism on the first-jet chart `(x^μ; A_α; A_{α,μ})` with the
//! Minkowski metric `η = diag(−1,1,1,1)` and `μ₀ = 1`.
//!
//! `Ω = dE_L ∧ d⁴x − (η^{αν}η^{μβ} − η^{αβ}η^{μν}) dA_{β,ν} ∧ dA_α ∧ d³x_μ`
//! where `dE_L = F^{ρσ} dA_{ρ,σ}` (the energy is quadratic in the
//! velocities, so its differential is exact in closed form).
//!
//! The kernel is the ten symmetric velocity pairs
//! `∂/∂A_{α,μ} + ∂/∂A_{μ,α}`. Solutions come in the three-parameter family
//! `X_μ = ∂_μ + (A_{α,μ}+R_{α,μ})∂_{A_α} + (T_{αν,μ}+S_{αν,μ})∂_{A_{α,ν}}`
//! with `R` symmetric, `S` symmetric in its first pair, `T` antisymmetric in
//! its first pair and η-traceless; varying `S` alone moves within a
//! kernel-related class.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::exterior::{
    FiberedChart, FormField, FormValue, JetChartMeta, JetPairing, ScalarField, VectorField,
    VectorValue,
};
use crate::kernels;
use crate::models::{closedness_fact, simple::kernel_augmentation_fact, Fact, ModelSpec};
use crate::report::Verdict;
use crate::sections::{self, Section};
use crate::solutions::{self, Distribution};
use crate::system::PremultisymplecticSystem;

pub const DIM: usize = 24;
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];
pub const MU0: f64 = 1.0;

/// Coordinate layout: `x^μ` at `μ`, `A_α` at `4 + α`, `A_{α,μ}` at
/// `8 + 4α + μ`.
#[derive(Debug, Clone, Copy)]
pub struct Indexing;

impl Indexing {
    pub fn base(mu: usize) -> usize {
        mu
    }

    pub fn field(alpha: usize) -> usize {
        4 + alpha
    }

    pub fn velocity(alpha: usize, mu: usize) -> usize {
        8 + 4 * alpha + mu
    }
}

pub fn chart() -> FiberedChart {
    let mut names: Vec<String> = (0..4).map(|m| format!("x{m}")).collect();
    names.extend((0..4).map(|a| format!("A{a}")));
    for a in 0..4 {
        for m in 0..4 {
            names.push(format!("A{a}_{m}"));
        }
    }
    let mut pairings = Vec::new();
    for a in 0..4 {
        for m in 0..4 {
            pairings.push(JetPairing {
                velocity: Indexing::velocity(a, m),
                field: Indexing::field(a),
                base: m,
            });
        }
    }
    FiberedChart::new(4, 20, names).with_jet(JetChartMeta::new(pairings))
}

/// `F_{μν} = A_{ν,μ} − A_{μ,ν}` read off the point.
pub fn faraday_lower(p: &[f64]) -> [[f64; 4]; 4] {
    let mut f = [[0.0; 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            f[m][n] = p[Indexing::velocity(n, m)] - p[Indexing::velocity(m, n)];
        }
    }
    f
}

fn faraday_upper(p: &[f64]) -> [[f64; 4]; 4] {
    let f = faraday_lower(p);
    let mut up = [[0.0; 4]; 4];
    for r in 0..4 {
        for s in 0..4 {
            up[r][s] = ETA[r] * ETA[s] * f[r][s];
        }
    }
    up
}

fn eta2(a: usize, b: usize) -> f64 {
    if a == b {
        ETA[a]
    } else {
        0.0
    }
}

pub fn omega_at(p: &[f64]) -> FormValue {
    let mut w = FormValue::zero(DIM, 5);
    let fup = faraday_upper(p);
    for r in 0..4 {
        for s in 0..4 {
            let c = fup[r][s] / MU0;
            if c != 0.0 {
                w.add_term(&[Indexing::velocity(r, s), 0, 1, 2, 3], c);
            }
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            for n in 0..4 {
                for m in 0..4 {
                    let k = eta2(a, n) * eta2(m, b) - eta2(a, b) * eta2(m, n);
                    if k == 0.0 {
                        continue;
                    }
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let mut idx = vec![Indexing::velocity(b, n), Indexing::field(a)];
                    idx.extend((0..4).filter(|&x| x != m));
                    w.add_term(&idx, -k / MU0 * sign);
                }
            }
        }
    }
    w
}

pub fn lagrangian() -> ScalarField {
    ScalarField::new(chart(), |p| {
        let f = faraday_lower(p);
        let fup = faraday_upper(p);
        let mut s = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                s += fup[m][n] * f[m][n];
            }
        }
        -s / (4.0 * MU0)
    })
}

/// Component functions of a solution family member.
#[derive(Debug, Clone)]
pub struct Rst {
    pub r: [[f64; 4]; 4],
    pub s: [[[f64; 4]; 4]; 4],
    pub t: [[[f64; 4]; 4]; 4],
}

impl Rst {
    pub fn zero() -> Self {
        Rst {
            r: [[0.0; 4]; 4],
            s: [[[0.0; 4]; 4]; 4],
            t: [[[0.0; 4]; 4]; 4],
        }
    }

    /// Project raw arrays onto the admissible space: symmetrize `R`,
    /// symmetrize `S` in its first pair, antisymmetrize `T` in its first pair
    /// and remove its η-trace
    /// (`T' = T − (t_α η_{νμ} − t_ν η_{αμ})/3`, `t_α = η^{νμ} T_{αν,μ}`).
    pub fn project(r0: [[f64; 4]; 4], s0: [[[f64; 4]; 4]; 4], t0: [[[f64; 4]; 4]; 4]) -> Self {
        let mut out = Rst::zero();
        for a in 0..4 {
            for b in 0..4 {
                out.r[a][b] = 0.5 * (r0[a][b] + r0[b][a]);
                for c in 0..4 {
                    out.s[a][b][c] = 0.5 * (s0[a][b][c] + s0[b][a][c]);
                    out.t[a][b][c] = 0.5 * (t0[a][b][c] - t0[b][a][c]);
                }
            }
        }
        let mut trace = [0.0; 4];
        for a in 0..4 {
            for n in 0..4 {
                trace[a] += ETA[n] * out.t[a][n][n];
            }
        }
        for a in 0..4 {
            for n in 0..4 {
                for m in 0..4 {
                    out.t[a][n][m] -= (trace[a] * eta2(n, m) - trace[n] * eta2(a, m)) / 3.0;
                }
            }
        }
        out
    }

    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut r0 = [[0.0; 4]; 4];
        let mut s0 = [[[0.0; 4]; 4]; 4];
        let mut t0 = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                r0[a][b] = rng.gen_range(-1.0..1.0);
                for c in 0..4 {
                    s0[a][b][c] = rng.gen_range(-1.0..1.0);
                    t0[a][b][c] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        Rst::project(r0, s0, t0)
    }

    pub fn eta_trace_of_t(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            let mut tr = 0.0;
            for n in 0..4 {
                tr += ETA[n] * self.t[a][n][n];
            }
            worst = worst.max(tr.abs());
        }
        worst
    }
}

/// The four generators `X_μ` of a family member.
pub fn solution_family(rst: &Rst) -> Distribution {
    let ch = chart();
    let rst = Arc::new(rst.clone());
    let gens: Vec<VectorField> = (0..4)
        .map(|mu| {
            let rst = Arc::clone(&rst);
            VectorField::new(chart(), move |p| {
                let mut v = vec![0.0; DIM];
                v[mu] = 1.0;
                for a in 0..4 {
                    v[Indexing::field(a)] = p[Indexing::velocity(a, mu)] + rst.r[a][mu];
                    for n in 0..4 {
                        v[Indexing::velocity(a, n)] = rst.t[a][n][mu] + rst.s[a][n][mu];
                    }
                }
                VectorValue::new(v)
            })
        })
        .collect();
    Distribution::new(ch, gens)
}

/// Jet lift of the gauge transformation `A_α ↦ A_α + ∂f/∂x^α`:
/// `Y_f = f_{,α} ∂_{A_α} + f_{,μα} ∂_{A_{α,μ}}` with central-difference
/// derivatives of `f` on the base.
pub fn gauge_lift(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, h: f64) -> VectorField {
    let f = Arc::new(f);
    VectorField::new(chart(), move |p| {
        let x = &p[..4];
        let mut v = vec![0.0; DIM];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        for a in 0..4 {
            xp[a] = x[a] + h;
            xm[a] = x[a] - h;
            v[Indexing::field(a)] = (f(&xp) - f(&xm)) / (2.0 * h);
            for m in 0..4 {
                let d2 = if m == a {
                    let c = f(x);
                    (f(&xp) - 2.0 * c + f(&xm)) / (h * h)
                } else {
                    let mut pp = x.to_vec();
                    pp[a] += h;
                    pp[m] += h;
                    let mut pm = x.to_vec();
                    pm[a] += h;
                    pm[m] -= h;
                    let mut mp = x.to_vec();
                    mp[a] -= h;
                    mp[m] += h;
                    let mut mm = x.to_vec();
                    mm[a] -= h;
                    mm[m] -= h;
                    (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h)
                };
                v[Indexing::velocity(a, m)] = d2;
            }
            xp[a] = x[a];
            xm[a] = x[a];
        }
        VectorValue::new(v)
    })
}

/// Kernel-adapted chart: velocities split into their symmetric part `S_{αμ}`
/// (ten slots, the kernel directions) and antisymmetric part `W_{αμ}` (six
/// slots), so the kernel quotient becomes a coordinate drop.
pub fn adapted_chart() -> FiberedChart {
    let mut names: Vec<String> = (0..4).map(|m| format!("x{m}")).collect();
    names.extend((0..4).map(|a| format!("A{a}")));
    for a in 0..4 {
        for m in a..4 {
            names.push(format!("S{a}{m}"));
        }
    }
    for a in 0..4 {
        for m in a + 1..4 {
            names.push(format!("W{a}{m}"));
        }
    }
    FiberedChart::new(4, 20, names)
}

/// Indices of the ten symmetric velocity slots in the adapted chart.
pub fn adapted_symmetric_slots() -> Vec<usize> {
    (8..18).collect()
}

pub fn parent_to_adapted(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(DIM);
    out.extend_from_slice(&p[..8]);
    for a in 0..4 {
        for m in a..4 {
            out.push(0.5 * (p[Indexing::velocity(a, m)] + p[Indexing::velocity(m, a)]));
        }
    }
    for a in 0..4 {
        for m in a + 1..4 {
            out.push(0.5 * (p[Indexing::velocity(a, m)] - p[Indexing::velocity(m, a)]));
        }
    }
    out
}

/// Restate a section of the original chart on the adapted chart.
pub fn adapted_section(section: &Section) -> Section {
    let s = section.clone();
    Section::from_fiber_map(adapted_chart(), move |x| {
        let p = parent_to_adapted(&s.at(x));
        p[4..].to_vec()
    })
}

pub fn model() -> ModelSpec {
    let system = PremultisymplecticSystem::new("em", FormField::new(chart(), 5, omega_at));
    let mut model = ModelSpec::new("em", system);

    let mut rng = crate::system::RunConfig::default().rng();
    let member = Rst::random(&mut rng);
    model.distributions = vec![("family".to_string(), solution_family(&member))];
    model.known_kernel = (0..4)
        .flat_map(|a| (a..4).map(move |m| (a, m)))
        .map(|(a, m)| {
            let mut v = vec![0.0; DIM];
            v[Indexing::velocity(a, m)] += 1.0;
            v[Indexing::velocity(m, a)] += 1.0;
            (
                format!("sym{a}{m}"),
                VectorField::constant(chart(), VectorValue::new(v)),
            )
        })
        .collect();

    let const_fields = sections::prolong_holonomic(&chart(), |_| vec![0.4, -0.3, 0.7, 0.1], 1e-5)
        .expect("jet chart");
    let quad_fields =
        sections::prolong_holonomic(&chart(), |x| vec![x[1] * x[1], 0.0, 0.0, 0.0], 1e-5)
            .expect("jet chart");
    model.sections = vec![
        ("constant potential".to_string(), const_fields),
        ("quadratic A0".to_string(), quad_fields),
    ];

    model.facts = vec![
        closedness_fact(),
        Fact::new("kernel", "ten symmetric velocity pairs", |model, cfg| {
            let mut pass = true;
            let mut worst: f64 = 0.0;
            for p in model.sample(cfg) {
                let omega = model.system.omega().at(&p);
                let rep =
                    kernels::kernel_distribution_point(&omega, model.system.chart(), cfg.tol.rank);
                pass &= rep.ker1_dim == 10 && rep.k_dim == 10;
                worst = worst.max(rep.max_residual);
                for (_, field) in &model.known_kernel {
                    let r = crate::exterior::interior(&field.at(&p), &omega).max_norm();
                    pass &= r <= 1e-10;
                    worst = worst.max(r);
                }
            }
            Verdict::new("kernel", "dim 10", pass, worst)
        }),
        Fact::new(
            "family solution",
            "five seeded members solve the field equations",
            |model, cfg| {
                let mut rng = cfg.rng();
                let points = model.sample(cfg);
                let mut pass = true;
                let mut worst: f64 = 0.0;
                for _ in 0..5 {
                    let member = solution_family(&Rst::random(&mut rng));
                    for p in &points {
                        let omega = model.system.omega().at(p);
                        let (ok, wit) =
                            solutions::is_expanded_solution_point(&member, &omega, p, 1e-8);
                        pass &= ok;
                        if let Some(w) = wit {
                            worst = worst.max(w.residual);
                        }
                    }
                }
                Verdict::new("family solution", "5 seeded members", pass, worst)
            },
        ),
        Fact::new(
            "related classes",
            "same R,T related; changed R or T not",
            |model, cfg| {
                let mut rng = cfg.rng();
                let a = Rst::random(&mut rng);
                let b = Rst::random(&mut rng);
                let points = model.sample(cfg);
                let s_only = Rst {
                    s: b.s,
                    ..a.clone()
                };
                let r_only = Rst {
                    r: b.r,
                    ..a.clone()
                };
                let t_only = Rst {
                    t: b.t,
                    ..a.clone()
                };
                let da = solution_family(&a);
                let rel = |other: &Rst| {
                    solutions::kernel_related(
                        &da,
                        &solution_family(other),
                        &model.system,
                        &points,
                        1e-8,
                    )
                    .0
                };
                let pass = rel(&s_only) && !rel(&r_only) && !rel(&t_only);
                Verdict::new("related classes", "S yes, R no, T no", pass, 0.0)
            },
        ),
        Fact::new(
            "weak kernel",
            "velocity directions pass, the gauge lift fails",
            |model, cfg| {
                let points = model.sample(cfg);
                let mut pass = true;
                let mut worst: f64 = 0.0;
                for a in 0..4 {
                    for m in 0..4 {
                        let dir = VectorField::coordinate(chart(), Indexing::velocity(a, m));
                        let (ok, r) = sections::weak_kernel_test(
                            &dir,
                            &model.system,
                            &points,
                            cfg.tol.algebraic,
                        )
                        .expect("jet chart");
                        pass &= ok;
                        worst = worst.max(r);
                    }
                }
                let yf = gauge_lift(|x| x[0] * x[1], 1e-4);
                let (gauge_weak, gauge_res) =
                    sections::weak_kernel_test(&yf, &model.system, &points, cfg.tol.algebraic)
                        .expect("jet chart");
                pass &= !gauge_weak;
                Verdict::new("weak kernel", "16 velocity directions + Y_f", pass, worst)
                    .with_witness(json!({ "gauge_lift_residual": gauge_res }))
            },
        ),
        Fact::new(
            "gauge symmetry",
            "L and Ω are invariant along the gauge lift",
            |model, cfg| {
                let points = model.sample(cfg);
                let lag = lagrangian();
                let yf = gauge_lift(|x| x[0] * x[1], 1e-4);
                let rep = sections::lagrangian_symmetry_check(
                    &yf,
                    &lag,
                    &model.system,
                    &points,
                    cfg.tol.fd_step,
                    cfg.tol.involutive,
                );
                let da0 = VectorField::coordinate(chart(), Indexing::field(0));
                let rep2 = sections::lagrangian_symmetry_check(
                    &da0,
                    &lag,
                    &model.system,
                    &points,
                    cfg.tol.fd_step,
                    cfg.tol.involutive,
                );
                let pass = rep.lie_lagrangian_ok
                    && rep.lie_omega_ok
                    && rep2.lie_lagrangian_ok
                    && rep2.lie_omega_ok;
                let worst = rep
                    .lie_lagrangian_residual
                    .max(rep.lie_omega_residual)
                    .max(rep2.lie_lagrangian_residual)
                    .max(rep2.lie_omega_residual);
                Verdict::new("gauge symmetry", "Y_f and ∂/∂A0", pass, worst)
            },
        ),
        Fact::new(
            "holonomy condition",
            "members need R = 0 to be holonomic",
            |model, cfg| {
                let mut rng = cfg.rng();
                let with_r = Rst::random(&mut rng);
                let without_r = Rst {
                    r: [[0.0; 4]; 4],
                    ..with_r.clone()
                };
                let points = model.sample(cfg);
                let deviation = |rst: &Rst| {
                    let d = solution_family(rst);
                    let mut worst: f64 = 0.0;
                    for p in &points {
                        for (mu, g) in d.generators().iter().enumerate() {
                            let v = g.at(p);
                            for a in 0..4 {
                                let aim = p[Indexing::velocity(a, mu)];
                                worst = worst.max((v.components()[Indexing::field(a)] - aim).abs());
                            }
                        }
                    }
                    worst
                };
                let bad = deviation(&with_r);
                let good = deviation(&without_r);
                Verdict::new(
                    "holonomy condition",
                    "G = A iff R = 0",
                    bad > 1e-3 && good <= 1e-12,
                    good,
                )
                .with_witness(json!({ "with_r_deviation": bad }))
            },
        ),
        Fact::new(
            "integrability",
            "one kernel-related class holds both involutive and non-involutive members",
            |model, cfg| {
                let mut rng = cfg.rng();
                // fix the class (R = 0, T = 0) and move only within its
                // S-freedom: the zero member is holonomic and involutive, a
                // generic-S member is not integrable
                let generic = Rst {
                    r: [[0.0; 4]; 4],
                    t: [[[0.0; 4]; 4]; 4],
                    ..Rst::random(&mut rng)
                };
                let holonomic = Rst::zero(); // G = A exactly, brackets vanish
                let points = model.sample(cfg);
                let d_generic = solution_family(&generic);
                let d_flat = solution_family(&holonomic);
                let generic_breaks = points.iter().any(|p| {
                    !solutions::is_involutive_point(
                        &d_generic,
                        p,
                        cfg.tol.fd_step,
                        cfg.tol.involutive,
                    )
                });
                let flat_holds = points.iter().all(|p| {
                    solutions::is_involutive_point(&d_flat, p, cfg.tol.fd_step, cfg.tol.involutive)
                });
                // both members sit in one kernel-related class (they share R and T)
                let (related, _) = solutions::kernel_related(
                    &d_generic,
                    &d_flat,
                    &model.system,
                    &points,
                    cfg.tol.algebraic,
                );
                Verdict::new(
                    "integrability",
                    "class with mixed involutivity",
                    generic_breaks && flat_holds && related,
                    0.0,
                )
            },
        ),
        Fact::new(
            "sections",
            "constant potentials solve, quadratic A0 does not",
            |model, cfg| {
                let mut rng = cfg.rng();
                let base_points: Vec<Vec<f64>> = (0..cfg.points.min(4))
                    .map(|_| {
                        (0..4)
                            .map(|_| rng.gen_range(cfg.box_lo..cfg.box_hi))
                            .collect()
                    })
                    .collect();
                let good = model.section("constant potential").expect("section");
                let bad = model.section("quadratic A0").expect("section");
                let (ok_good, res_good) = sections::section_is_solution(
                    &good,
                    &model.system,
                    &base_points,
                    cfg.tol.fd_step,
                    1e-6,
                );
                let (ok_bad, res_bad) = sections::section_is_solution(
                    &bad,
                    &model.system,
                    &base_points,
                    cfg.tol.fd_step,
                    1e-6,
                );
                Verdict::new("sections", "j¹ψ checks", ok_good && !ok_bad, res_good)
                    .with_witness(json!({ "quadratic_residual": res_bad }))
            },
        ),
        kernel_augmentation_fact(),
    ];
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::RunConfig;

    #[test]
    fn flat_columns_of_symmetric_pairs_cancel() {
        let cfg = RunConfig::default();
        let p = &cfg.sample_box(DIM)[0];
        let omega = omega_at(p);
        let flat = kernels::flat_matrix(&omega, DIM);
        for a in 0..4 {
            for m in 0..4 {
                let col_am = flat.matrix.column(Indexing::velocity(a, m)).into_owned();
                let col_ma = flat.matrix.column(Indexing::velocity(m, a)).into_owned();
                assert!((col_am + col_ma).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn projected_t_is_traceless_and_antisymmetric() {
        let mut rng = RunConfig::default().rng();
        let rst = Rst::random(&mut rng);
        assert!(rst.eta_trace_of_t() < 1e-12);
        for a in 0..4 {
            for b in 0..4 {
                assert!((rst.r[a][b] - rst.r[b][a]).abs() < 1e-15);
                for c in 0..4 {
                    assert!((rst.t[a][b][c] + rst.t[b][a][c]).abs() < 1e-15);
                    assert!((rst.s[a][b][c] - rst.s[b][a][c]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn em_fact_table_passes() {
        let cfg = RunConfig {
            points: 3,
            ..RunConfig::default()
        };
        let model = model();
        for v in model.run_facts(&cfg, None) {
            assert!(
                v.pass,
                "em fact `{}` failed (residual {:.3e})",
                v.check, v.max_residual
            );
        }
    }

    #[test]
    fn kernel_vectors_are_trivially_weak_kernel() {
        let model = model();
        let cfg = RunConfig {
            points: 3,
            ..RunConfig::default()
        };
        let points = model.sample(&cfg);
        let (_, field) = &model.known_kernel[1];
        let (ok, res) =
            crate::sections::weak_kernel_test(field, &model.system, &points, 1e-12).unwrap();
        assert!(ok && res == 0.0);
    }

    #[test]
    fn random_vertical_field_is_no_symmetry() {
        let model = model();
        let cfg = RunConfig {
            points: 3,
            ..RunConfig::default()
        };
        let points = model.sample(&cfg);
        let mut rng = cfg.rng();
        let mut v = vec![0.0; DIM];
        for c in v.iter_mut().skip(4) {
            *c = rng.gen_range(-1.0..1.0);
        }
        let field = VectorField::constant(chart(), VectorValue::new(v));
        let rep = crate::sections::lagrangian_symmetry_check(
            &field,
            &lagrangian(),
            &model.system,
            &points,
            1e-5,
            1e-5,
        );
        assert!(!rep.lie_lagrangian_ok);
        assert!(!rep.lie_omega_ok);
    }

    #[test]
    fn decomposing_family_plus_kernel_generator_returns_it_as_b() {
        let cfg = RunConfig {
            points: 1,
            ..RunConfig::default()
        };
        let mut rng = cfg.rng();
        let member = solution_family(&Rst::random(&mut rng));
        let mut kv = vec![0.0; DIM];
        kv[Indexing::velocity(0, 2)] = 1.0;
        kv[Indexing::velocity(2, 0)] = 1.0;
        let with_kernel =
            member.extended(VectorField::constant(chart(), VectorValue::new(kv.clone())));
        let p = cfg.sample_box(DIM).pop().unwrap();
        let rep = crate::solutions::decompose_transverse(&with_kernel, &p, 1e-9).unwrap();
        assert_eq!(rep.h_basis.len(), 4);
        assert_eq!(rep.b_basis.len(), 1);
        let got = rep.b_basis[0].as_dvector();
        let want = VectorValue::new(kv).as_dvector();
        assert!(crate::linalg::span_equality_residual(&[got], &[want]) < 1e-10);
    }
}
