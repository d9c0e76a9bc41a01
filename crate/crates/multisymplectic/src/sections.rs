//! Section-level solution checks, holonomic prolongation, kernel-relatedness
//! of sections, and the weak-kernel (contact-ideal) test.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::exterior::{
    contact_substitute, exterior_derivative_fd, interior, FiberedChart, FormField, ScalarField,
    VectorField, VectorValue,
};
use crate::reduction::QuotientChart;
use crate::system::PremultisymplecticSystem;

type SectionEval = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacobianEval = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Section of the fibration: a map from base points to chart points whose
/// first `m` outputs reproduce the input (`π∘φ = id` holds by construction).
#[derive(Clone)]
pub struct Section {
    chart: FiberedChart,
    fiber: SectionEval,
    jacobian: Option<JacobianEval>,
}

impl Section {
    /// Build from a fiber-components map `x ↦ (y^1(x), …, y^n(x))`; the base
    /// components are prepended automatically.
    pub fn from_fiber_map(
        chart: FiberedChart,
        fiber: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Section {
            chart,
            fiber: Arc::new(fiber),
            jacobian: None,
        }
    }

    /// Attach an analytic Jacobian evaluator (`N × m`, rows in chart order).
    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    /// Full chart point over `x`.
    pub fn at(&self, x: &[f64]) -> Vec<f64> {
        let m = self.chart.base_dim();
        debug_assert_eq!(x.len(), m, "base point dimension mismatch");
        let fiber = (self.fiber)(x);
        debug_assert_eq!(
            fiber.len(),
            self.chart.fiber_dim(),
            "fiber map dimension mismatch"
        );
        let mut p = Vec::with_capacity(self.chart.dim());
        p.extend_from_slice(x);
        p.extend_from_slice(&fiber);
        p
    }

    /// Tangent map at `x` as an `N × m` matrix; finite differences with step
    /// `h` unless an analytic Jacobian was supplied.
    pub fn jacobian(&self, x: &[f64], h: f64) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let m = self.chart.base_dim();
        let n_total = self.chart.dim();
        let mut jac = DMatrix::zeros(n_total, m);
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        for col in 0..m {
            plus[col] = x[col] + h;
            minus[col] = x[col] - h;
            let fp = self.at(&plus);
            let fm = self.at(&minus);
            plus[col] = x[col];
            minus[col] = x[col];
            for row in 0..n_total {
                jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        jac
    }
}

/// Worst residual of the solution equations `φ*(i(Y)Ω) = 0` over all
/// coordinate directions `Y` and all base sample points.
///
/// At each point the `m`-form `i(e_j)Ω` is pulled back along the section
/// Jacobian and evaluated on the base frame; all `N` residuals must stay
/// below `tol`.
pub fn section_is_solution(
    section: &Section,
    system: &PremultisymplecticSystem,
    base_points: &[Vec<f64>],
    h: f64,
    tol: f64,
) -> (bool, f64) {
    let dim = system.dim();
    let mut worst: f64 = 0.0;
    for x in base_points {
        let p = section.at(x);
        let omega_p = system.omega().at(&p);
        let jac = section.jacobian(x, h);
        let cols: Vec<VectorValue> = (0..jac.ncols())
            .map(|c| VectorValue::from_dvector(&jac.column(c).into_owned()))
            .collect();
        for j in 0..dim {
            let pulled = interior(&VectorValue::basis(dim, j), &omega_p);
            let residual = pulled.apply(&cols).abs();
            worst = worst.max(residual);
        }
    }
    (worst <= tol, worst)
}

/// First-jet prolongation of a base-to-fields map: velocity slots are filled
/// with central-difference partials, every other fiber slot with the field
/// values. The chart must carry jet metadata covering all velocity slots.
pub fn prolong_holonomic(
    chart: &FiberedChart,
    fields: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    h: f64,
) -> Result<Section> {
    let jet = chart.require_jet()?.clone();
    let chart_owned = chart.clone();
    let m = chart.base_dim();
    let fields = Arc::new(fields);
    let eval = move |x: &[f64]| -> Vec<f64> {
        let mut fiber = vec![0.0; chart_owned.fiber_dim()];
        let base_vals = fields(x);
        // field slots: every fiber coordinate that is not a velocity
        let field_slots: Vec<usize> = (m..chart_owned.dim())
            .filter(|&i| !jet.is_velocity_coordinate(i))
            .collect();
        for (value_idx, &slot) in field_slots.iter().enumerate() {
            fiber[slot - m] = base_vals[value_idx];
        }
        // velocity slots by central differences of the paired field
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        for pairing in &jet.pairings {
            let field_pos = field_slots
                .iter()
                .position(|&s| s == pairing.field)
                .expect("jet pairing references a field slot");
            plus[pairing.base] = x[pairing.base] + h;
            minus[pairing.base] = x[pairing.base] - h;
            let fp = fields(&plus);
            let fm = fields(&minus);
            plus[pairing.base] = x[pairing.base];
            minus[pairing.base] = x[pairing.base];
            fiber[pairing.velocity - m] = (fp[field_pos] - fm[field_pos]) / (2.0 * h);
        }
        fiber
    };
    Ok(Section::from_fiber_map(chart.clone(), eval))
}

/// Residual of the contact-form pullbacks `φ*θ^α` at the sampled base
/// points; zero iff the section is holonomic.
pub fn holonomy_residual(section: &Section, base_points: &[Vec<f64>], h: f64) -> f64 {
    let chart = section.chart();
    let jet = match chart.jet() {
        Some(j) => j.clone(),
        None => return 0.0,
    };
    let mut worst: f64 = 0.0;
    for x in base_points {
        let p = section.at(x);
        let jac = section.jacobian(x, h);
        for pairing in &jet.pairings {
            // θ = du^α − u^α_i dx^i pulled back: ∂(field)/∂x^base − velocity
            let pulled = jac[(pairing.field, pairing.base)] - p[pairing.velocity];
            worst = worst.max(pulled.abs());
        }
    }
    worst
}

/// Sections are kernel related when their quotient images agree:
/// `ξ∘φ1 = ξ∘φ2` within `tol` at every sampled base point.
pub fn sections_kernel_related(
    phi1: &Section,
    phi2: &Section,
    quotient: &QuotientChart,
    base_points: &[Vec<f64>],
    tol: f64,
) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    for x in base_points {
        let a = quotient.forget(&phi1.at(x));
        let b = quotient.forget(&phi2.at(x));
        let diff = a
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    (worst <= tol, worst)
}

/// Weak-kernel test for a vertical field `Y`: the contact-ideal substitution
/// of `i(Y(p))Ω_p` must vanish at every sampled point.
///
/// Sound and complete for holonomic admissibility: the pullback along any
/// holonomic section factors through the substitution.
pub fn weak_kernel_test(
    y: &VectorField,
    system: &PremultisymplecticSystem,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<(bool, f64)> {
    let chart = system.chart();
    chart.require_jet()?;
    let mut worst: f64 = 0.0;
    for p in points {
        let omega_p = system.omega().at(p);
        let contracted = interior(&y.at(p), &omega_p);
        let substituted = contact_substitute(&contracted, chart, p)?;
        worst = worst.max(substituted.max_norm());
    }
    Ok((worst <= tol, worst))
}

/// Lie-derivative residuals of a candidate symmetry field: `L_Y L` by
/// directional differencing and `L_Y Ω = d(i(Y)Ω) + i(Y)dΩ` by the Cartan
/// formula with FD exterior derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub lie_lagrangian_ok: bool,
    pub lie_lagrangian_residual: f64,
    pub lie_omega_ok: bool,
    pub lie_omega_residual: f64,
}

pub fn lagrangian_symmetry_check(
    y: &VectorField,
    lagrangian: &ScalarField,
    system: &PremultisymplecticSystem,
    points: &[Vec<f64>],
    h: f64,
    tol: f64,
) -> SymmetryReport {
    let mut worst_l: f64 = 0.0;
    let mut worst_omega: f64 = 0.0;
    let omega = system.omega().clone();
    let y_owned = y.clone();
    let contracted_field = FormField::new(
        system.chart().clone(),
        system.omega().degree() - 1,
        move |p| interior(&y_owned.at(p), &omega.at(p)),
    );
    for p in points {
        let yv = y.at(p);
        // L_Y f = directional derivative along Y(p)
        let shift: Vec<f64> = p
            .iter()
            .zip(yv.components())
            .map(|(x, v)| x + h * v)
            .collect();
        let shift_m: Vec<f64> = p
            .iter()
            .zip(yv.components())
            .map(|(x, v)| x - h * v)
            .collect();
        let dl = (lagrangian.at(&shift) - lagrangian.at(&shift_m)) / (2.0 * h);
        worst_l = worst_l.max(dl.abs());

        let d_of_contraction = exterior_derivative_fd(&contracted_field, p, h);
        let d_omega = system.omega().d_at(p, h);
        let lie = d_of_contraction.add(&interior(&yv, &d_omega));
        worst_omega = worst_omega.max(lie.max_norm());
    }
    SymmetryReport {
        lie_lagrangian_ok: worst_l <= tol,
        lie_lagrangian_residual: worst_l,
        lie_omega_ok: worst_omega <= tol,
        lie_omega_residual: worst_omega,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{JetChartMeta, JetPairing};
    use crate::models::simple;

    #[test]
    fn section_prepends_base_coordinates() {
        let chart = FiberedChart::from_names(&["x", "y"], &["q"]);
        let s = Section::from_fiber_map(chart, |x| vec![x[0] * x[1]]);
        assert_eq!(s.at(&[2.0, 3.0]), vec![2.0, 3.0, 6.0]);
    }

    #[test]
    fn constant_sections_solve_the_r8_system() {
        let model = simple::r8();
        let points = vec![vec![0.1, 0.2], vec![-0.4, 0.9]];
        let s = model.section("const").unwrap();
        let (ok, worst) = section_is_solution(&s, &model.system, &points, 1e-5, 1e-8);
        assert!(ok, "residual {worst}");
        // shifting along the kernel coordinate preserves the solution property
        let shifted = model.section("const_v_shift").unwrap();
        let (ok, worst) = section_is_solution(&shifted, &model.system, &points, 1e-5, 1e-8);
        assert!(ok, "kernel-shifted residual {worst}");
    }

    #[test]
    fn sloped_q_section_fails_r8() {
        // q = x makes φ*(i(∂px)Ω) = dq∧dy pull back to dx∧dy ≠ 0.
        let model = simple::r8();
        let chart = model.system.chart().clone();
        let s = Section::from_fiber_map(chart, |x| vec![x[0], 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (ok, worst) = section_is_solution(&s, &model.system, &[vec![0.3, 0.1]], 1e-5, 1e-8);
        assert!(!ok);
        assert!(worst > 0.5);
    }

    fn jet_chart() -> FiberedChart {
        FiberedChart::from_names(&["x0", "x1"], &["u", "u0", "u1"]).with_jet(JetChartMeta::new(
            vec![
                JetPairing {
                    velocity: 3,
                    field: 2,
                    base: 0,
                },
                JetPairing {
                    velocity: 4,
                    field: 2,
                    base: 1,
                },
            ],
        ))
    }

    #[test]
    fn prolongation_of_linear_field_has_exact_velocities() {
        let chart = jet_chart();
        let s = prolong_holonomic(&chart, |x| vec![2.0 * x[0] - 3.0 * x[1]], 1e-5).unwrap();
        let p = s.at(&[0.5, 0.25]);
        assert!((p[2] - 0.25).abs() < 1e-12);
        assert!((p[3] - 2.0).abs() < 1e-9);
        assert!((p[4] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn prolongation_satisfies_contact_pullback() {
        let chart = jet_chart();
        let s = prolong_holonomic(&chart, |x| vec![x[0] * x[0] * x[1] + 0.3 * x[1]], 1e-5).unwrap();
        let pts = vec![vec![0.2, -0.4], vec![0.9, 0.8]];
        assert!(holonomy_residual(&s, &pts, 1e-5) < 1e-6);
        // constant fields prolong to zero velocities
        let c = prolong_holonomic(&chart, |_| vec![4.2], 1e-5).unwrap();
        let p = c.at(&[0.1, 0.2]);
        assert_eq!(&p[3..], &[0.0, 0.0]);
    }

    #[test]
    fn non_holonomic_section_has_contact_residual() {
        let chart = jet_chart();
        let s = Section::from_fiber_map(chart, |x| vec![x[0], 5.0, 0.0]);
        assert!(holonomy_residual(&s, &[vec![0.0, 0.0]], 1e-5) > 3.0);
    }

    #[test]
    fn r8_section_relatedness_through_the_quotient() {
        let model = simple::r8();
        let quotient =
            crate::reduction::QuotientChart::new(model.system.chart().clone(), vec![6], vec![0.0]);
        let points = vec![vec![0.1, 0.2], vec![-0.5, 0.8]];
        let a = model.section("const").unwrap();
        let v_shift = model.section("const_v_shift").unwrap();
        let u_shift = model.section("const_u_shift").unwrap();
        assert!(sections_kernel_related(&a, &a, &quotient, &points, 1e-12).0);
        assert!(sections_kernel_related(&a, &v_shift, &quotient, &points, 1e-12).0);
        assert!(!sections_kernel_related(&a, &u_shift, &quotient, &points, 1e-12).0);
    }

    #[test]
    fn section_relatedness_is_an_equivalence_relation() {
        let model = simple::r8();
        let quotient =
            crate::reduction::QuotientChart::new(model.system.chart().clone(), vec![6], vec![0.0]);
        let points = vec![vec![0.3, -0.4]];
        let family = [
            model.section("const").unwrap(),
            model.section("const_v_shift").unwrap(),
            model.section("const_u_shift").unwrap(),
        ];
        let related = |i: usize, j: usize| {
            sections_kernel_related(&family[i], &family[j], &quotient, &points, 1e-12).0
        };
        for i in 0..3 {
            assert!(related(i, i));
            for j in 0..3 {
                assert_eq!(related(i, j), related(j, i));
                for k in 0..3 {
                    if related(i, j) && related(j, k) {
                        assert!(related(i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn em_kernel_related_holonomic_sections_are_identical() {
        use crate::models::em;
        // the kernel quotient keeps (x, A, antisymmetric velocities); two
        // holonomic sections with the same quotient image share their fields,
        // hence all their derivatives.
        let quotient = crate::reduction::QuotientChart::new(
            em::adapted_chart(),
            em::adapted_symmetric_slots(),
            vec![0.0; 10],
        );
        let points = vec![vec![0.2, -0.1, 0.4, 0.7]];
        let psi1 =
            prolong_holonomic(&em::chart(), |x| vec![x[0] * x[1], 0.3, 0.0, x[2]], 1e-5).unwrap();
        let psi2 =
            prolong_holonomic(&em::chart(), |x| vec![x[0] * x[1], 0.3, 0.1, x[2]], 1e-5).unwrap();
        let a1 = em::adapted_section(&psi1);
        let a2 = em::adapted_section(&psi2);
        assert!(sections_kernel_related(&a1, &a1, &quotient, &points, 1e-9).0);
        assert!(!sections_kernel_related(&a1, &a2, &quotient, &points, 1e-9).0);

        // shifting a holonomic section along a kernel (symmetric-velocity)
        // direction stays kernel-related but breaks holonomy: the holonomic
        // representative of the class is unique.
        let base = psi1.clone();
        let shifted = Section::from_fiber_map(em::chart().clone(), move |x| {
            let p = base.at(x);
            let mut fiber = p[4..].to_vec();
            fiber[em::Indexing::velocity(0, 1) - 4] += 0.5;
            fiber[em::Indexing::velocity(1, 0) - 4] += 0.5;
            fiber
        });
        let a3 = em::adapted_section(&shifted);
        assert!(sections_kernel_related(&a1, &a3, &quotient, &points, 1e-9).0);
        assert!(holonomy_residual(&psi1, &points, 1e-5) < 1e-7);
        assert!(holonomy_residual(&shifted, &points, 1e-5) > 0.4);
    }
}
