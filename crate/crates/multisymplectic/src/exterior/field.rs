use std::sync::Arc;

use crate::error::Result;
use crate::exterior::{wedge, FiberedChart, FormValue, IndexSet, JetChartMeta, VectorValue};

type FormEval = Arc<dyn Fn(&[f64]) -> FormValue + Send + Sync>;
type VectorEval = Arc<dyn Fn(&[f64]) -> VectorValue + Send + Sync>;
type ScalarEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Evaluable differential form over a chart. Immutable; evaluation is pure.
#[derive(Clone)]
pub struct FormField {
    degree: usize,
    chart: FiberedChart,
    eval: FormEval,
    d_eval: Option<FormEval>,
}

impl FormField {
    pub fn new(
        chart: FiberedChart,
        degree: usize,
        eval: impl Fn(&[f64]) -> FormValue + Send + Sync + 'static,
    ) -> Self {
        FormField {
            degree,
            chart,
            eval: Arc::new(eval),
            d_eval: None,
        }
    }

    /// Constant-coefficient form field.
    pub fn constant(chart: FiberedChart, value: FormValue) -> Self {
        assert_eq!(value.dim(), chart.dim(), "dimension mismatch");
        let degree = value.degree();
        let dim = chart.dim();
        let d_zero = FormValue::zero(dim, degree + 1);
        let mut f = FormField::new(chart, degree, move |_| value.clone());
        f.d_eval = Some(Arc::new(move |_| d_zero.clone()));
        f
    }

    /// Attach an analytic exterior-derivative evaluator.
    pub fn with_analytic_d(
        mut self,
        d: impl Fn(&[f64]) -> FormValue + Send + Sync + 'static,
    ) -> Self {
        self.d_eval = Some(Arc::new(d));
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    pub fn at(&self, point: &[f64]) -> FormValue {
        debug_assert_eq!(point.len(), self.chart.dim(), "point dimension mismatch");
        let v = (self.eval)(point);
        debug_assert_eq!(v.degree(), self.degree, "evaluator degree mismatch");
        debug_assert_eq!(v.dim(), self.chart.dim(), "evaluator dimension mismatch");
        v
    }

    pub fn analytic_d(&self) -> Option<&FormEval> {
        self.d_eval.as_ref()
    }

    /// Exterior derivative at `p`: the analytic evaluator when present,
    /// otherwise central differences with step `h`.
    pub fn d_at(&self, point: &[f64], h: f64) -> FormValue {
        match &self.d_eval {
            Some(d) => d(point),
            None => exterior_derivative_fd(self, point, h),
        }
    }
}

/// Evaluable vector field over a chart.
#[derive(Clone)]
pub struct VectorField {
    chart: FiberedChart,
    eval: VectorEval,
}

impl VectorField {
    pub fn new(
        chart: FiberedChart,
        eval: impl Fn(&[f64]) -> VectorValue + Send + Sync + 'static,
    ) -> Self {
        VectorField {
            chart,
            eval: Arc::new(eval),
        }
    }

    /// Constant vector field.
    pub fn constant(chart: FiberedChart, value: VectorValue) -> Self {
        assert_eq!(value.dim(), chart.dim(), "dimension mismatch");
        VectorField::new(chart, move |_| value.clone())
    }

    /// The coordinate direction `∂/∂ξ_idx`.
    pub fn coordinate(chart: FiberedChart, idx: usize) -> Self {
        let dim = chart.dim();
        VectorField::constant(chart, VectorValue::basis(dim, idx))
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    pub fn at(&self, point: &[f64]) -> VectorValue {
        let v = (self.eval)(point);
        debug_assert_eq!(v.dim(), self.chart.dim(), "evaluator dimension mismatch");
        v
    }
}

/// Evaluable scalar field (Lagrangians, energies).
#[derive(Clone)]
pub struct ScalarField {
    chart: FiberedChart,
    eval: ScalarEval,
}

impl ScalarField {
    pub fn new(chart: FiberedChart, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            chart,
            eval: Arc::new(eval),
        }
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    pub fn at(&self, point: &[f64]) -> f64 {
        (self.eval)(point)
    }
}

/// Central-difference exterior derivative of `field` at `p`.
///
/// `dF = Σ_j ∂_j c_K dξ_j ∧ dξ_K`; exact for coefficient polynomials of
/// degree ≤ 2 up to rounding.
pub fn exterior_derivative_fd(field: &FormField, point: &[f64], h: f64) -> FormValue {
    assert!(h > 0.0, "finite-difference step must be positive");
    let dim = field.chart().dim();
    let mut out = FormValue::zero(dim, field.degree() + 1);
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    for j in 0..dim {
        plus[j] = point[j] + h;
        minus[j] = point[j] - h;
        let fp = field.at(&plus);
        let fm = field.at(&minus);
        plus[j] = point[j];
        minus[j] = point[j];
        let diff = fp.sub(&fm);
        for (key, c) in diff.coeffs() {
            if key.contains(j) {
                continue;
            }
            let mut idx = vec![j];
            idx.extend_from_slice(key.indices());
            out.add_term(&idx, c / (2.0 * h));
        }
    }
    out
}

/// Finite-difference Lie bracket `[X, Y]^k = Σ_j (X^j ∂_j Y^k − Y^j ∂_j X^k)`.
pub fn lie_bracket_fd(x: &VectorField, y: &VectorField, point: &[f64], h: f64) -> VectorValue {
    assert!(h > 0.0, "finite-difference step must be positive");
    let dim = x.chart().dim();
    assert_eq!(dim, y.chart().dim(), "dimension mismatch in bracket");
    let xv = x.at(point);
    let yv = y.at(point);
    let mut out = vec![0.0; dim];
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    for j in 0..dim {
        let xj = xv.components()[j];
        let yj = yv.components()[j];
        if xj == 0.0 && yj == 0.0 {
            continue;
        }
        plus[j] = point[j] + h;
        minus[j] = point[j] - h;
        let yp = y.at(&plus);
        let ym = y.at(&minus);
        let xp = x.at(&plus);
        let xm = x.at(&minus);
        plus[j] = point[j];
        minus[j] = point[j];
        for k in 0..dim {
            let dy = (yp.components()[k] - ym.components()[k]) / (2.0 * h);
            let dx = (xp.components()[k] - xm.components()[k]) / (2.0 * h);
            out[k] += xj * dy - yj * dx;
        }
    }
    VectorValue::new(out)
}

/// Substitute `du^α ↦ u^α_i dx^i` for every field-coordinate covector, using
/// the velocity values stored in `point`. Nothing else is touched, so the
/// result is the holonomic-pullback representative: it vanishes exactly when
/// `ω` lies in the contact ideal generated by `θ^α = du^α − u^α_i dx^i`.
pub fn contact_substitute(
    omega: &FormValue,
    chart: &FiberedChart,
    point: &[f64],
) -> Result<FormValue> {
    let jet = chart.require_jet()?;
    let dim = omega.dim();
    let mut out = FormValue::zero(dim, omega.degree());
    for (key, c) in omega.coeffs() {
        let term = substitute_key(key, *c, jet, point, dim);
        out = out.add(&term);
    }
    Ok(out)
}

fn substitute_key(
    key: &IndexSet,
    coeff: f64,
    jet: &JetChartMeta,
    point: &[f64],
    dim: usize,
) -> FormValue {
    if !key.indices().iter().any(|&i| jet.is_field_coordinate(i)) {
        return FormValue::monomial(dim, key.indices(), coeff);
    }
    let mut acc = FormValue::monomial(dim, &[], coeff);
    for &idx in key.indices() {
        let factor = if jet.is_field_coordinate(idx) {
            let mut f = FormValue::zero(dim, 1);
            for p in jet.velocities_of(idx) {
                f.add_term(&[p.base], point[p.velocity]);
            }
            f
        } else {
            FormValue::basis_covector(dim, idx)
        };
        acc = wedge(&acc, &factor);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::JetPairing;

    #[test]
    fn fd_derivative_of_constant_form_vanishes() {
        let chart = FiberedChart::from_names(&["x", "y"], &["q"]);
        let f = FormField::new(chart, 1, |_| FormValue::basis_covector(3, 2));
        let d = exterior_derivative_fd(&f, &[0.3, -0.2, 0.9], 1e-5);
        assert!(d.max_norm() <= 1e-10);
    }

    #[test]
    fn fd_derivative_of_q_dx() {
        // F = q dx on the chart (x; q): dF = dq∧dx = -1 on {0,1}.
        let chart = FiberedChart::from_names(&["x"], &["q"]);
        let f = FormField::new(chart, 1, |p| FormValue::monomial(2, &[0], p[1]));
        let d = exterior_derivative_fd(&f, &[0.4, 1.7], 1e-5);
        assert!((d.coeff(&[0, 1]) - (-1.0)).abs() < 1e-8);
    }

    #[test]
    fn bracket_of_coordinate_fields_vanishes() {
        let chart = FiberedChart::from_names(&["x", "y"], &[]);
        let x = VectorField::coordinate(chart.clone(), 0);
        let y = VectorField::coordinate(chart, 1);
        let b = lie_bracket_fd(&x, &y, &[0.1, 0.2], 1e-5);
        assert!(b.norm() < 1e-10);
    }

    #[test]
    fn bracket_x_dy_with_dx() {
        // [x∂y, ∂x] = -∂y
        let chart = FiberedChart::from_names(&["x", "y"], &[]);
        let xy = VectorField::new(chart.clone(), |p| VectorValue::new(vec![0.0, p[0]]));
        let dx = VectorField::coordinate(chart, 0);
        let b = lie_bracket_fd(&xy, &dx, &[0.7, -0.3], 1e-5);
        assert!((b.components()[1] - (-1.0)).abs() < 1e-8);
        assert!(b.components()[0].abs() < 1e-10);
    }

    fn jet_chart() -> FiberedChart {
        // (x0, x1; u, u0, u1) first-jet chart of one field over two base dims
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
    fn contact_form_substitutes_to_zero() {
        // θ = du − u0 dx0 − u1 dx1
        let chart = jet_chart();
        let p = [0.3, 0.4, 1.0, 2.0, -0.5];
        let mut theta = FormValue::zero(5, 1);
        theta.add_term(&[2], 1.0);
        theta.add_term(&[0], -p[3]);
        theta.add_term(&[1], -p[4]);
        let sub = contact_substitute(&theta, &chart, &p).unwrap();
        assert!(sub.is_zero());
    }

    #[test]
    fn base_monomials_pass_through() {
        let chart = jet_chart();
        let w = FormValue::monomial(5, &[0, 1], 2.5);
        let sub = contact_substitute(&w, &chart, &[0.0; 5]).unwrap();
        assert_eq!(sub, w);
    }

    #[test]
    fn missing_jet_metadata_is_an_error() {
        let chart = FiberedChart::from_names(&["x"], &["u"]);
        let w = FormValue::basis_covector(2, 1);
        assert!(contact_substitute(&w, &chart, &[0.0, 0.0]).is_err());
    }
}
