//! Distribution-level classification: transversality, `H + B` decomposition,
//! expanded-solution and kernel-relatedness checks, involutivity, and the
//! equivalence-relation probe.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{interior_decomposable, FiberedChart, FormValue, VectorField, VectorValue};
use crate::kernels::{self, kerm_contains};
use crate::linalg;
use crate::system::PremultisymplecticSystem;

pub use crate::exterior::lie_bracket_fd;

/// Generalized distribution presented by a finite generator list. Rank is
/// measured pointwise; no constant-rank assumption.
#[derive(Clone)]
pub struct Distribution {
    chart: FiberedChart,
    generators: Vec<VectorField>,
    claimed_rank: Option<usize>,
}

impl Distribution {
    pub fn new(chart: FiberedChart, generators: Vec<VectorField>) -> Self {
        for g in &generators {
            assert_eq!(g.chart().dim(), chart.dim(), "generator dimension mismatch");
        }
        Distribution {
            chart,
            generators,
            claimed_rank: None,
        }
    }

    /// Distribution spanned by constant coordinate directions.
    pub fn from_coordinates(chart: FiberedChart, indices: &[usize]) -> Self {
        let gens = indices
            .iter()
            .map(|&i| VectorField::coordinate(chart.clone(), i))
            .collect();
        Distribution::new(chart, gens)
    }

    pub fn with_claimed_rank(mut self, rank: usize) -> Self {
        self.claimed_rank = Some(rank);
        self
    }

    pub fn chart(&self) -> &FiberedChart {
        &self.chart
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn claimed_rank(&self) -> Option<usize> {
        self.claimed_rank
    }

    /// Generator values at a point.
    pub fn at(&self, point: &[f64]) -> Vec<VectorValue> {
        self.generators.iter().map(|g| g.at(point)).collect()
    }

    /// Concatenate generator lists (the distribution sum `D1 + D2`).
    pub fn sum(&self, other: &Distribution) -> Distribution {
        assert_eq!(self.chart.dim(), other.chart.dim(), "chart mismatch in sum");
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Distribution::new(self.chart.clone(), gens)
    }

    /// Append one generator.
    pub fn extended(&self, extra: VectorField) -> Distribution {
        let mut gens = self.generators.clone();
        gens.push(extra);
        Distribution::new(self.chart.clone(), gens)
    }
}

/// True iff the base components of the generators at `p` span the whole base.
pub fn is_transverse_point(dist: &Distribution, p: &[f64], tol: f64) -> bool {
    let m = dist.chart().base_dim();
    let vals = dist.at(p);
    base_rank(&vals, m, tol) == m
}

fn base_rank(vals: &[VectorValue], m: usize, tol: f64) -> usize {
    if vals.is_empty() {
        return 0;
    }
    let a = DMatrix::from_fn(m, vals.len(), |i, j| vals[j].components()[i]);
    linalg::rank(&a, tol.max(linalg::TOL_RANK))
}

/// `D = H + B` at a point: `H` holds `m` chosen generators, `B` the rest with
/// base components eliminated.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub h_basis: Vec<VectorValue>,
    pub b_basis: Vec<VectorValue>,
    pub transverse: bool,
    /// Residual of span(H ∪ B) against span(generators), both directions.
    pub span_residual: f64,
}

/// Split a transverse distribution at `p` into a rank-`m` transverse part and
/// a vertical remainder.
///
/// `H` picks generators greedily by largest remaining base-block norm after
/// projecting out the already chosen base blocks (ties broken by lowest
/// generator index); the remaining generators are Gauss-eliminated against
/// `H` to zero their base components. The span is preserved; eliminated
/// vectors that collapse below `tol` are dropped from `B`.
pub fn decompose_transverse(
    dist: &Distribution,
    p: &[f64],
    tol: f64,
) -> Result<DecompositionReport> {
    let m = dist.chart().base_dim();
    let vals = dist.at(p);
    let rank = base_rank(&vals, m, tol);
    if rank < m {
        return Err(Error::NotTransverse { rank, m });
    }

    let base_of = |v: &VectorValue| DVector::from_column_slice(&v.components()[..m]);
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_base: Vec<DVector<f64>> = Vec::new();
    while chosen.len() < m {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in vals.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut b = base_of(v);
            for q in &chosen_base {
                let c = q.dot(&b);
                b -= q * c;
            }
            let score = b.norm();
            let better = match best {
                None => true,
                Some((_, s)) => score > s + 1e-15,
            };
            if better {
                best = Some((i, score));
            }
        }
        let (idx, score) = best.expect("transversality guarantees a pivot");
        if score <= tol.max(linalg::TOL_RANK) {
            return Err(Error::NotTransverse {
                rank: chosen.len(),
                m,
            });
        }
        let mut b = base_of(&vals[idx]);
        for q in &chosen_base {
            let c = q.dot(&b);
            b -= q * c;
        }
        chosen_base.push(b.normalize());
        chosen.push(idx);
    }

    let h_basis: Vec<VectorValue> = chosen.iter().map(|&i| vals[i].clone()).collect();
    // eliminate base components of the remaining generators against H
    let h_base = DMatrix::from_fn(m, m, |i, j| h_basis[j].components()[i]);
    let lu = h_base.lu();
    let mut b_basis = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let rhs = base_of(v);
        let coeffs = lu.solve(&rhs).expect("H base block is invertible");
        let mut w = v.clone();
        for (j, h) in h_basis.iter().enumerate() {
            w = w.add(&h.scale(-coeffs[j]));
        }
        dist.chart().verticalize(&mut w); // clear rounding residue in the base block
        if w.norm() > tol.max(linalg::TOL_RANK) {
            b_basis.push(w);
        }
    }

    let original: Vec<DVector<f64>> = vals.iter().map(|v| v.as_dvector()).collect();
    let split: Vec<DVector<f64>> = h_basis
        .iter()
        .chain(b_basis.iter())
        .map(|v| v.as_dvector())
        .collect();
    let span_residual = linalg::span_equality_residual(&original, &split);

    Ok(DecompositionReport {
        h_basis,
        b_basis,
        transverse: true,
        span_residual,
    })
}

/// Witness for a failed expanded-solution check: the generator subset whose
/// wedge escapes `ker^m`, with the contraction value.
#[derive(Debug, Clone, Serialize)]
pub struct WedgeWitness {
    pub generator_indices: Vec<usize>,
    pub residual: f64,
    pub contraction: FormValue,
}

/// True iff the distribution is transverse at `p` and every `m`-subset wedge
/// of its generator values lies in `ker^m Ω_p`. The witness is the first
/// failing subset in lexicographic order.
pub fn is_expanded_solution_point(
    dist: &Distribution,
    omega_p: &FormValue,
    p: &[f64],
    tol: f64,
) -> (bool, Option<WedgeWitness>) {
    let m = dist.chart().base_dim();
    let vals = dist.at(p);
    if base_rank(&vals, m, tol) < m {
        return (
            false,
            Some(WedgeWitness {
                generator_indices: vec![],
                residual: f64::NAN,
                contraction: FormValue::zero(omega_p.dim(), 0),
            }),
        );
    }
    for combo in (0..vals.len()).combinations(m) {
        let vs: Vec<VectorValue> = combo.iter().map(|&i| vals[i].clone()).collect();
        let contraction = interior_decomposable(&vs, omega_p);
        let residual = contraction.max_norm();
        if residual > tol {
            return (
                false,
                Some(WedgeWitness {
                    generator_indices: combo,
                    residual,
                    contraction,
                }),
            );
        }
    }
    (true, None)
}

/// Two expanded solutions are kernel related when their sum is again an
/// expanded solution; checked at every sample point.
pub fn kernel_related(
    d1: &Distribution,
    d2: &Distribution,
    system: &PremultisymplecticSystem,
    points: &[Vec<f64>],
    tol: f64,
) -> (bool, Option<WedgeWitness>) {
    let sum = d1.sum(d2);
    for p in points {
        let omega_p = system.omega().at(p);
        let (ok, witness) = is_expanded_solution_point(&sum, &omega_p, p, tol);
        if !ok {
            return (false, witness);
        }
    }
    (true, None)
}

/// Decomposition of an expanded solution checked against the kernel: is `H`
/// a solution, and does `B` stay inside `span(K)`?
///
/// For a variational system a violation indicates a bug; for a
/// non-variational system it witnesses how the decomposition theorem fails.
/// Precondition failures are flagged, not thrown.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremDecomposition {
    pub decomposition: DecompositionReport,
    pub expanded_precondition: bool,
    pub variational: bool,
    pub h_is_solution: bool,
    pub h_residual: f64,
    pub b_in_kernel: bool,
    pub b_kernel_residual: f64,
}

pub fn theorem_decomposition(
    dist: &Distribution,
    system: &PremultisymplecticSystem,
    p: &[f64],
    tol: f64,
) -> Result<TheoremDecomposition> {
    let omega_p = system.omega().at(p);
    let chart = system.chart();
    let (expanded, _) = is_expanded_solution_point(dist, &omega_p, p, tol);
    let (variational, _) = kernels::is_variational_point(&omega_p, chart, tol);
    let decomposition = decompose_transverse(dist, p, tol)?;

    let (h_ok, h_residual) = kerm_contains(&decomposition.h_basis, &omega_p, tol);

    let kernel = kernels::kernel_distribution_point(&omega_p, chart, linalg::TOL_RANK);
    let k_span: Vec<DVector<f64>> = kernel.k_basis.iter().map(|v| v.as_dvector()).collect();
    let b_vecs: Vec<DVector<f64>> = decomposition
        .b_basis
        .iter()
        .map(|v| v.as_dvector())
        .collect();
    let b_kernel_residual = linalg::span_containment_residual(&k_span, &b_vecs);

    Ok(TheoremDecomposition {
        decomposition,
        expanded_precondition: expanded,
        variational,
        h_is_solution: h_ok,
        h_residual,
        b_in_kernel: b_kernel_residual <= tol,
        b_kernel_residual,
    })
}

/// True iff every pairwise bracket of the generators stays in the pointwise
/// span of the distribution (least-squares residual below `tol`).
pub fn is_involutive_point(dist: &Distribution, p: &[f64], h: f64, tol: f64) -> bool {
    let vals = dist.at(p);
    if vals.is_empty() {
        return true;
    }
    let dim = dist.chart().dim();
    let a = DMatrix::from_fn(dim, vals.len(), |i, j| vals[j].components()[i]);
    let gens = dist.generators();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let bracket = lie_bracket_fd(&gens[i], &gens[j], p, h).as_dvector();
            if bracket.norm() <= tol {
                continue;
            }
            let coeffs = linalg::lstsq(&a, &bracket);
            let residual = (&a * coeffs - &bracket).norm() / bracket.norm().max(1.0);
            if residual > tol {
                return false;
            }
        }
    }
    true
}

/// Pairwise kernel-relatedness over a labeled family, with the transitivity
/// failures that show where `∼_Ω` stops being an equivalence relation.
#[derive(Debug, Clone, Serialize)]
pub struct RelationGraph {
    pub labels: Vec<String>,
    /// Edges (i, j) with i < j present iff the pair is kernel related at all
    /// sampled points.
    pub edges: Vec<(usize, usize)>,
    /// Triples (i, j, k), i < k, with edges ij and jk but no edge ik.
    pub transitivity_failures: Vec<(usize, usize, usize)>,
    /// Labels of family members that fail the expanded-solution precondition.
    pub non_expanded: Vec<String>,
}

impl RelationGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&(a, b))
    }
}

/// Build the kernel-relatedness graph of a family of expanded solutions and
/// list all transitivity failures.
pub fn equivalence_probe(
    family: &[(String, Distribution)],
    system: &PremultisymplecticSystem,
    points: &[Vec<f64>],
    tol: f64,
) -> RelationGraph {
    let labels: Vec<String> = family.iter().map(|(l, _)| l.clone()).collect();
    let mut non_expanded = Vec::new();
    for (label, dist) in family {
        let all_ok = points.iter().all(|p| {
            let omega_p = system.omega().at(p);
            is_expanded_solution_point(dist, &omega_p, p, tol).0
        });
        if !all_ok {
            non_expanded.push(label.clone());
        }
    }
    let mut edges = Vec::new();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let (ok, _) = kernel_related(&family[i].1, &family[j].1, system, points, tol);
            if ok {
                edges.push((i, j));
            }
        }
    }
    let graph = RelationGraph {
        labels,
        edges,
        transitivity_failures: vec![],
        non_expanded,
    };
    let mut failures = Vec::new();
    for i in 0..family.len() {
        for k in i + 1..family.len() {
            if graph.has_edge(i, k) {
                continue;
            }
            for j in 0..family.len() {
                if j == i || j == k {
                    continue;
                }
                if graph.has_edge(i, j) && graph.has_edge(j, k) {
                    failures.push((i, j, k));
                }
            }
        }
    }
    RelationGraph {
        transitivity_failures: failures,
        ..graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simple;

    fn r8_parts() -> (
        PremultisymplecticSystem,
        Distribution,
        Distribution,
        Distribution,
    ) {
        let model = simple::r8();
        let d1 = model.distribution("D1").unwrap();
        let d2 = model.distribution("D2").unwrap();
        let d3 = model.distribution("D3").unwrap();
        (model.system, d1, d2, d3)
    }

    #[test]
    fn transversality_examples() {
        let (system, d1, _, _) = r8_parts();
        let p = vec![0.0; 8];
        assert!(is_transverse_point(&d1, &p, 1e-10));
        let vertical = Distribution::from_coordinates(system.chart().clone(), &[5, 6]);
        assert!(!is_transverse_point(&vertical, &p, 1e-10));
        // base rank 1 on an m = 2 chart
        let chart = system.chart().clone();
        let g1 = VectorField::constant(chart.clone(), {
            let mut v = VectorValue::basis(8, 0);
            v.components_mut()[2] = 1.0;
            v
        });
        let g2 = VectorField::coordinate(chart.clone(), 0);
        let thin = Distribution::new(chart, vec![g1, g2]);
        assert!(!is_transverse_point(&thin, &p, 1e-10));
    }

    #[test]
    fn decompose_d1_plus_d2() {
        let (_, d1, d2, _) = r8_parts();
        let sum = d1.sum(&d2);
        let p = vec![0.0; 8];
        let rep = decompose_transverse(&sum, &p, 1e-10).unwrap();
        assert_eq!(rep.h_basis.len(), 2);
        // greedy pivots pick the x and y directions first
        assert!(rep.h_basis[0].components()[0] == 1.0);
        assert!(rep.h_basis[1].components()[1] == 1.0);
        // remainder is the vertical pair {∂u, ∂v}
        assert_eq!(rep.b_basis.len(), 2);
        for b in &rep.b_basis {
            assert!(b.components()[..2].iter().all(|&c| c == 0.0));
        }
        assert!(rep.span_residual < 1e-12);
    }

    #[test]
    fn decompose_rank_m_leaves_empty_b() {
        let (_, d1, _, _) = r8_parts();
        let trivial = Distribution::from_coordinates(d1.chart().clone(), &[0, 1]);
        let rep = decompose_transverse(&trivial, &[0.0; 8], 1e-10).unwrap();
        assert!(rep.b_basis.is_empty());
    }

    #[test]
    fn decompose_mixed_generators_preserves_span() {
        // generators with mixed base components: x+q and x shifted combinations
        let (system, _, _, _) = r8_parts();
        let chart = system.chart().clone();
        let mk = |comps: Vec<f64>| VectorField::constant(chart.clone(), VectorValue::new(comps));
        let d = Distribution::new(
            chart.clone(),
            vec![
                mk(vec![1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]),
                mk(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                mk(vec![2.0, 1.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0]),
            ],
        );
        let rep = decompose_transverse(&d, &[0.0; 8], 1e-10).unwrap();
        assert_eq!(rep.h_basis.len(), 2);
        assert_eq!(rep.b_basis.len(), 1);
        assert!(rep.span_residual < 1e-12);
    }

    #[test]
    fn r8_expanded_solutions_and_counterexample() {
        let (system, d1, d2, d3) = r8_parts();
        let p = vec![0.0; 8];
        let omega = system.omega().at(&p);
        for d in [&d1, &d2, &d3] {
            assert!(is_expanded_solution_point(d, &omega, &p, 1e-10).0);
        }
        assert!(is_expanded_solution_point(&d1.sum(&d2), &omega, &p, 1e-10).0);
        assert!(is_expanded_solution_point(&d2.sum(&d3), &omega, &p, 1e-10).0);
        let (ok, witness) = is_expanded_solution_point(&d1.sum(&d3), &omega, &p, 1e-10);
        assert!(!ok);
        let w = witness.unwrap();
        // failing pair is {∂u, ∂w}: generators 2 and 5 of the 6-generator sum
        assert_eq!(w.generator_indices, vec![2, 5]);
        assert_eq!(w.contraction.coeff(&[2]).abs(), 1.0);
        assert_eq!(w.residual, 1.0);
    }

    #[test]
    fn r6_non_trivial_expanded_solution() {
        let model = simple::r6();
        let d = model.distribution("D").unwrap();
        let p = vec![0.0; 6];
        let omega = model.system.omega().at(&p);
        assert!(is_expanded_solution_point(&d, &omega, &p, 1e-10).0);
    }

    #[test]
    fn kernel_related_is_reflexive_and_symmetric() {
        let (system, d1, _, d3) = r8_parts();
        let points = vec![vec![0.0; 8], vec![0.3; 8]];
        assert!(kernel_related(&d1, &d1, &system, &points, 1e-10).0);
        let ab = kernel_related(&d1, &d3, &system, &points, 1e-10).0;
        let ba = kernel_related(&d3, &d1, &system, &points, 1e-10).0;
        assert_eq!(ab, ba);
        assert!(!ab);
    }

    #[test]
    fn theorem_decomposition_flags_r8() {
        let (system, d1, d2, _) = r8_parts();
        let sum = d1.sum(&d2);
        let rep = theorem_decomposition(&sum, &system, &[0.0; 8], 1e-8).unwrap();
        assert!(rep.expanded_precondition);
        assert!(!rep.variational); // R8 form is not variational
        assert!(rep.h_is_solution);
        // B = {∂u, ∂v}: ∂v ∈ K but ∂u ∉ K, so B ⊄ K — consistent with the
        // variational flag being false.
        assert!(!rep.b_in_kernel);
        assert!(rep.b_kernel_residual > 0.5);
    }

    #[test]
    fn theorem_decomposition_r6() {
        let model = simple::r6();
        let d = model.distribution("D").unwrap();
        let rep = theorem_decomposition(&d, &model.system, &[0.0; 6], 1e-8).unwrap();
        assert!(rep.expanded_precondition);
        assert!(!rep.variational);
        assert_eq!(rep.decomposition.b_basis.len(), 1);
        assert!(!rep.b_in_kernel); // K = {0} yet B = ⟨∂u⟩
    }

    #[test]
    fn coordinate_distributions_are_involutive() {
        let (system, d1, _, _) = r8_parts();
        assert!(is_involutive_point(&d1, &[0.2; 8], 1e-5, 1e-5));
        let k = Distribution::from_coordinates(system.chart().clone(), &[6]);
        assert!(is_involutive_point(&k, &[0.2; 8], 1e-5, 1e-5));
    }

    #[test]
    fn linear_coefficient_fields_fail_involutivity() {
        // X = ∂x + q·∂u, Y = ∂y: [X,Y] = 0; but X' = ∂x + y·∂u, Y = ∂y gives
        // [X', Y] = -∂u which is outside span{X', Y}.
        let (system, _, _, _) = r8_parts();
        let chart = system.chart().clone();
        let xp = VectorField::new(chart.clone(), |p| {
            let mut v = VectorValue::basis(8, 0);
            v.components_mut()[5] = p[1];
            v
        });
        let y = VectorField::coordinate(chart.clone(), 1);
        let d = Distribution::new(chart, vec![xp, y]);
        assert!(!is_involutive_point(&d, &[0.1; 8], 1e-5, 1e-5));
    }

    #[test]
    fn probe_reports_the_r8_triple() {
        let (system, d1, d2, d3) = r8_parts();
        let family = vec![
            ("D1".to_string(), d1),
            ("D2".to_string(), d2),
            ("D3".to_string(), d3),
        ];
        let points = vec![vec![0.0; 8]];
        let graph = equivalence_probe(&family, &system, &points, 1e-10);
        assert!(graph.non_expanded.is_empty());
        assert_eq!(graph.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(graph.transitivity_failures, vec![(0, 1, 2)]);
    }

    #[test]
    fn singleton_family_is_trivially_transitive() {
        let (system, d1, _, _) = r8_parts();
        let family = vec![("D1".to_string(), d1)];
        let graph = equivalence_probe(&family, &system, &[vec![0.0; 8]], 1e-10);
        assert!(graph.transitivity_failures.is_empty());
    }

    #[test]
    fn relation_graph_serializes_as_adjacency_plus_failures() {
        let (system, d1, d2, d3) = r8_parts();
        let family = vec![
            ("D1".to_string(), d1),
            ("D2".to_string(), d2),
            ("D3".to_string(), d3),
        ];
        let graph = equivalence_probe(&family, &system, &[vec![0.0; 8]], 1e-10);
        let js = serde_json::to_value(&graph).unwrap();
        assert_eq!(js["edges"], serde_json::json!([[0, 1], [1, 2]]));
        assert_eq!(js["transitivity_failures"], serde_json::json!([[0, 1, 2]]));
        assert_eq!(js["labels"], serde_json::json!(["D1", "D2", "D3"]));
    }
}
