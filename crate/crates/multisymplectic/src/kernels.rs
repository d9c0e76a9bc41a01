//! Pointwise linear algebra of the flat map `v ↦ i(v)Ω`: kernels, the
//! vertical kernel distribution, nondegeneracy and variationality tests, and
//! the vertical-extension solver.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    interior, interior_decomposable, FiberedChart, FormValue, IndexSet, VectorValue,
};
use crate::linalg;

/// The flat map at a point as a dense matrix: rows are indexed by the
/// degree-`m` index sets reachable from `Ω_p` by one contraction, column `j`
/// holds `i(e_j)Ω_p` in that row basis.
#[derive(Debug, Clone)]
pub struct FlatMatrix {
    pub rows: Vec<IndexSet>,
    pub matrix: DMatrix<f64>,
}

impl FlatMatrix {
    /// Restate `matrix · v` as a sparse form in the row basis.
    pub fn apply(&self, v: &VectorValue) -> FormValue {
        let out = &self.matrix * v.as_dvector();
        let mut f = FormValue::zero(v.dim(), self.rows.first().map(|r| r.degree()).unwrap_or(0));
        for (i, key) in self.rows.iter().enumerate() {
            if out[i] != 0.0 {
                f.add_term(key.indices(), out[i]);
            }
        }
        f
    }
}

/// Column-`j` data of [`flat_matrix`] equals `interior(e_j, Ω_p)`.
pub fn flat_matrix(omega_p: &FormValue, dim: usize) -> FlatMatrix {
    assert_eq!(omega_p.dim(), dim, "dimension mismatch");
    assert!(omega_p.degree() >= 1, "flat map needs degree >= 1");
    let mut row_keys: BTreeSet<IndexSet> = BTreeSet::new();
    for key in omega_p.coeffs().keys() {
        for &j in key.indices() {
            row_keys.insert(key.without(j));
        }
    }
    let rows: Vec<IndexSet> = row_keys.into_iter().collect();
    let mut matrix = DMatrix::zeros(rows.len(), dim);
    for j in 0..dim {
        let col = interior(&VectorValue::basis(dim, j), omega_p);
        for (key, c) in col.coeffs() {
            let r = rows.binary_search(key).expect("row key present");
            matrix[(r, j)] = *c;
        }
    }
    FlatMatrix { rows, matrix }
}

/// Orthonormal basis of `ker¹Ω_p = {v : i(v)Ω_p = 0}` via rank-revealing SVD;
/// the rank cut is at singular values `<= tol * max(σ_max, 1)`.
pub fn ker1(omega_p: &FormValue, tol: f64) -> Vec<VectorValue> {
    let flat = flat_matrix(omega_p, omega_p.dim());
    linalg::nullspace(&flat.matrix, tol)
        .into_iter()
        .map(|v| VectorValue::from_dvector(&v))
        .collect()
}

/// Kernel data at a point: the full `ker¹` basis and its vertical part
/// `K = ker¹Ω ∩ V(π)`, with the worst contraction residual across both.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub ker1_basis: Vec<VectorValue>,
    pub k_basis: Vec<VectorValue>,
    pub ker1_dim: usize,
    pub k_dim: usize,
    pub max_residual: f64,
}

/// Compute `K = ker¹Ω ∩ V(π)` by taking the nullspace of the flat matrix
/// restricted to the vertical columns; the base components of every reported
/// vector are zero by construction.
pub fn kernel_distribution_point(
    omega_p: &FormValue,
    chart: &FiberedChart,
    tol: f64,
) -> KernelReport {
    assert_eq!(omega_p.dim(), chart.dim(), "chart dimension mismatch");
    let dim = chart.dim();
    let m = chart.base_dim();
    let flat = flat_matrix(omega_p, dim);
    let ker1_basis: Vec<VectorValue> = linalg::nullspace(&flat.matrix, tol)
        .into_iter()
        .map(|v| VectorValue::from_dvector(&v))
        .collect();

    let vertical_block = flat.matrix.columns(m, dim - m).into_owned();
    let k_basis: Vec<VectorValue> = linalg::nullspace(&vertical_block, tol)
        .into_iter()
        .map(|nv| {
            let mut full = vec![0.0; dim];
            full[m..dim].copy_from_slice(nv.as_slice());
            VectorValue::new(full)
        })
        .collect();

    let max_residual = ker1_basis
        .iter()
        .chain(k_basis.iter())
        .map(|b| interior(b, omega_p).max_norm())
        .fold(0.0, f64::max);

    KernelReport {
        ker1_dim: ker1_basis.len(),
        k_dim: k_basis.len(),
        ker1_basis,
        k_basis,
        max_residual,
    }
}

/// True iff `ker¹Ω_p` is trivial; otherwise a kernel vector witnesses the
/// degeneracy.
pub fn is_1_nondegenerate(omega_p: &FormValue, tol: f64) -> (bool, Option<VectorValue>) {
    let mut ker = ker1(omega_p, tol);
    match ker.pop() {
        None => (true, None),
        Some(w) => (false, Some(w)),
    }
}

/// Decomposable kernel membership: true iff
/// `‖i(v1∧…∧vk)Ω_p‖∞ <= tol`, returning the residual. Linearly dependent
/// lists give residual exactly 0 by alternation.
pub fn kerm_contains(vs: &[VectorValue], omega_p: &FormValue, tol: f64) -> (bool, f64) {
    let residual = interior_decomposable(vs, omega_p).max_norm();
    (residual <= tol, residual)
}

/// Result of the triple-contraction scan: the first failing triple of
/// vertical coordinate directions, if any.
#[derive(Debug, Clone, Serialize)]
pub struct VariationalWitness {
    pub triple: [usize; 3],
    pub residual: f64,
}

/// Test `i(Z1)i(Z2)i(Z3)Ω_p = 0` for all vertical coordinate triples.
///
/// Scanning coordinate triples suffices because the contraction is pointwise
/// multilinear. Vacuously true for fiber dimension < 3.
pub fn is_variational_point(
    omega_p: &FormValue,
    chart: &FiberedChart,
    tol: f64,
) -> (bool, Option<VariationalWitness>) {
    let verticals: Vec<usize> = chart.vertical_indices().collect();
    if verticals.len() < 3 {
        return (true, None);
    }
    let dim = chart.dim();
    for a in 0..verticals.len() {
        for b in a + 1..verticals.len() {
            for c in b + 1..verticals.len() {
                let vs = [
                    VectorValue::basis(dim, verticals[a]),
                    VectorValue::basis(dim, verticals[b]),
                    VectorValue::basis(dim, verticals[c]),
                ];
                let residual = interior_decomposable(&vs, omega_p).max_norm();
                if residual > tol {
                    return (
                        false,
                        Some(VariationalWitness {
                            triple: [verticals[a], verticals[b], verticals[c]],
                            residual,
                        }),
                    );
                }
            }
        }
    }
    (true, None)
}

/// Basis of the vertical vectors `Y` with
/// `Y ∧ W ∈ ker^m Ω_p` for every `(m−1)`-wedge `W` from the span.
///
/// The span must be transverse of rank exactly `m`. The conditions stack into
/// one linear system over the `m` leave-one-out wedges of an orthonormal span
/// basis; the verdict does not depend on the basis choice.
pub fn expanded_extension_space(
    d_span: &[VectorValue],
    omega_p: &FormValue,
    chart: &FiberedChart,
    tol: f64,
) -> Result<Vec<VectorValue>> {
    let dim = chart.dim();
    let m = chart.base_dim();
    let cols: Vec<DVector<f64>> = d_span.iter().map(|v| v.as_dvector()).collect();
    let basis = linalg::orthonormal_span(&cols, linalg::TOL_RANK);
    if basis.len() != m {
        return Err(Error::InvalidInput(format!(
            "extension space needs a rank-{m} span, got rank {}",
            basis.len()
        )));
    }
    let base_block = DMatrix::from_fn(m, m, |i, j| basis[j][i]);
    if linalg::rank(&base_block, linalg::TOL_RANK) < m {
        return Err(Error::NotTransverse {
            rank: linalg::rank(&base_block, linalg::TOL_RANK),
            m,
        });
    }

    let n_vert = dim - m;
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for leave in 0..m {
        let wedge_vs: Vec<VectorValue> = (0..m)
            .filter(|&i| i != leave)
            .map(|i| VectorValue::from_dvector(&basis[i]))
            .collect();
        let two_form = interior_decomposable(&wedge_vs, omega_p);
        debug_assert_eq!(two_form.degree(), 2);
        // i(v)σ = 0 for a 2-form σ: the key {p,q} (p<q) with coefficient c
        // sends +c·v_p to component q and −c·v_q to component p.
        let mut block = DMatrix::zeros(dim, n_vert);
        for (key, c) in two_form.coeffs() {
            let (p, q) = (key.indices()[0], key.indices()[1]);
            if p >= m {
                block[(q, p - m)] += c;
            }
            if q >= m {
                block[(p, q - m)] -= c;
            }
        }
        for r in 0..dim {
            rows.push(block.row(r).transpose());
        }
    }
    let system = DMatrix::from_fn(rows.len(), n_vert, |i, j| rows[i][j]);
    let null = linalg::nullspace(&system, tol.max(linalg::TOL_RANK));
    Ok(null
        .into_iter()
        .map(|nv| {
            let mut full = vec![0.0; dim];
            full[m..dim].copy_from_slice(nv.as_slice());
            VectorValue::new(full)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simple;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn flat_matrix_of_zero_form() {
        let z = FormValue::zero(4, 2);
        let flat = flat_matrix(&z, 4);
        assert!(flat.rows.is_empty());
        assert_eq!(flat.matrix.ncols(), 4);
    }

    #[test]
    fn flat_matrix_reproduces_interior() {
        let model = simple::r8();
        let p = vec![0.0; 8];
        let omega = model.system.omega().at(&p);
        let flat = flat_matrix(&omega, 8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v = VectorValue::new((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let via_matrix = flat.apply(&v);
            let direct = interior(&v, &omega);
            assert!(via_matrix.sub(&direct).max_norm() < 1e-12);
        }
    }

    #[test]
    fn r8_flat_column_for_v_is_zero() {
        let model = simple::r8();
        let omega = model.system.omega().at(&[0.0; 8]);
        let flat = flat_matrix(&omega, 8);
        assert!(flat.matrix.column(6).amax() == 0.0);
    }

    #[test]
    fn r8_kernel_is_spanned_by_dv() {
        let model = simple::r8();
        let omega = model.system.omega().at(&[0.0; 8]);
        let ker = ker1(&omega, 1e-9);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert!((v.components()[6].abs() - 1.0).abs() < 1e-12);
        let report = kernel_distribution_point(&omega, model.system.chart(), 1e-9);
        assert_eq!(report.k_dim, 1);
        assert!(report.max_residual < 1e-12);
    }

    #[test]
    fn symplectic_two_form_is_nondegenerate() {
        // dq∧dp on the chart (q, p) has empty kernel.
        let w = FormValue::monomial(2, &[0, 1], 1.0);
        assert!(ker1(&w, 1e-9).is_empty());
        let (ok, witness) = is_1_nondegenerate(&w, 1e-9);
        assert!(ok && witness.is_none());
    }

    #[test]
    fn r6_kernel_distribution_is_trivial() {
        let model = simple::r6();
        let omega = model.system.omega().at(&[0.0; 6]);
        let report = kernel_distribution_point(&omega, model.system.chart(), 1e-9);
        assert_eq!(report.ker1_dim, 0);
        assert_eq!(report.k_dim, 0);
    }

    #[test]
    fn r8_is_degenerate_with_dv_witness() {
        let model = simple::r8();
        let omega = model.system.omega().at(&[0.0; 8]);
        let (ok, witness) = is_1_nondegenerate(&omega, 1e-9);
        assert!(!ok);
        let w = witness.unwrap();
        assert!(w.components()[6].abs() > 0.99);
    }

    #[test]
    fn kerm_examples() {
        let model = simple::r8();
        let omega = model.system.omega().at(&[0.0; 8]);
        // pairs from D1 annihilate
        let (ok, r) = kerm_contains(
            &[VectorValue::basis(8, 0), VectorValue::basis(8, 1)],
            &omega,
            1e-10,
        );
        assert!(ok && r == 0.0);
        // spec usage with three vectors (D1's generators)
        let (ok, _) = kerm_contains(
            &[
                VectorValue::basis(8, 0),
                VectorValue::basis(8, 1),
                VectorValue::basis(8, 5),
            ],
            &omega,
            1e-10,
        );
        assert!(ok);
        // dependent list: residual exactly zero
        let a = VectorValue::new(vec![1.0, 0.5, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let (ok, r) = kerm_contains(&[a.clone(), a.scale(2.0)], &omega, 0.0);
        assert!(ok && r == 0.0);
        // R5: (∂x, ∂y) annihilates
        let m5 = simple::r5();
        let w5 = m5.system.omega().at(&[0.0; 5]);
        let (ok, _) = kerm_contains(
            &[VectorValue::basis(5, 0), VectorValue::basis(5, 1)],
            &w5,
            1e-10,
        );
        assert!(ok);
    }

    #[test]
    fn variational_witnesses() {
        // R8 is NOT variational: dq∧du∧dw has three vertical factors.
        let m8 = simple::r8();
        let w8 = m8.system.omega().at(&[0.0; 8]);
        let (ok, wit) = is_variational_point(&w8, m8.system.chart(), 1e-10);
        assert!(!ok);
        assert_eq!(wit.unwrap().triple, [2, 5, 7]);

        let m5 = simple::r5();
        let w5 = m5.system.omega().at(&[0.0; 5]);
        let (ok, wit) = is_variational_point(&w5, m5.system.chart(), 1e-10);
        assert!(!ok);
        assert_eq!(wit.unwrap().triple, [2, 3, 4]);

        let m6 = simple::r6();
        let w6 = m6.system.omega().at(&[0.0; 6]);
        let (ok, wit) = is_variational_point(&w6, m6.system.chart(), 1e-10);
        assert!(!ok);
        assert_eq!(wit.unwrap().triple, [3, 4, 5]);
    }

    #[test]
    fn vacuously_variational_below_three_verticals() {
        let chart = FiberedChart::from_names(&["t"], &["q", "p"]);
        let w = FormValue::monomial(3, &[1, 2], 1.0);
        let (ok, wit) = is_variational_point(&w, &chart, 1e-10);
        assert!(ok && wit.is_none());
    }

    #[test]
    fn extension_space_r5_is_trivial() {
        let m5 = simple::r5();
        let w5 = m5.system.omega().at(&[0.0; 5]);
        let ext = expanded_extension_space(
            &[VectorValue::basis(5, 0), VectorValue::basis(5, 1)],
            &w5,
            m5.system.chart(),
            1e-9,
        )
        .unwrap();
        assert!(ext.is_empty());
    }

    #[test]
    fn extension_space_r8_contains_u_v_w() {
        let m8 = simple::r8();
        let w8 = m8.system.omega().at(&[0.0; 8]);
        let ext = expanded_extension_space(
            &[VectorValue::basis(8, 0), VectorValue::basis(8, 1)],
            &w8,
            m8.system.chart(),
            1e-9,
        )
        .unwrap();
        assert_eq!(ext.len(), 3);
        let span: Vec<_> = ext.iter().map(|v| v.as_dvector()).collect();
        let expect: Vec<_> = [5usize, 6, 7]
            .iter()
            .map(|&i| VectorValue::basis(8, i).as_dvector())
            .collect();
        assert!(linalg::span_equality_residual(&span, &expect) < 1e-10);
    }

    #[test]
    fn extension_space_rejects_vertical_span() {
        let m8 = simple::r8();
        let w8 = m8.system.omega().at(&[0.0; 8]);
        let err = expanded_extension_space(
            &[VectorValue::basis(8, 5), VectorValue::basis(8, 6)],
            &w8,
            m8.system.chart(),
            1e-9,
        );
        assert!(err.is_err());
    }

    #[test]
    fn extension_space_contains_the_kernel_for_any_transverse_span() {
        let m8 = simple::r8();
        let w8 = m8.system.omega().at(&[0.0; 8]);
        let kernel = kernel_distribution_point(&w8, m8.system.chart(), 1e-9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            // random transverse rank-2 span: base block plus vertical noise
            let mk = |mu: usize, rng: &mut rand_chacha::ChaCha8Rng| {
                let mut v = vec![0.0; 8];
                v[mu] = 1.0;
                for c in v.iter_mut().skip(2) {
                    *c = rng.gen_range(-1.0..1.0);
                }
                VectorValue::new(v)
            };
            let span = [mk(0, &mut rng), mk(1, &mut rng)];
            let ext = expanded_extension_space(&span, &w8, m8.system.chart(), 1e-9).unwrap();
            let ext_span: Vec<_> = ext.iter().map(|v| v.as_dvector()).collect();
            let k_span: Vec<_> = kernel.k_basis.iter().map(|v| v.as_dvector()).collect();
            assert!(
                linalg::span_containment_residual(&ext_span, &k_span) < 1e-9,
                "kernel must embed into every extension space"
            );
        }
    }

    #[test]
    fn kernel_report_serializes() {
        let m8 = simple::r8();
        let w8 = m8.system.omega().at(&[0.0; 8]);
        let report = kernel_distribution_point(&w8, m8.system.chart(), 1e-9);
        let js = serde_json::to_value(&report).unwrap();
        assert_eq!(js["k_dim"], 1);
        assert!(js["k_basis"].is_array());
        assert!(js["max_residual"].is_number());
    }
}
