//! Dense helpers for the small matrices this crate produces: rank-revealing
//! nullspaces, least-squares solves, and subspace comparison by projection.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions.
pub const TOL_RANK: f64 = 1e-9;

/// Orthonormal nullspace basis of `a`, cut at singular values
/// `<= tol * max(sigma_max, 1)`.
///
/// Rows are padded with zeros up to the column count first so the SVD always
/// carries a full right-singular basis.
pub fn nullspace(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (r, c) = a.shape();
    let m = if r < c {
        let mut padded = DMatrix::zeros(c, c);
        padded.view_mut((0, 0), (r, c)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("svd with v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            basis.push(v_t.row(i).transpose());
        }
    }
    // Singular values beyond the row count (possible after padding removal in
    // theory) are already covered by the zero padding above.
    basis
}

/// Numerical rank with the same relative cutoff as [`nullspace`].
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, TOL_RANK).expect("svd solve")
}

/// Orthonormal basis for the span of the given columns.
pub fn orthonormal_span(cols: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let n = cols[0].len();
    let a = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(i, _)| u.column(i).into_owned())
        .collect()
}

/// Max distance of the (normalized) vectors from the span: `||(I - QQ^T) v||`.
///
/// Returns 0 for an empty vector list; an empty span leaves vectors untouched.
pub fn span_containment_residual(span: &[DVector<f64>], vectors: &[DVector<f64>]) -> f64 {
    let q = orthonormal_span(span, TOL_RANK);
    let mut worst: f64 = 0.0;
    for v in vectors {
        let scale = v.norm().max(1.0);
        let mut res = v.clone();
        for b in &q {
            let c = b.dot(v);
            res -= b * c;
        }
        worst = worst.max(res.norm() / scale);
    }
    worst
}

/// Symmetric span comparison: max of the two containment residuals.
pub fn span_equality_residual(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    span_containment_residual(a, b).max(span_containment_residual(b, a))
}
