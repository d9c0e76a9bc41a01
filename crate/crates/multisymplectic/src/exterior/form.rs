use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Strictly increasing tuple of coordinate indices; the basis label of one
/// exterior monomial `dξ_{i1} ∧ … ∧ dξ_{ik}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Build from already sorted, strictly increasing indices.
    pub fn new(indices: Vec<usize>) -> Self {
        debug_assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "indices must be strictly increasing"
        );
        IndexSet(indices)
    }

    /// Sort an arbitrary tuple, returning the canonical set and the parity
    /// sign of the sorting permutation; `None` when an index repeats.
    pub fn normalize(mut indices: Vec<usize>) -> Option<(Self, f64)> {
        let mut sign = 1.0;
        // insertion sort with transposition counting; tuples are tiny
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((IndexSet(indices), sign))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    /// Position of `idx` inside the tuple, if present.
    pub fn position(&self, idx: usize) -> Option<usize> {
        self.0.binary_search(&idx).ok()
    }

    /// Remove one index, keeping order. Panics if absent.
    pub fn without(&self, idx: usize) -> Self {
        let pos = self.position(idx).expect("index present");
        let mut v = self.0.clone();
        v.remove(pos);
        IndexSet(v)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Sparse degree-`k` alternating tensor at a point.
///
/// Canonical form: coefficients that are exactly zero are never stored, so
/// two values are equal iff their coefficient maps are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    degree: usize,
    dim: usize,
    coeffs: BTreeMap<IndexSet, f64>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormValue {
            degree,
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis covector `dξ_idx`.
    pub fn basis_covector(dim: usize, idx: usize) -> Self {
        let mut f = FormValue::zero(dim, 1);
        f.add_term(&[idx], 1.0);
        f
    }

    /// The top monomial on the given (not necessarily sorted) indices.
    pub fn monomial(dim: usize, indices: &[usize], coeff: f64) -> Self {
        let mut f = FormValue::zero(dim, indices.len());
        f.add_term(indices, coeff);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<IndexSet, f64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest coefficient magnitude (max norm).
    pub fn max_norm(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn coeff(&self, indices: &[usize]) -> f64 {
        match IndexSet::normalize(indices.to_vec()) {
            Some((key, sign)) => sign * self.coeffs.get(&key).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Accumulate `coeff` on the monomial with the given indices (any order;
    /// the alternating sign is applied). Exact zeros are dropped.
    pub fn add_term(&mut self, indices: &[usize], coeff: f64) {
        assert_eq!(indices.len(), self.degree, "term degree mismatch");
        debug_assert!(indices.iter().all(|&i| i < self.dim), "index out of range");
        if coeff == 0.0 {
            return;
        }
        if let Some((key, sign)) = IndexSet::normalize(indices.to_vec()) {
            let slot = self.coeffs.entry(key).or_insert(0.0);
            *slot += sign * coeff;
            if *slot == 0.0 {
                let key = IndexSet::normalize(indices.to_vec()).unwrap().0;
                self.coeffs.remove(&key);
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = FormValue::zero(self.dim, self.degree);
        for (k, c) in &self.coeffs {
            let v = c * s;
            if v != 0.0 {
                out.coeffs.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &FormValue) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let slot = out.coeffs.entry(k.clone()).or_insert(0.0);
            *slot += c;
            if *slot == 0.0 {
                out.coeffs.remove(k);
            }
        }
        out
    }

    pub fn sub(&self, other: &FormValue) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Evaluate the form on `k` vectors: `Σ_S c_S det(v_b[s_a])`.
    pub fn apply(&self, vectors: &[VectorValue]) -> f64 {
        assert_eq!(vectors.len(), self.degree, "need one vector per degree");
        for v in vectors {
            assert_eq!(v.dim(), self.dim, "dimension mismatch");
        }
        let k = self.degree;
        if k == 0 {
            return self
                .coeffs
                .get(&IndexSet::new(vec![]))
                .copied()
                .unwrap_or(0.0);
        }
        let mut total = 0.0;
        let mut minor = DMatrix::zeros(k, k);
        for (key, c) in &self.coeffs {
            for (row, &i) in key.indices().iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    minor[(row, col)] = v.components()[i];
                }
            }
            total += c * minor.determinant();
        }
        total
    }
}

impl fmt::Display for FormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:+.6}·d{k}")?;
        }
        Ok(())
    }
}

// JSON wire shape: {"degree":k,"dim":N,"coeffs":[{"idx":[...],"c":x},...]}
// with the index arrays sorted (BTreeMap iteration order).
#[derive(Serialize, Deserialize)]
struct FormWire {
    degree: usize,
    dim: usize,
    coeffs: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    idx: Vec<usize>,
    c: f64,
}

impl Serialize for FormValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire = FormWire {
            degree: self.degree,
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, &c)| TermWire {
                    idx: k.indices().to_vec(),
                    c,
                })
                .collect(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = FormWire::deserialize(d)?;
        let mut f = FormValue::zero(wire.dim, wire.degree);
        for t in wire.coeffs {
            if t.idx.len() != wire.degree {
                return Err(serde::de::Error::custom("term degree mismatch"));
            }
            f.add_term(&t.idx, t.c);
        }
        Ok(f)
    }
}

/// Tangent vector at a point: dense component array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorValue(Vec<f64>);

impl VectorValue {
    pub fn new(components: Vec<f64>) -> Self {
        VectorValue(components)
    }

    pub fn zeros(dim: usize) -> Self {
        VectorValue(vec![0.0; dim])
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[idx] = 1.0;
        VectorValue(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        VectorValue(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &VectorValue) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        VectorValue(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn from_dvector(v: &DVector<f64>) -> Self {
        VectorValue(v.iter().copied().collect())
    }
}

/// Degree-`k` multivector: either a sparse coefficient map (same shape as
/// [`FormValue`]) or a decomposable product of `k` vectors.
#[derive(Debug, Clone)]
pub enum MultivectorValue {
    Sparse {
        degree: usize,
        dim: usize,
        coeffs: BTreeMap<IndexSet, f64>,
    },
    Decomposable(Vec<VectorValue>),
}

impl MultivectorValue {
    pub fn decomposable(factors: Vec<VectorValue>) -> Self {
        MultivectorValue::Decomposable(factors)
    }

    /// Expand a decomposable multivector into sparse coefficients via
    /// `k × k` minors; sparse values are returned unchanged.
    pub fn expand(&self) -> MultivectorValue {
        match self {
            MultivectorValue::Sparse { .. } => self.clone(),
            MultivectorValue::Decomposable(vs) => {
                let k = vs.len();
                let dim = vs.first().map(|v| v.dim()).unwrap_or(0);
                let mut coeffs = BTreeMap::new();
                let mut minor = DMatrix::zeros(k, k);
                for combo in increasing_tuples(dim, k) {
                    for (row, &i) in combo.iter().enumerate() {
                        for (col, v) in vs.iter().enumerate() {
                            minor[(row, col)] = v.components()[i];
                        }
                    }
                    let det = minor.determinant();
                    if det != 0.0 {
                        coeffs.insert(IndexSet::new(combo.clone()), det);
                    }
                }
                MultivectorValue::Sparse {
                    degree: k,
                    dim,
                    coeffs,
                }
            }
        }
    }

    pub fn coeff(&self, indices: &[usize]) -> f64 {
        match self.expand() {
            MultivectorValue::Sparse { coeffs, .. } => {
                match IndexSet::normalize(indices.to_vec()) {
                    Some((key, sign)) => sign * coeffs.get(&key).copied().unwrap_or(0.0),
                    None => 0.0,
                }
            }
            MultivectorValue::Decomposable(_) => unreachable!(),
        }
    }
}

/// All strictly increasing `k`-tuples from `0..n`.
pub(crate) fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Exterior product. Bilinear; the sign is the shuffle-permutation parity and
/// keys merge only when disjoint.
///
/// Panics on dimension mismatch.
pub fn wedge(a: &FormValue, b: &FormValue) -> FormValue {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch in wedge");
    let mut out = FormValue::zero(a.dim(), a.degree() + b.degree());
    for (ka, ca) in a.coeffs() {
        for (kb, cb) in b.coeffs() {
            if ka.indices().iter().any(|i| kb.contains(*i)) {
                continue;
            }
            // shuffle sign: count inversions between the two sorted tuples
            let mut inversions = 0usize;
            for &x in ka.indices() {
                inversions += kb.indices().iter().filter(|&&y| y < x).count();
            }
            let sign = if inversions.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let mut merged: Vec<usize> = ka.indices().to_vec();
            merged.extend_from_slice(kb.indices());
            merged.sort_unstable();
            let key = IndexSet::new(merged);
            let slot = out.coeffs.entry(key.clone()).or_insert(0.0);
            *slot += sign * ca * cb;
            if *slot == 0.0 {
                out.coeffs.remove(&key);
            }
        }
    }
    out
}

/// Interior product `i(v)ω`: degree drops by one, first-slot insertion.
///
/// Panics when `ω` has degree 0 or the dimensions disagree.
pub fn interior(v: &VectorValue, omega: &FormValue) -> FormValue {
    assert_eq!(
        v.dim(),
        omega.dim(),
        "dimension mismatch in interior product"
    );
    assert!(omega.degree() >= 1, "interior product needs degree >= 1");
    let mut out = FormValue::zero(omega.dim(), omega.degree() - 1);
    let comps = v.components();
    for (key, c) in omega.coeffs() {
        for (pos, &j) in key.indices().iter().enumerate() {
            let vj = comps[j];
            if vj == 0.0 {
                continue;
            }
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let rest = key.without(j);
            let slot = out.coeffs.entry(rest.clone()).or_insert(0.0);
            *slot += sign * vj * c;
            if *slot == 0.0 {
                out.coeffs.remove(&rest);
            }
        }
    }
    out
}

/// Iterated interior product `i(v1∧…∧vk)ω = i(v1)∘…∘i(vk)ω` (rightmost
/// factor first).
///
/// A linearly dependent factor list short-circuits to the exact zero form:
/// by alternation the decomposable multivector vanishes, so the contraction
/// is zero regardless of rounding.
///
/// Panics when `k` exceeds the degree or dimensions disagree.
pub fn interior_decomposable(vs: &[VectorValue], omega: &FormValue) -> FormValue {
    assert!(
        vs.len() <= omega.degree(),
        "more factors than the form degree"
    );
    for v in vs {
        assert_eq!(
            v.dim(),
            omega.dim(),
            "dimension mismatch in interior product"
        );
    }
    if vs.len() > 1 {
        let a = DMatrix::from_fn(omega.dim(), vs.len(), |i, j| vs[j].components()[i]);
        if crate::linalg::rank(&a, 1e-12) < vs.len() {
            return FormValue::zero(omega.dim(), omega.degree() - vs.len());
        }
    }
    let mut acc = omega.clone();
    for v in vs.iter().rev() {
        acc = interior(v, &acc);
    }
    acc
}

/// Pullback of `ω` along a linear tangent map.
///
/// `jac` maps the source space into `ω`'s space: `rows = ω.dim()`, one column
/// per source coordinate. The result lives on the source space:
/// `(pullback ω)(u1,…,uk) = ω(J u1, …, J uk)`; the coefficient on a source
/// index set `S'` is the minor expansion `Σ_S ω_S det(J[S, S'])`, accumulated
/// here by distributing the wedge of the pulled-back row covectors (cheap
/// when the map is sparse).
///
/// Panics when `jac.nrows() != ω.dim()`.
pub fn pullback_linear(jac: &DMatrix<f64>, omega: &FormValue) -> FormValue {
    assert_eq!(jac.nrows(), omega.dim(), "pullback shape mismatch");
    let target_dim = jac.ncols();
    let k = omega.degree();
    let mut out = FormValue::zero(target_dim, k);
    if k == 0 {
        for (key, c) in omega.coeffs() {
            out.coeffs.insert(key.clone(), *c);
        }
        return out;
    }
    // row i of the map, read as the 1-form J[i, ·] on the source space
    let mut row_forms: Vec<Option<FormValue>> = vec![None; omega.dim()];
    for (key, c) in omega.coeffs() {
        let mut acc = FormValue::monomial(target_dim, &[], *c);
        for &i in key.indices() {
            let row = row_forms[i].get_or_insert_with(|| {
                let mut f = FormValue::zero(target_dim, 1);
                for j in 0..target_dim {
                    let v = jac[(i, j)];
                    if v != 0.0 {
                        f.add_term(&[j], v);
                    }
                }
                f
            });
            acc = wedge(&acc, row);
            if acc.is_zero() {
                break;
            }
        }
        for (idx, v) in acc.coeffs {
            let slot = out.coeffs.entry(idx.clone()).or_insert(0.0);
            *slot += v;
            if *slot == 0.0 {
                out.coeffs.remove(&idx);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r8_omega() -> FormValue {
        // coordinates x,y,q,px,py,u,v,w -> 0..7
        let mut w = FormValue::zero(8, 3);
        w.add_term(&[2, 3, 1], 1.0); // dq∧dpx∧dy
        w.add_term(&[2, 4, 0], -1.0); // -dq∧dpy∧dx
        w.add_term(&[2, 5, 7], 1.0); // dq∧du∧dw
        w
    }

    #[test]
    fn wedge_repeated_covector_is_zero() {
        let dx = FormValue::basis_covector(4, 0);
        assert!(wedge(&dx, &dx).is_zero());
    }

    #[test]
    fn wedge_antisymmetry_on_basis_covectors() {
        // dq ∧ dpx on the R8 chart: +1 on {2,3}, flipped order gives -1.
        let dq = FormValue::basis_covector(8, 2);
        let dpx = FormValue::basis_covector(8, 3);
        let ab = wedge(&dq, &dpx);
        assert_eq!(ab.coeff(&[2, 3]), 1.0);
        let ba = wedge(&dpx, &dq);
        assert_eq!(ba.coeff(&[2, 3]), -1.0);
    }

    #[test]
    fn wedge_triple_sign_matches_oracle() {
        // (dq∧dpx)∧dy -> +1 on {1,2,3}: two transpositions to sort (2,3,1).
        let dq = FormValue::basis_covector(8, 2);
        let dpx = FormValue::basis_covector(8, 3);
        let dy = FormValue::basis_covector(8, 1);
        let t = wedge(&wedge(&dq, &dpx), &dy);
        assert_eq!(t.coeffs().len(), 1);
        assert_eq!(t.coeff(&[1, 2, 3]), 1.0);
    }

    #[test]
    fn interior_linear_in_vector() {
        let w = r8_omega();
        assert!(interior(&VectorValue::zeros(8), &w).is_zero());
    }

    #[test]
    fn interior_slot_sign() {
        // i(∂u)(dq∧du∧dw) = -dq∧dw : u sits at position 1 of {q,u,w}.
        let w = FormValue::monomial(8, &[2, 5, 7], 1.0);
        let got = interior(&VectorValue::basis(8, 5), &w);
        assert_eq!(got.coeff(&[2, 7]), -1.0);
        assert_eq!(got.coeffs().len(), 1);
    }

    #[test]
    fn interior_dy_on_r8_form() {
        let got = interior(&VectorValue::basis(8, 1), &r8_omega());
        assert_eq!(got.coeff(&[2, 3]), 1.0);
        assert_eq!(got.coeffs().len(), 1);
    }

    #[test]
    fn decomposable_pair_from_d1_annihilates() {
        let w = r8_omega();
        let got = interior_decomposable(&[VectorValue::basis(8, 0), VectorValue::basis(8, 1)], &w);
        assert!(got.is_zero());
    }

    #[test]
    fn decomposable_du_dw_leaves_minus_dq() {
        let w = r8_omega();
        let got = interior_decomposable(&[VectorValue::basis(8, 5), VectorValue::basis(8, 7)], &w);
        assert_eq!(got.coeff(&[2]), -1.0);
        assert_eq!(got.max_norm(), 1.0);
    }

    #[test]
    fn decomposable_repeated_vector_is_exactly_zero() {
        let w = r8_omega();
        let v = VectorValue::new(vec![0.3, -0.7, 1.1, 0.0, 2.0, 0.5, 0.0, -0.2]);
        let got = interior_decomposable(&[v.clone(), v], &w);
        assert!(got.is_zero());
        // dependent but distinct factors collapse too
        let a = VectorValue::new(vec![1.0, 2.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let got = interior_decomposable(&[a.clone(), a.scale(-3.0)], &r8_omega());
        assert!(got.is_zero());
    }

    #[test]
    fn pullback_identity_and_zero() {
        let w = r8_omega();
        let id = DMatrix::identity(8, 8);
        assert_eq!(pullback_linear(&id, &w), w);
        let z = DMatrix::zeros(8, 8);
        assert!(pullback_linear(&z, &w).is_zero());
    }

    #[test]
    fn pullback_slice_injection_drops_nothing_here() {
        // injection R7 -> R8 skipping coordinate v (index 6); Ω never touches v.
        let w = r8_omega();
        let mut jac = DMatrix::zeros(8, 7);
        let keep: Vec<usize> = (0..8).filter(|&i| i != 6).collect();
        for (col, &row) in keep.iter().enumerate() {
            jac[(row, col)] = 1.0;
        }
        let pulled = pullback_linear(&jac, &w);
        assert_eq!(pulled.coeff(&[1, 2, 3]), 1.0);
        assert_eq!(pulled.coeff(&[0, 2, 4]), -1.0);
        assert_eq!(pulled.coeff(&[2, 5, 6]), 1.0); // u,w reindexed to 5,6
        assert_eq!(pulled.coeffs().len(), 3);
    }

    #[test]
    fn apply_matches_coefficient_on_basis_vectors() {
        let w = r8_omega();
        let val = w.apply(&[
            VectorValue::basis(8, 1),
            VectorValue::basis(8, 2),
            VectorValue::basis(8, 3),
        ]);
        assert_eq!(val, 1.0);
        // antisymmetry under argument swap
        let val2 = w.apply(&[
            VectorValue::basis(8, 2),
            VectorValue::basis(8, 1),
            VectorValue::basis(8, 3),
        ]);
        assert_eq!(val2, -1.0);
    }

    #[test]
    fn decomposable_expansion_matches_wedge_of_factors() {
        let a = VectorValue::new(vec![1.0, 2.0, 0.0, -1.0]);
        let b = VectorValue::new(vec![0.0, 1.0, 3.0, 0.5]);
        let mv = MultivectorValue::decomposable(vec![a.clone(), b.clone()]);
        // coefficient on {i,j} must equal a_i b_j - a_j b_i
        for i in 0..4 {
            for j in i + 1..4 {
                let expect =
                    a.components()[i] * b.components()[j] - a.components()[j] * b.components()[i];
                assert!((mv.coeff(&[i, j]) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn json_round_trip_sorted_indices() {
        let w = r8_omega();
        let js = serde_json::to_string(&w).unwrap();
        assert!(js.contains("\"degree\":3"));
        assert!(js.contains("\"idx\":[0,2,4]"));
        let back: FormValue = serde_json::from_str(&js).unwrap();
        assert_eq!(back, w);
    }
}
