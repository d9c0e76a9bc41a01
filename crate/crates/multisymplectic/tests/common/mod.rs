#![allow(dead_code)] // not every test target uses every oracle helper

//! Dense antisymmetrized-tensor oracle, independent of the sparse engine.
//!
//! A degree-k form is stored as the full `dim^k` array of its values on all
//! basis tuples; operations are written from the multilinear definitions so
//! that agreement with the sparse implementations is meaningful evidence.

use multisymplectic::exterior::{FormValue, VectorValue};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct DenseForm {
    pub dim: usize,
    pub degree: usize,
    pub data: Vec<f64>,
}

fn tuples(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..degree {
        let mut next = Vec::with_capacity(out.len() * dim);
        for t in &out {
            for i in 0..dim {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn flat_index(dim: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &i| acc * dim + i)
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut p = perm.to_vec();
    let mut sign = 1.0;
    for i in 0..p.len() {
        while p[i] != i {
            let j = p[i];
            p.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

impl DenseForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        DenseForm {
            dim,
            degree,
            data: vec![0.0; dim.pow(degree as u32)],
        }
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.data[flat_index(self.dim, tuple)]
    }

    pub fn from_sparse(form: &FormValue) -> Self {
        let mut dense = DenseForm::zero(form.dim(), form.degree());
        for (key, &c) in form.coeffs() {
            let base: Vec<usize> = key.indices().to_vec();
            // distribute over all permutations with signs
            let mut order: Vec<usize> = (0..base.len()).collect();
            permute_all(&mut order, &mut |perm| {
                let tuple: Vec<usize> = perm.iter().map(|&i| base[i]).collect();
                let idx = flat_index(form.dim(), &tuple);
                dense.data[idx] = permutation_sign(perm) * c;
            });
        }
        dense
    }

    pub fn to_sparse(&self) -> FormValue {
        let mut out = FormValue::zero(self.dim, self.degree);
        for t in tuples(self.dim, self.degree) {
            if t.windows(2).all(|w| w[0] < w[1]) {
                let v = self.get(&t);
                if v != 0.0 {
                    out.add_term(&t, v);
                }
            }
        }
        out
    }

    pub fn max_diff(&self, other: &DenseForm) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn wedge(&self, other: &DenseForm) -> DenseForm {
        assert_eq!(self.dim, other.dim);
        let (j, k) = (self.degree, other.degree);
        let mut out = DenseForm::zero(self.dim, j + k);
        let positions: Vec<usize> = (0..j + k).collect();
        let splits = choose(&positions, j);
        for t in tuples(self.dim, j + k) {
            let mut total = 0.0;
            for left in &splits {
                let right: Vec<usize> = positions
                    .iter()
                    .copied()
                    .filter(|p| !left.contains(p))
                    .collect();
                let perm: Vec<usize> = left.iter().chain(right.iter()).copied().collect();
                let sign = permutation_sign(&perm);
                let lt: Vec<usize> = left.iter().map(|&p| t[p]).collect();
                let rt: Vec<usize> = right.iter().map(|&p| t[p]).collect();
                total += sign * self.get(&lt) * other.get(&rt);
            }
            let idx = flat_index(self.dim, &t);
            out.data[idx] = total;
        }
        out
    }

    /// First-slot insertion `(i(v)ω)(w2,…) = ω(v, w2,…)`.
    pub fn interior(&self, v: &VectorValue) -> DenseForm {
        assert!(self.degree >= 1);
        let mut out = DenseForm::zero(self.dim, self.degree - 1);
        for t in tuples(self.dim, self.degree - 1) {
            let mut total = 0.0;
            for i in 0..self.dim {
                let mut full = vec![i];
                full.extend_from_slice(&t);
                total += v.components()[i] * self.get(&full);
            }
            out.data[flat_index(self.dim, &t)] = total;
        }
        out
    }

    pub fn apply(&self, vectors: &[VectorValue]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let mut total = 0.0;
        for t in tuples(self.dim, self.degree) {
            let mut prod = self.get(&t);
            if prod == 0.0 {
                continue;
            }
            for (slot, &i) in t.iter().enumerate() {
                prod *= vectors[slot].components()[i];
            }
            total += prod;
        }
        total
    }

    /// `(ξ*ω)(u1,…) = ω(Ju1,…)` for a dense matrix with `rows = self.dim`.
    pub fn pullback(&self, jac: &nalgebra::DMatrix<f64>) -> DenseForm {
        assert_eq!(jac.nrows(), self.dim);
        let target = jac.ncols();
        let mut out = DenseForm::zero(target, self.degree);
        for t in tuples(target, self.degree) {
            let vectors: Vec<VectorValue> = t
                .iter()
                .map(|&col| VectorValue::from_dvector(&jac.column(col).into_owned()))
                .collect();
            out.data[flat_index(target, &t)] = self.apply(&vectors);
        }
        out
    }
}

fn choose(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in choose(&items[i + 1..], k - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn permute_all(order: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn heap(n: usize, arr: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if n <= 1 {
            f(arr);
            return;
        }
        for i in 0..n {
            heap(n - 1, arr, f);
            if n.is_multiple_of(2) {
                arr.swap(i, n - 1);
            } else {
                arr.swap(0, n - 1);
            }
        }
    }
    heap(order.len(), order, f);
}

pub fn random_sparse_form(
    rng: &mut ChaCha8Rng,
    dim: usize,
    degree: usize,
    terms: usize,
) -> FormValue {
    let mut f = FormValue::zero(dim, degree);
    for _ in 0..terms {
        let mut idx: Vec<usize> = Vec::new();
        while idx.len() < degree {
            let i = rng.gen_range(0..dim);
            if !idx.contains(&i) {
                idx.push(i);
            }
        }
        f.add_term(&idx, rng.gen_range(-2.0..2.0));
    }
    f
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> VectorValue {
    VectorValue::new((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
}
