//! Seeded random variational systems of the local shape
//! `Ω = dF_j^μ ∧ dy^j ∧ d^{m−1}x_μ + dE ∧ d^m x` with quadratic coefficient
//! functions, plus a designated block of fiber coordinates that never enter
//! the coefficients — those directions span a known part of the kernel and
//! drive the kernel-augmentation machinery.
//!
//! Every triple vertical contraction of such a form vanishes by construction
//! (each term carries at most two fiber covectors), which makes the
//! transverse-frame solution condition *linear* in the frame coefficients:
//! `Ω(∂_0,…,V_μ,…,∂_{m−1}, ∂_i)` terms with two or more verticals among the
//! frame slots die, so a minimum-norm least-squares solve produces a
//! solution frame pointwise.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exterior::{FiberedChart, FormField, FormValue, VectorField, VectorValue};
use crate::linalg;
use crate::solutions::Distribution;
use crate::system::PremultisymplecticSystem;

/// Polynomial of total degree ≤ 2 over a subset of the chart coordinates.
#[derive(Debug, Clone)]
pub struct Poly2 {
    c0: f64,
    lin: Vec<f64>,
    quad: Vec<Vec<f64>>, // symmetric
    active: Vec<usize>,  // chart indices the polynomial depends on
}

impl Poly2 {
    pub fn random(rng: &mut impl Rng, active: Vec<usize>) -> Self {
        let k = active.len();
        let mut quad = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = rng.gen_range(-1.0..1.0);
                quad[i][j] = v;
                quad[j][i] = v;
            }
        }
        Poly2 {
            c0: rng.gen_range(-1.0..1.0),
            lin: (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            quad,
            active,
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let xs: Vec<f64> = self.active.iter().map(|&i| p[i]).collect();
        let mut v = self.c0;
        for (i, x) in xs.iter().enumerate() {
            v += self.lin[i] * x;
            for (j, y) in xs.iter().enumerate() {
                v += 0.5 * self.quad[i][j] * x * y;
            }
        }
        v
    }

    /// Gradient in full chart coordinates (zeros off the active set).
    pub fn grad(&self, p: &[f64], dim: usize) -> Vec<f64> {
        let xs: Vec<f64> = self.active.iter().map(|&i| p[i]).collect();
        let mut g = vec![0.0; dim];
        for (i, &ci) in self.active.iter().enumerate() {
            let mut gi = self.lin[i];
            for (j, y) in xs.iter().enumerate() {
                gi += self.quad[i][j] * y;
            }
            g[ci] = gi;
        }
        g
    }
}

/// One random variational system plus its designated kernel directions.
#[derive(Clone)]
pub struct VariationalInstance {
    pub system: PremultisymplecticSystem,
    pub m: usize,
    pub n: usize,
    /// Chart indices of the fiber coordinates absent from all coefficients.
    pub kernel_dirs: Vec<usize>,
}

#[derive(Clone)]
struct Coefficients {
    f: Vec<Vec<Poly2>>, // f[j][mu] for the non-kernel fiber coordinates
    e: Poly2,
}

/// Draw an instance: `m ∈ {2,3}`, `n ∈ {3,5}`, and one or two designated
/// kernel directions, all decided by the seed.
pub fn random_instance(seed: u64) -> VariationalInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = if rng.gen_bool(0.5) { 2 } else { 3 };
    let n = if rng.gen_bool(0.5) { 3 } else { 5 };
    let n_kernel = if n == 3 { 1 } else { rng.gen_range(1..=2) };
    instance_with_shape(&mut rng, m, n, n_kernel)
}

pub fn instance_with_shape(
    rng: &mut impl Rng,
    m: usize,
    n: usize,
    n_kernel: usize,
) -> VariationalInstance {
    assert!(
        n > n_kernel + 1,
        "need at least two coupled fiber coordinates"
    );
    let dim = m + n;
    let names: Vec<String> = (0..m)
        .map(|i| format!("x{i}"))
        .chain((0..n).map(|j| format!("y{j}")))
        .collect();
    let chart = FiberedChart::new(m, n, names);
    let n_active = n - n_kernel;
    let active: Vec<usize> = (0..m).chain(m..m + n_active).collect();
    let f: Vec<Vec<Poly2>> = (0..n_active)
        .map(|_| (0..m).map(|_| Poly2::random(rng, active.clone())).collect())
        .collect();
    let e = Poly2::random(rng, active.clone());
    let kernel_dirs: Vec<usize> = (m + n_active..dim).collect();

    let coeffs = Coefficients { f, e };
    let omega = FormField::new(chart, m + 1, move |p| eval_omega(&coeffs, m, n, p));
    let system = PremultisymplecticSystem::new(format!("variational-{m}x{n}"), omega);
    VariationalInstance {
        system,
        m,
        n,
        kernel_dirs,
    }
}

fn eval_omega(coeffs: &Coefficients, m: usize, n: usize, p: &[f64]) -> FormValue {
    let dim = m + n;
    let mut w = FormValue::zero(dim, m + 1);
    let base: Vec<usize> = (0..m).collect();
    for (j, row) in coeffs.f.iter().enumerate() {
        let yj = m + j;
        for (mu, poly) in row.iter().enumerate() {
            let grad = poly.grad(p, dim);
            let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
            let d3: Vec<usize> = base.iter().copied().filter(|&b| b != mu).collect();
            for (a, &ga) in grad.iter().enumerate() {
                if ga == 0.0 || a == yj || d3.contains(&a) {
                    continue;
                }
                let mut idx = vec![a, yj];
                idx.extend_from_slice(&d3);
                w.add_term(&idx, ga * sign);
            }
        }
    }
    let ge = coeffs.e.grad(p, dim);
    for (a, &ga) in ge.iter().enumerate().skip(m) {
        if ga == 0.0 {
            continue;
        }
        let mut idx = vec![a];
        idx.extend_from_slice(&base);
        w.add_term(&idx, ga);
    }
    w
}

impl VariationalInstance {
    /// Minimum-norm transverse solution frame at a point: `m` vectors
    /// `X_μ = ∂_μ + G_{jμ} ∂_{y^j}` solving the linearized kernel condition.
    /// Returns the frame and the linear-solve residual.
    pub fn solve_frame_at(&self, p: &[f64]) -> (Vec<VectorValue>, f64) {
        let (m, n) = (self.m, self.n);
        let dim = m + n;
        let omega_p = self.system.omega().at(p);
        let base_frame: Vec<VectorValue> = (0..m).map(|mu| VectorValue::basis(dim, mu)).collect();
        let mut rhs = DVector::zeros(n);
        let mut mat = DMatrix::zeros(n, n * m);
        for i in 0..n {
            let vert = VectorValue::basis(dim, m + i);
            let mut vecs = base_frame.clone();
            vecs.push(vert.clone());
            rhs[i] = omega_p.apply(&vecs);
            for j in 0..n {
                for mu in 0..m {
                    let mut frame = base_frame.clone();
                    frame[mu] = VectorValue::basis(dim, m + j);
                    frame.push(vert.clone());
                    mat[(i, j * m + mu)] = omega_p.apply(&frame);
                }
            }
        }
        let sol = linalg::lstsq(&mat, &(-&rhs));
        let residual = (&mat * &sol + rhs).norm();
        let frame = (0..m)
            .map(|mu| {
                let mut v = vec![0.0; dim];
                v[mu] = 1.0;
                for j in 0..n {
                    v[m + j] = sol[j * m + mu];
                }
                VectorValue::new(v)
            })
            .collect();
        (frame, residual)
    }

    /// The pointwise solution frame as a distribution.
    pub fn solution_distribution(&self) -> Distribution {
        let chart = self.system.chart().clone();
        let gens: Vec<VectorField> = (0..self.m)
            .map(|mu| {
                let inst = self.clone();
                VectorField::new(chart.clone(), move |p| inst.solve_frame_at(p).0[mu].clone())
            })
            .collect();
        Distribution::new(chart, gens)
    }

    /// Expanded solutions built by kernel augmentation: the base frame plus
    /// seeded constant combinations of the designated kernel directions.
    pub fn expanded_family(&self, count: usize, seed: u64) -> Vec<(String, Distribution)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = self.solution_distribution();
        let chart = self.system.chart().clone();
        let dim = chart.dim();
        let mut family = vec![("base".to_string(), base.clone())];
        for i in 1..count {
            let extras = 1 + (i % 2);
            let mut d = base.clone();
            for _ in 0..extras {
                let mut v = vec![0.0; dim];
                for &k in &self.kernel_dirs {
                    v[k] = rng.gen_range(-1.0..1.0);
                }
                d = d.extended(VectorField::constant(chart.clone(), VectorValue::new(v)));
            }
            family.push((format!("aug{i}"), d));
        }
        family
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::interior;
    use crate::kernels;
    use crate::solutions;

    fn points(inst: &VariationalInstance, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..inst.system.dim())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn instances_are_variational_and_closed() {
        for seed in 0..6 {
            let inst = random_instance(seed);
            for p in points(&inst, 3, seed + 100) {
                let omega = inst.system.omega().at(&p);
                let (ok, wit) = kernels::is_variational_point(&omega, inst.system.chart(), 1e-10);
                assert!(ok, "seed {seed}: witness {wit:?}");
                let d = crate::exterior::exterior_derivative_fd(inst.system.omega(), &p, 1e-5);
                assert!(d.max_norm() < 1e-6, "seed {seed}: dΩ {:.3e}", d.max_norm());
            }
        }
    }

    #[test]
    fn designated_directions_are_kernel() {
        for seed in 0..6 {
            let inst = random_instance(seed);
            for p in points(&inst, 2, seed + 7) {
                let omega = inst.system.omega().at(&p);
                for &k in &inst.kernel_dirs {
                    let r = interior(&VectorValue::basis(inst.system.dim(), k), &omega).max_norm();
                    assert!(r == 0.0, "seed {seed}: kernel dir residual {r}");
                }
            }
        }
    }

    #[test]
    fn solved_frame_is_an_expanded_solution() {
        for seed in 0..6 {
            let inst = random_instance(seed);
            let dist = inst.solution_distribution();
            for p in points(&inst, 3, seed + 13) {
                let (_, lin_res) = inst.solve_frame_at(&p);
                assert!(
                    lin_res < 1e-9,
                    "seed {seed}: linear solve residual {lin_res:.3e}"
                );
                let omega = inst.system.omega().at(&p);
                let (ok, wit) = solutions::is_expanded_solution_point(&dist, &omega, &p, 1e-8);
                assert!(ok, "seed {seed}: {wit:?}");
            }
        }
    }
}
