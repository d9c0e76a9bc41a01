//! Property tests for the sparse exterior engine, checked against the dense
//! antisymmetrized-tensor oracle and the algebraic identities.

mod common;

use common::{random_sparse_form, random_vector, DenseForm};
use multisymplectic::exterior::{
    interior, interior_decomposable, pullback_linear, wedge, FiberedChart, FormField, FormValue,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seeded_form(seed: u64, dim: usize, degree: usize) -> FormValue {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sparse_form(&mut rng, dim, degree, 4)
}

proptest! {
    #[test]
    fn antiderivation_identity(seed in 0u64..5000, da in 1usize..3, db in 1usize..3) {
        // i(v)(a∧b) = (i(v)a)∧b + (−1)^{deg a} a∧(i(v)b)
        let dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse_form(&mut rng, dim, da, 3);
        let b = random_sparse_form(&mut rng, dim, db, 3);
        let v = random_vector(&mut rng, dim);
        let lhs = interior(&v, &wedge(&a, &b));
        let sign = if da % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = wedge(&interior(&v, &a), &b).add(&wedge(&a, &interior(&v, &b)).scale(sign));
        prop_assert!(lhs.sub(&rhs).max_norm() <= 1e-12);
    }

    #[test]
    fn double_interior_vanishes(seed in 0u64..5000, degree in 2usize..5) {
        let dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_sparse_form(&mut rng, dim, degree, 5);
        let v = random_vector(&mut rng, dim);
        let twice = interior(&v, &interior(&v, &w));
        prop_assert!(twice.max_norm() <= 1e-12 * w.max_norm().max(1.0));
    }

    #[test]
    fn wedge_associativity(seed in 0u64..5000) {
        let dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse_form(&mut rng, dim, 1, 3);
        let b = random_sparse_form(&mut rng, dim, 2, 3);
        let c = random_sparse_form(&mut rng, dim, 1, 3);
        let lhs = wedge(&wedge(&a, &b), &c);
        let rhs = wedge(&a, &wedge(&b, &c));
        prop_assert!(lhs.sub(&rhs).max_norm() <= 1e-12);
    }

    #[test]
    fn graded_commutativity(seed in 0u64..5000, da in 1usize..4, db in 1usize..3) {
        let dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse_form(&mut rng, dim, da, 3);
        let b = random_sparse_form(&mut rng, dim, db, 3);
        let sign = if (da * db) % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = wedge(&a, &b);
        let rhs = wedge(&b, &a).scale(sign);
        prop_assert!(lhs.sub(&rhs).max_norm() <= 1e-12);
    }

    #[test]
    fn sparse_wedge_matches_dense(seed in 0u64..5000) {
        let dim = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse_form(&mut rng, dim, 2, 3);
        let b = random_sparse_form(&mut rng, dim, 1, 3);
        let sparse = DenseForm::from_sparse(&wedge(&a, &b));
        let dense = DenseForm::from_sparse(&a).wedge(&DenseForm::from_sparse(&b));
        prop_assert!(sparse.max_diff(&dense) <= 1e-12);
    }

    #[test]
    fn sparse_interior_matches_dense(seed in 0u64..5000, degree in 1usize..4) {
        let dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_sparse_form(&mut rng, dim, degree, 4);
        let v = random_vector(&mut rng, dim);
        let sparse = DenseForm::from_sparse(&interior(&v, &w));
        let dense = DenseForm::from_sparse(&w).interior(&v);
        prop_assert!(sparse.max_diff(&dense) <= 1e-12);
    }

    #[test]
    fn sparse_pullback_matches_dense(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_sparse_form(&mut rng, 5, 2, 4);
        let jac = DMatrix::from_fn(5, 4, |_, _| rng.gen_range(-1.0..1.0));
        let sparse = DenseForm::from_sparse(&pullback_linear(&jac, &w));
        let dense = DenseForm::from_sparse(&w).pullback(&jac);
        prop_assert!(sparse.max_diff(&dense) <= 1e-12);
    }

    #[test]
    fn json_round_trip(seed in 0u64..5000, degree in 0usize..4) {
        let w = seeded_form(seed, 6, degree);
        let js = serde_json::to_string(&w).unwrap();
        let back: FormValue = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, w);
    }
}

#[test]
fn decomposable_contraction_matches_iterated_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let w = random_sparse_form(&mut rng, 6, 3, 5);
        let v1 = random_vector(&mut rng, 6);
        let v2 = random_vector(&mut rng, 6);
        let sparse = interior_decomposable(&[v1.clone(), v2.clone()], &w);
        let dense = DenseForm::from_sparse(&w).interior(&v2).interior(&v1);
        assert!(DenseForm::from_sparse(&sparse).max_diff(&dense) <= 1e-12);
    }
}

#[test]
fn fd_derivative_squares_to_zero_on_smooth_fields() {
    // quadratic-coefficient 1-form fields on small charts
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let dim = 4;
        let chart = FiberedChart::from_names(&["x0", "x1"], &["y0", "y1"]);
        let coeffs: Vec<(usize, Vec<f64>)> = (0..dim)
            .map(|i| (i, (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let field = FormField::new(chart.clone(), 1, move |p| {
            let mut w = FormValue::zero(4, 1);
            for (i, quad) in &coeffs {
                let c: f64 = quad.iter().zip(p).map(|(q, x)| q * x * x).sum();
                w.add_term(&[*i], c);
            }
            w
        });
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = 1e-5;
        let df = multisymplectic::exterior::exterior_derivative_fd(&field, &p, h);
        // d(dF) by differentiating the FD derivative field again
        let inner = field.clone();
        let dfield = FormField::new(chart, 2, move |q| {
            multisymplectic::exterior::exterior_derivative_fd(&inner, q, h)
        });
        let ddf = multisymplectic::exterior::exterior_derivative_fd(&dfield, &p, h);
        assert!(df.degree() == 2);
        assert!(
            ddf.max_norm() <= 1e-5,
            "d∘d residual {:.3e}",
            ddf.max_norm()
        );
    }
}
